#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

namespace hodgeflow {

// Neumaier-compensated accumulator. Deterministic for a fixed visit order;
// keeps additive reduction error well below 1e-13 at the field sizes used here.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

// SplitMix64. std::mt19937 would do, but the distributions on top of it are
// implementation-defined; this keeps seeded streams identical everywhere.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in (0,1); never returns 0, so log() is safe downstream.
  double uniform01() { return double(next() >> 11) * 0x1.0p-53 + 0x1.0p-54; }
};

// Box-Muller standard normals on a SplitMix64 stream.
struct GaussianRng {
  SplitMix64 rng;
  bool cached = false;
  double cache = 0.0;

  explicit GaussianRng(std::uint64_t seed) : rng(seed) {}

  double next() {
    if (cached) {
      cached = false;
      return cache;
    }
    double u1 = rng.uniform01();
    double u2 = rng.uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cache = r * std::sin(a);
    cached = true;
    return r * std::cos(a);
  }
};

// Derives a per-stream seed from a base seed and a stream index.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Thread budget: HODGEFLOW_THREADS caps worker threads (0 or unset = all
// hardware threads). Always >= 1.
int thread_cap();

// Runs fn(0..n-1), possibly across threads (bounded by thread_cap()).
// fn must be safe to call concurrently for distinct indices; exceptions are
// collected and the first one rethrown after all workers join.
void parallel_for_indices(int n, const std::function<void(int)>& fn);

}  // namespace hodgeflow
