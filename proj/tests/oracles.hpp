// Shared helpers for the test suites: independent numerical oracles
// (quadrature, finite differences) and deterministic field builders.
// Everything here is deliberately written against the public headers only,
// with no knowledge of the library internals, so a bug in the closed forms
// cannot hide behind the same bug in the check.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "hodgeflow/density.hpp"
#include "hodgeflow/grid.hpp"
#include "hodgeflow/sphere.hpp"
#include "hodgeflow/util.hpp"

namespace oracles {

// Adaptive Simpson quadrature. Plenty for the smooth integrands used in the
// tests; tolerance is on the absolute error of the whole interval.
inline double simpson_leaf(double a, double b, double fa, double fm,
                           double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_leaf(a, m, fa, flm, fm);
  const double right = simpson_leaf(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                              depth - 1);
}

inline double integrate_1d(const std::function<double(double)>& f, double a,
                           double b, double tol = 1e-13) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson_leaf(a, b, fa, fm, fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

// Central difference of a scalar function of one variable.
inline double central_diff(const std::function<double(double)>& f, double x,
                           double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Deterministic admissible Q samples in (0, hi), avoiding the endpoints.
inline std::vector<double> q_samples(double hi, int count, std::uint64_t seed) {
  hodgeflow::SplitMix64 rng(hodgeflow::mix_seed(seed, 17));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double u = rng.uniform01();
    out.push_back(hi * (0.02 + 0.96 * u));
  }
  return out;
}

// Random tangential direction field along u: smoothed Gaussian noise,
// projected onto the tangent spaces and L2-normalized. Mirrors what a
// variational probe looks like without using the library's probe builder.
inline hodgeflow::AmbientField random_tangent_field(
    const hodgeflow::TorusGrid& g, const hodgeflow::SphereMap& u,
    std::uint64_t seed, int smoothing_passes = 2) {
  const int m = u.ambient();
  hodgeflow::AmbientField w(g.cells(), m);
  hodgeflow::GaussianRng rng(hodgeflow::mix_seed(seed, 91));
  for (double& x : w.v) x = rng.next();
  hodgeflow::tangent_project_field_in_place(u, w);
  for (int p = 0; p < smoothing_passes; ++p) w = hodgeflow::smooth_once(g, w);
  hodgeflow::tangent_project_field_in_place(u, w);
  const double n = hodgeflow::l2_norm(g, w);
  if (n <= 0.0) throw std::runtime_error("degenerate random tangent field");
  for (double& x : w.v) x /= n;
  return w;
}

// Displace u by t*w and renormalize every cell to the sphere.
inline hodgeflow::SphereMap displace(const hodgeflow::SphereMap& u,
                                     const hodgeflow::AmbientField& w,
                                     double t) {
  hodgeflow::SphereMap out = u;
  const int m = u.ambient();
  for (int c = 0; c < u.f.cells; ++c) {
    auto uc = out.f.at(c);
    auto wc = w.v.data() + static_cast<std::size_t>(c) * m;
    for (int k = 0; k < m; ++k) uc[k] += t * wc[k];
    hodgeflow::project_in_place(uc);
  }
  return out;
}

}  // namespace oracles
