#include "hodgeflow/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hodgeflow/util.hpp"

namespace hodgeflow {

TorusGrid::TorusGrid(std::vector<int> sizes, std::vector<double> periods) {
  if (sizes.size() != 1 && sizes.size() != 2)
    throw std::invalid_argument("grid: dimension must be 1 or 2");
  if (periods.size() != sizes.size())
    throw std::invalid_argument("grid: periods must match dimension");
  dim_ = int(sizes.size());
  cells_ = 1;
  vol_ = 1.0;
  for (int a = 0; a < dim_; ++a) {
    int n = sizes[std::size_t(a)];
    double L = periods[std::size_t(a)];
    if (n < 4)
      throw std::invalid_argument("grid: need at least 4 cells per axis, got " +
                                  std::to_string(n));
    if (!(L > 0.0) || !std::isfinite(L))
      throw std::invalid_argument("grid: period must be positive and finite");
    sizes_[std::size_t(a)] = n;
    spacings_[std::size_t(a)] = L / n;
    cells_ *= n;
    vol_ *= spacings_[std::size_t(a)];
  }
  for (int a = 0; a < dim_; ++a) {
    auto& fw = fwd_[std::size_t(a)];
    auto& bw = bwd_[std::size_t(a)];
    fw.resize(std::size_t(cells_));
    bw.resize(std::size_t(cells_));
    for (int c = 0; c < cells_; ++c) {
      auto xy = coords(c);
      int i = xy[0], j = xy[1];
      if (a == 0) {
        fw[std::size_t(c)] = cell_index(i + 1, j);
        bw[std::size_t(c)] = cell_index(i - 1, j);
      } else {
        fw[std::size_t(c)] = cell_index(i, j + 1);
        bw[std::size_t(c)] = cell_index(i, j - 1);
      }
    }
  }
}

int TorusGrid::cell_index(int i, int j) const {
  int n0 = sizes_[0];
  i = ((i % n0) + n0) % n0;
  if (dim_ == 1) return i;
  int n1 = sizes_[1];
  j = ((j % n1) + n1) % n1;
  return i + n0 * j;
}

std::array<int, 2> TorusGrid::coords(int cell) const {
  int n0 = sizes_[0];
  return {cell % n0, dim_ == 2 ? cell / n0 : 0};
}

namespace {

void check_field(const TorusGrid& g, const AmbientField& u, const char* what) {
  if (u.cells != g.cells() || u.ambient < 1 ||
      u.v.size() != std::size_t(u.cells) * std::size_t(u.ambient))
    throw std::invalid_argument(std::string(what) + ": field shape mismatch");
}

void check_form(const TorusGrid& g, const OneForm& w, const char* what) {
  if (w.cells != g.cells() || w.dim != g.dim() || w.ambient < 1 ||
      w.v.size() != std::size_t(w.cells) * std::size_t(w.dim) * std::size_t(w.ambient))
    throw std::invalid_argument(std::string(what) + ": one-form shape mismatch");
}

}  // namespace

OneForm differential(const TorusGrid& g, const AmbientField& u) {
  check_field(g, u, "differential");
  const int k = u.ambient;
  OneForm out(g.cells(), g.dim(), k);
  for (int a = 0; a < g.dim(); ++a) {
    const double inv_h = 1.0 / g.spacing(a);
    const auto& fw = g.forward(a);
    for (int c = 0; c < g.cells(); ++c) {
      auto uc = u.at(c);
      auto un = u.at(fw[std::size_t(c)]);
      auto dst = out.at(c, a);
      for (int t = 0; t < k; ++t) dst[std::size_t(t)] = (un[std::size_t(t)] - uc[std::size_t(t)]) * inv_h;
    }
  }
  return out;
}

std::vector<double> q_field(const TorusGrid& g, const OneForm& du) {
  check_form(g, du, "q_field");
  std::vector<double> q(std::size_t(g.cells()), 0.0);
  for (int c = 0; c < g.cells(); ++c) {
    double acc = 0.0;
    for (int a = 0; a < du.dim; ++a) {
      auto w = du.at(c, a);
      for (double x : w) acc += x * x;
    }
    q[std::size_t(c)] = acc;
  }
  return q;
}

AmbientField codifferential(const TorusGrid& g, const OneForm& w) {
  check_form(g, w, "codifferential");
  const int k = w.ambient;
  AmbientField out(g.cells(), k);
  for (int a = 0; a < g.dim(); ++a) {
    const double inv_h = 1.0 / g.spacing(a);
    const auto& bw = g.backward(a);
    for (int c = 0; c < g.cells(); ++c) {
      auto here = w.at(c, a);
      auto prev = w.at(bw[std::size_t(c)], a);
      auto dst = out.at(c);
      for (int t = 0; t < k; ++t)
        dst[std::size_t(t)] -= (here[std::size_t(t)] - prev[std::size_t(t)]) * inv_h;
    }
  }
  return out;
}

double integrate(const TorusGrid& g, std::span<const double> f) {
  if (f.size() != std::size_t(g.cells()))
    throw std::invalid_argument("integrate: field shape mismatch");
  CompensatedSum s;
  for (double x : f) s.add(x);
  return s.value() * g.volume_element();
}

double inner(const TorusGrid& g, const AmbientField& a, const AmbientField& b) {
  check_field(g, a, "inner");
  check_field(g, b, "inner");
  if (a.ambient != b.ambient)
    throw std::invalid_argument("inner: ambient dimension mismatch");
  CompensatedSum s;
  for (std::size_t i = 0; i < a.v.size(); ++i) s.add(a.v[i] * b.v[i]);
  return s.value() * g.volume_element();
}

double inner(const TorusGrid& g, const OneForm& a, const OneForm& b) {
  check_form(g, a, "inner");
  check_form(g, b, "inner");
  if (a.ambient != b.ambient)
    throw std::invalid_argument("inner: ambient dimension mismatch");
  CompensatedSum s;
  for (std::size_t i = 0; i < a.v.size(); ++i) s.add(a.v[i] * b.v[i]);
  return s.value() * g.volume_element();
}

double l2_norm(const TorusGrid& g, const AmbientField& a) {
  double v = inner(g, a, a);
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

}  // namespace hodgeflow
