#pragma once

#include <array>
#include <span>
#include <vector>

namespace hodgeflow {

// Flat periodic lattice in 1 or 2 dimensions: the discrete stand-in for a
// compact flat domain without boundary. Cells are indexed axis-0 fastest;
// spacing h_a = period_a / size_a; every cell carries measure prod_a h_a.
class TorusGrid {
 public:
  // sizes.size() must be 1 or 2, each size >= 4, each period > 0.
  TorusGrid(std::vector<int> sizes, std::vector<double> periods);

  int dim() const { return dim_; }
  int size(int axis) const { return sizes_[std::size_t(axis)]; }
  double spacing(int axis) const { return spacings_[std::size_t(axis)]; }
  double period(int axis) const {
    return spacings_[std::size_t(axis)] * sizes_[std::size_t(axis)];
  }
  int cells() const { return cells_; }
  double volume_element() const { return vol_; }
  double total_volume() const { return vol_ * cells_; }

  int cell_index(int i, int j = 0) const;  // coordinates wrap
  std::array<int, 2> coords(int cell) const;

  // Precomputed periodic neighbor tables: forward(a)[c] = c + e_a.
  const std::vector<int>& forward(int axis) const { return fwd_[std::size_t(axis)]; }
  const std::vector<int>& backward(int axis) const { return bwd_[std::size_t(axis)]; }

 private:
  int dim_ = 1;
  int cells_ = 0;
  std::array<int, 2> sizes_{1, 1};
  std::array<double, 2> spacings_{1.0, 1.0};
  double vol_ = 1.0;
  std::array<std::vector<int>, 2> fwd_, bwd_;
};

// k ambient components per cell.
struct AmbientField {
  int cells = 0;
  int ambient = 0;
  std::vector<double> v;

  AmbientField() = default;
  AmbientField(int cells_, int ambient_)
      : cells(cells_), ambient(ambient_),
        v(std::size_t(cells_) * std::size_t(ambient_), 0.0) {}

  std::span<double> at(int c) {
    return {v.data() + std::size_t(c) * std::size_t(ambient), std::size_t(ambient)};
  }
  std::span<const double> at(int c) const {
    return {v.data() + std::size_t(c) * std::size_t(ambient), std::size_t(ambient)};
  }
};

// Discrete 1-form with values in R^k: one k-vector per (cell, axis).
struct OneForm {
  int cells = 0;
  int dim = 0;
  int ambient = 0;
  std::vector<double> v;

  OneForm() = default;
  OneForm(int cells_, int dim_, int ambient_)
      : cells(cells_), dim(dim_), ambient(ambient_),
        v(std::size_t(cells_) * std::size_t(dim_) * std::size_t(ambient_), 0.0) {}

  std::span<double> at(int c, int axis) {
    std::size_t off = (std::size_t(c) * std::size_t(dim) + std::size_t(axis)) *
                      std::size_t(ambient);
    return {v.data() + off, std::size_t(ambient)};
  }
  std::span<const double> at(int c, int axis) const {
    std::size_t off = (std::size_t(c) * std::size_t(dim) + std::size_t(axis)) *
                      std::size_t(ambient);
    return {v.data() + off, std::size_t(ambient)};
  }
};

// Forward difference per axis: (du)_a[c] = (u[c + e_a] - u[c]) / h_a.
OneForm differential(const TorusGrid& g, const AmbientField& u);

// Q[c] = sum_a |du_a[c]|^2 (squared speed field).
std::vector<double> q_field(const TorusGrid& g, const OneForm& du);

// Adjoint of `differential` under the vol-weighted inner products below,
// i.e. backward divergence with a minus sign:
//   (delta w)[c] = -sum_a (w_a[c] - w_a[c - e_a]) / h_a,
// so that inner(differential(u), w) == inner(u, codifferential(w)) exactly
// in exact arithmetic.
AmbientField codifferential(const TorusGrid& g, const OneForm& w);

// vol * sum_cells f[c], Neumaier-compensated in a fixed cell order.
double integrate(const TorusGrid& g, std::span<const double> f);

// Vol-weighted L2 pairings.
double inner(const TorusGrid& g, const AmbientField& a, const AmbientField& b);
double inner(const TorusGrid& g, const OneForm& a, const OneForm& b);
double l2_norm(const TorusGrid& g, const AmbientField& a);

}  // namespace hodgeflow
