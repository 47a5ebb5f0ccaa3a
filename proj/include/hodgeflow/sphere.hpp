#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hodgeflow/grid.hpp"

namespace hodgeflow {

// Unit sphere S^m embedded in R^(m+1): nearest-point projection, tangent
// projection, and the second fundamental form contraction used by the
// Euler-Lagrange equations. Targets with m >= 1 are supported.

inline constexpr double kUnitNormTol = 1e-12;       // SphereMap invariant
inline constexpr double kRenormalizableDrift = 1e-8;  // loader repair threshold
inline constexpr double kDegenerateNorm = 1e-14;    // projection undefined below

// y / |y|. Throws std::domain_error when |y| <= kDegenerateNorm.
void project_in_place(std::span<double> y);
std::vector<double> project(std::span<const double> y);

// psi - <psi,u> u. Throws std::invalid_argument when | |u| - 1 | > 1e-8.
void tangent_project_in_place(std::span<const double> u, std::span<double> psi);
std::vector<double> tangent_project(std::span<const double> u,
                                    std::span<const double> psi);

// A(du,du) at one cell: -|du|^2 u. du_axes holds the cell's axis vectors
// concatenated (length = dim * ambient).
std::vector<double> second_fundamental_term(std::span<const double> u,
                                            std::span<const double> du_axes);

// Grid map into S^m, m = ambient - 1. Every cell must be unit to kUnitNormTol.
struct SphereMap {
  AmbientField f;

  int ambient() const { return f.ambient; }
  int m() const { return f.ambient - 1; }

  void validate(double tol = kUnitNormTol) const;  // throws std::invalid_argument
  void renormalize();                              // cell-wise projection
};

// Cell-wise projection of an ambient field onto the sphere.
SphereMap project_map(const TorusGrid& g, AmbientField raw);

// Cell-wise tangent projection of psi along u.
AmbientField tangent_project_field(const SphereMap& u, const AmbientField& psi);
void tangent_project_field_in_place(const SphereMap& u, AmbientField& psi);

// max over cells of |<psi[c], u[c]>|.
double max_tangency_defect(const SphereMap& u, const AmbientField& psi);

SphereMap constant_map(const TorusGrid& g, std::span<const double> point);

// u[cell] = (cos w theta, sin w theta, 0, ...), theta = 2 pi i / N along
// `axis`: winds the given domain circle w times around a great circle.
// Exactly periodic for any grid period.
SphereMap circle_wrap(const TorusGrid& g, int ambient, int winding = 1, int axis = 0);

// base point + smoothed seeded Gaussian noise, projected back to the sphere.
// amplitude is the root-mean-square ambient displacement before projection.
SphereMap random_perturbation_map(const TorusGrid& g, int ambient,
                                  std::span<const double> base_point,
                                  std::uint64_t seed, double amplitude,
                                  int smoothing_passes = 2);

struct InitSpec {
  enum class Kind { Constant, Wrap, RandomPerturbation };
  Kind kind = Kind::Constant;
  std::vector<double> point;  // optional base/constant point; default pole e_k
  int winding = 1;
  std::uint64_t seed = 0;
  double amplitude = 0.1;
  int smoothing_passes = 2;
};

SphereMap make_initial_map(const TorusGrid& g, int ambient, const InitSpec& spec);

// One nearest-neighbor averaging pass (cell plus its 2*dim neighbors).
AmbientField smooth_once(const TorusGrid& g, const AmbientField& f);

// CSV row format: cell index followed by the ambient components.
// The loader renormalizes per-cell drift up to kRenormalizableDrift and
// rejects anything worse.
void save_sphere_map_csv(const std::string& path, const SphereMap& u);
SphereMap load_sphere_map_csv(const std::string& path, const TorusGrid& g);
void save_ambient_field_csv(const std::string& path, const AmbientField& f);

}  // namespace hodgeflow
