#pragma once

#include <vector>

#include "hodgeflow/density.hpp"

namespace hodgeflow {

// Steady 1-D channel response to a small floor incline. Upstream water of
// depth H moves at speed v1; the floor rises by delta across the incline and
// the free surface responds with an offset eps. Mass conservation fixes the
// downstream speed, the Bernoulli balance fixes eps.

struct BoreProblem {
  double H = 1.0;          // upstream depth, > 0
  double delta = 0.0;      // incline magnitude, |delta| < H
  double v1 = 1.0;         // upstream speed, != 0
  double g = 9.80665;      // gravitational acceleration, > 0
};

void validate_problem(const BoreProblem& p);

// |v1| / sqrt(g H).
double froude_number(const BoreProblem& p);

struct BoreResult {
  double epsilon_exact = 0.0;
  double epsilon_linear = 0.0;
  double downstream_speed = 0.0;  // (H + delta) v1 / (H + eps)
  double froude = 0.0;
  FlowRegime regime = FlowRegime::Tranquil;  // Tranquil F < 1, Shooting F > 1
  double incline_ratio = 0.0;     // |delta| / H, smallness diagnostic
  // Relative residuals of the returned state: the speed/elevation balance
  // (energy), the flux balance (continuity), and the combined cubic relation
  // normalized by v1^2 H max(|delta|, |eps|).
  double energy_residual = 0.0;
  double continuity_residual = 0.0;
  double combined_residual = 0.0;
};

// Shared flux through sections: v_f = v_i A_i / A_f. Areas must be positive.
double conserve_mass(double v_i, double area_i, double area_f);

// First-order offset delta / (1 - g H / v1^2). Throws std::domain_error
// within 1e-10 of the sonic denominator.
double bore_linear(const BoreProblem& p);

// Exact offset: the real root of
//
//   2 g e^3 + (4 g H - v1^2) e^2 + 2 H (g H - v1^2) e
//     + v1^2 delta (2 H + delta) = 0
//
// inside [-H/2, H/2] nearest the first-order value, Newton polished; the
// downstream speed follows from mass conservation and both balances are
// re-checked into the residual fields. Near-sonic input (|F - 1| < 1e-3) is
// refused, and an error listing every real root is raised when none lands in
// the bracket.
BoreResult bore_exact(const BoreProblem& p);

// All real roots of a x^3 + b x^2 + c x + d = 0, ascending, Newton polished.
// Degenerate leading coefficients fall back to the quadratic / linear cases.
std::vector<double> real_cubic_roots(double a, double b, double c, double d);

}  // namespace hodgeflow
