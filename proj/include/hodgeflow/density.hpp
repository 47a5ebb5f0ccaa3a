#pragma once

#include <optional>
#include <string>
#include <variant>

namespace hodgeflow {

// Mass-density laws rho(Q) as functions of the squared flow speed Q, together
// with the derived quantities the rest of the library is built on:
//
//   variational density   e(Q) = integral_0^Q rho(s) ds
//   mass-flux derivative  d/dQ [ Q rho(Q)^2 ]
//   critical speed        Q_crit : smallest positive root of the flux derivative
//   cavitation speed      Q_cav  : where rho reaches zero (if it does)
//   Froude number + tranquil / sonic / shooting classification
//
// rho is the physical density and decreases with Q; e is its antiderivative
// and increases wherever rho > 0. Flows with positive flux derivative are
// subsonic (tranquil); the sign flip at Q_crit is the sonic transition.
//
// Admissible domain: Q in [0, admissible_q_sup(model)). Evaluating rho, e or
// their derivatives outside it throws std::domain_error. For the polytropic
// law the bound is the cavitation speed 2/(gamma-1); for the shallow law it
// is C; the exponential and incompressible laws are unbounded.

// rho(Q) = (1 - (gamma-1) Q / 2)^(1/(gamma-1)), gamma > 1.
// Cavitates at Q = 2/(gamma-1); critical speed 2/(gamma+1).
struct Polytropic {
  double gamma;
};

// rho(Q) = (C - Q)/2, C > 0. Cavitates at Q = C; critical speed C/3.
// For C = 2 this coincides with Polytropic{gamma = 2}.
struct Shallow {
  double C;
};

// rho(Q) = exp(-Q/2): the gamma -> 1 limit of the polytropic family,
// so e(Q) = 2 (1 - exp(-Q/2)). Never cavitates; critical speed 1.
struct LimitingExponential {};

// rho(Q) = 1, e(Q) = Q. No cavitation, no critical speed.
struct Incompressible {};

using BaseDensity =
    std::variant<Polytropic, Shallow, LimitingExponential, Incompressible>;

// rho_total(Q) = rho_base(Q) + mu (1 + Q)^(-1/2), mu >= 0.
// The capillary term is positive and decreasing, so it postpones (or removes)
// cavitation. Where the base formula extends past its own zero as a smooth
// expression (the shallow line does, the polytropic power law does not) the
// total is evaluated on the extension; the admissible domain then ends at the
// zero of rho_total instead of the zero of rho_base.
struct WithSurfaceTension {
  BaseDensity base;
  double mu;
};

using DensityModel = std::variant<Polytropic, Shallow, LimitingExponential,
                                  Incompressible, WithSurfaceTension>;

enum class FlowRegime { Tranquil, Sonic, Shooting };

const char* to_string(FlowRegime r);

// Throws std::invalid_argument if parameters are out of range
// (gamma <= 1, C <= 0, mu < 0).
void validate_model(const DensityModel& model);

// Exclusive upper bound of the admissible Q range (+inf if unbounded).
double admissible_q_sup(const DensityModel& model);

// Physical density at Q. Pre: 0 <= Q < admissible_q_sup.
double rho(const DensityModel& model, double q);

// d rho / dQ, analytic per variant.
double rho_prime(const DensityModel& model, double q);

// e(Q) = integral_0^Q rho. Closed form for every built-in variant.
double variational_density(const DensityModel& model, double q);

// d/dQ [ Q rho(Q)^2 ] = rho^2 + 2 Q rho rho', analytic per variant.
double mass_flux_derivative(const DensityModel& model, double q);

// True iff the flux derivative over rho lies in (0, +inf).
bool subsonic_check(const DensityModel& model, double q);

// Smallest positive root of the mass-flux derivative. Closed form 2/(gamma+1)
// for Polytropic and C/3 for Shallow; bracketed bisection (absolute tolerance
// 1e-12, search bound 1e6 when the domain is unbounded) otherwise. Empty for
// variants whose flux derivative never vanishes (Incompressible).
std::optional<double> q_crit(const DensityModel& model);

// The bisection path of q_crit, usable on any variant; lets callers check the
// closed forms against the search on the same model.
std::optional<double> q_crit_by_bisection(const DensityModel& model);

// Where rho reaches zero: 2/(gamma-1) for Polytropic, C for Shallow, empty
// for the exponential and incompressible laws. With surface tension mu > 0
// the zero of rho_total is located by bisection (empty if it never vanishes
// within reach of the base formula).
std::optional<double> cavitation_speed(const DensityModel& model);

// Froude number sqrt(Q / c^2) where a sound speed is defined:
// shallow c^2 = rho(Q) = (C - Q)/2, polytropic c^2 = 1 - (gamma-1) Q / 2,
// incompressible F = 0 by convention. Empty for the exponential law and for
// surface-tension totals; classification there goes through the sign of the
// flux derivative instead.
std::optional<double> froude(const DensityModel& model, double q);

// Sonic when |mass_flux_derivative| <= tol (the regime boundary is a root,
// not an interval), tranquil when positive, shooting when negative.
FlowRegime classify(const DensityModel& model, double q, double tol = 1e-9);

// Channel depth h = (C - Q) / (2g) realising the shallow law.
// Pre: 0 <= Q <= C, g > 0 (Q = C gives depth 0).
double depth(const Shallow& model, double q, double g);

// Unchecked fast paths. Caller guarantees 0 <= q < admissible_q_sup(model);
// used by field-level loops that hoist the single domain check out.
double rho_unchecked(const DensityModel& model, double q);
double rho_prime_unchecked(const DensityModel& model, double q);
double variational_density_unchecked(const DensityModel& model, double q);

}  // namespace hodgeflow
