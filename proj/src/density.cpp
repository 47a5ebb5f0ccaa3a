#include "hodgeflow/density.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace hodgeflow {

namespace {

constexpr double kRootTol = 1e-12;      // bisection absolute tolerance
constexpr double kSearchLimit = 1e6;    // bracket bound when the domain is unbounded
constexpr int kScanIntervals = 4096;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_params(const Polytropic& p) {
  if (!(p.gamma > 1.0))
    throw std::invalid_argument("polytropic density: gamma must be > 1");
}

void check_params(const Shallow& s) {
  if (!(s.C > 0.0))
    throw std::invalid_argument("shallow density: C must be > 0");
}

void check_params(const LimitingExponential&) {}
void check_params(const Incompressible&) {}

void check_params_base(const BaseDensity& b) {
  std::visit([](const auto& v) { check_params(v); }, b);
}

// Largest Q at which the bare formula can still be evaluated. The polytropic
// power law stops at its cavitation point (negative base, fractional
// exponent); the other formulas extend over [0, inf).
double formula_limit(const BaseDensity& b) {
  if (const auto* p = std::get_if<Polytropic>(&b)) return 2.0 / (p->gamma - 1.0);
  return kInf;
}

// Raw formula values, no admissibility guard. The shallow line is evaluated
// past its zero when asked (a surface-tension term can keep the total
// positive there).
double raw_rho(const BaseDensity& b, double q) {
  if (const auto* p = std::get_if<Polytropic>(&b)) {
    double a = 0.5 * (p->gamma - 1.0);
    if (q * a > 1.0)
      throw std::domain_error("polytropic density undefined beyond Q = 2/(gamma-1)");
    // log1p keeps this accurate uniformly in gamma, including gamma -> 1.
    return std::exp(std::log1p(-a * q) / (p->gamma - 1.0));
  }
  if (const auto* s = std::get_if<Shallow>(&b)) return 0.5 * (s->C - q);
  if (std::holds_alternative<LimitingExponential>(b)) return std::exp(-0.5 * q);
  return 1.0;
}

double raw_rho_prime(const BaseDensity& b, double q) {
  if (const auto* p = std::get_if<Polytropic>(&b)) {
    double g = p->gamma;
    double a = 0.5 * (g - 1.0);
    if (q * a > 1.0)
      throw std::domain_error("polytropic density undefined beyond Q = 2/(gamma-1)");
    return -0.5 * std::exp(std::log1p(-a * q) * ((2.0 - g) / (g - 1.0)));
  }
  if (std::holds_alternative<Shallow>(b)) return -0.5;
  if (std::holds_alternative<LimitingExponential>(b)) return -0.5 * std::exp(-0.5 * q);
  return 0.0;
}

double raw_e(const BaseDensity& b, double q) {
  if (const auto* p = std::get_if<Polytropic>(&b)) {
    double g = p->gamma;
    double a = 0.5 * (g - 1.0);
    if (q * a > 1.0)
      throw std::domain_error("polytropic density undefined beyond Q = 2/(gamma-1)");
    // integral_0^Q (1-as)^(1/(g-1)) ds = (2/g) (1 - (1-aQ)^(g/(g-1)))
    return (2.0 / g) * (-std::expm1(std::log1p(-a * q) * (g / (g - 1.0))));
  }
  if (const auto* s = std::get_if<Shallow>(&b)) return 0.5 * q * (s->C - 0.5 * q);
  if (std::holds_alternative<LimitingExponential>(b)) return -2.0 * std::expm1(-0.5 * q);
  return q;
}

double tension(double mu, double q) { return mu / std::sqrt(1.0 + q); }

double tension_prime(double mu, double q) {
  double r = 1.0 + q;
  return -0.5 * mu / (r * std::sqrt(r));
}

double tension_integral(double mu, double q) {
  return 2.0 * mu * (std::sqrt(1.0 + q) - 1.0);
}

double raw_rho_model(const DensityModel& m, double q) {
  if (const auto* st = std::get_if<WithSurfaceTension>(&m))
    return raw_rho(st->base, q) + tension(st->mu, q);
  return std::visit(
      [&](const auto& v) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, WithSurfaceTension>)
          return 0.0;  // unreachable
        else
          return raw_rho(BaseDensity(v), q);
      },
      m);
}

double raw_rho_prime_model(const DensityModel& m, double q) {
  if (const auto* st = std::get_if<WithSurfaceTension>(&m))
    return raw_rho_prime(st->base, q) + tension_prime(st->mu, q);
  return std::visit(
      [&](const auto& v) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, WithSurfaceTension>)
          return 0.0;
        else
          return raw_rho_prime(BaseDensity(v), q);
      },
      m);
}

double raw_e_model(const DensityModel& m, double q) {
  if (const auto* st = std::get_if<WithSurfaceTension>(&m))
    return raw_e(st->base, q) + tension_integral(st->mu, q);
  return std::visit(
      [&](const auto& v) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, WithSurfaceTension>)
          return 0.0;
        else
          return raw_e(BaseDensity(v), q);
      },
      m);
}

// Smallest root of f in (0, ub]: coarse scan for the first sign change, then
// bisection to kRootTol. Requires f(0) > 0. Bounded search with explicit
// failure beats silent nontermination.
std::optional<double> smallest_positive_root(const std::function<double(double)>& f,
                                             double ub) {
  if (!(ub > 0.0) || !std::isfinite(ub)) return std::nullopt;
  double qa = 0.0;
  double fa = f(qa);
  if (!(fa > 0.0)) return std::nullopt;
  for (int j = 1; j <= kScanIntervals; ++j) {
    double qb = ub * double(j) / double(kScanIntervals);
    double fb = f(qb);
    if (fb > 0.0) {
      qa = qb;
      continue;
    }
    if (fb == 0.0) return qb;
    while (qb - qa > kRootTol) {
      double qm = 0.5 * (qa + qb);
      double fm = f(qm);
      if (fm > 0.0)
        qa = qm;
      else if (fm < 0.0)
        qb = qm;
      else
        return qm;
    }
    return 0.5 * (qa + qb);
  }
  return std::nullopt;
}

std::optional<double> total_density_zero(const WithSurfaceTension& st) {
  double ub = std::min(formula_limit(st.base), kSearchLimit);
  auto f = [&](double q) { return raw_rho(st.base, q) + tension(st.mu, q); };
  return smallest_positive_root(f, ub);
}

void check_q_admissible(const DensityModel& m, double q) {
  if (!(q >= 0.0)) throw std::domain_error("Q must be >= 0");
  double sup = admissible_q_sup(m);
  if (q >= sup)
    throw std::domain_error("Q = " + std::to_string(q) +
                            " is at or beyond the admissible bound " +
                            std::to_string(sup));
}

}  // namespace

const char* to_string(FlowRegime r) {
  switch (r) {
    case FlowRegime::Tranquil: return "Tranquil";
    case FlowRegime::Sonic: return "Sonic";
    case FlowRegime::Shooting: return "Shooting";
  }
  return "unknown";
}

void validate_model(const DensityModel& model) {
  if (const auto* st = std::get_if<WithSurfaceTension>(&model)) {
    check_params_base(st->base);
    if (!(st->mu >= 0.0))
      throw std::invalid_argument("surface tension: mu must be >= 0");
    return;
  }
  std::visit(
      [](const auto& v) {
        if constexpr (!std::is_same_v<std::decay_t<decltype(v)>, WithSurfaceTension>)
          check_params(v);
      },
      model);
}

double admissible_q_sup(const DensityModel& model) {
  validate_model(model);
  if (const auto* p = std::get_if<Polytropic>(&model)) return 2.0 / (p->gamma - 1.0);
  if (const auto* s = std::get_if<Shallow>(&model)) return s->C;
  if (const auto* st = std::get_if<WithSurfaceTension>(&model)) {
    if (st->mu == 0.0) {
      DensityModel base = std::visit(
          [](const auto& v) -> DensityModel { return DensityModel(v); }, st->base);
      return admissible_q_sup(base);
    }
    if (auto zero = total_density_zero(*st)) return *zero;
    return formula_limit(st->base);
  }
  return kInf;
}

double rho(const DensityModel& model, double q) {
  check_q_admissible(model, q);
  return raw_rho_model(model, q);
}

double rho_prime(const DensityModel& model, double q) {
  check_q_admissible(model, q);
  return raw_rho_prime_model(model, q);
}

double variational_density(const DensityModel& model, double q) {
  check_q_admissible(model, q);
  return raw_e_model(model, q);
}

double mass_flux_derivative(const DensityModel& model, double q) {
  check_q_admissible(model, q);
  double r = raw_rho_model(model, q);
  double rp = raw_rho_prime_model(model, q);
  return r * r + 2.0 * q * r * rp;
}

bool subsonic_check(const DensityModel& model, double q) {
  double d = mass_flux_derivative(model, q);
  return std::isfinite(d) && d > 0.0;
}

std::optional<double> q_crit(const DensityModel& model) {
  validate_model(model);
  if (const auto* p = std::get_if<Polytropic>(&model)) return 2.0 / (p->gamma + 1.0);
  if (const auto* s = std::get_if<Shallow>(&model)) return s->C / 3.0;
  if (std::holds_alternative<Incompressible>(model)) return std::nullopt;
  return q_crit_by_bisection(model);
}

std::optional<double> q_crit_by_bisection(const DensityModel& model) {
  validate_model(model);
  double ub = std::min(admissible_q_sup(model), kSearchLimit);
  auto f = [&](double q) {
    double r = raw_rho_model(model, q);
    double rp = raw_rho_prime_model(model, q);
    return r * r + 2.0 * q * r * rp;
  };
  return smallest_positive_root(f, ub);
}

std::optional<double> cavitation_speed(const DensityModel& model) {
  validate_model(model);
  if (const auto* p = std::get_if<Polytropic>(&model)) return 2.0 / (p->gamma - 1.0);
  if (const auto* s = std::get_if<Shallow>(&model)) return s->C;
  if (const auto* st = std::get_if<WithSurfaceTension>(&model)) {
    if (st->mu == 0.0) {
      DensityModel base = std::visit(
          [](const auto& v) -> DensityModel { return DensityModel(v); }, st->base);
      return cavitation_speed(base);
    }
    return total_density_zero(*st);
  }
  return std::nullopt;
}

std::optional<double> froude(const DensityModel& model, double q) {
  check_q_admissible(model, q);
  if (const auto* s = std::get_if<Shallow>(&model)) {
    double c2 = 0.5 * (s->C - q);  // c^2 = g h = rho(Q)
    return std::sqrt(q / c2);
  }
  if (const auto* p = std::get_if<Polytropic>(&model)) {
    double c2 = 1.0 - 0.5 * (p->gamma - 1.0) * q;
    return std::sqrt(q / c2);
  }
  if (std::holds_alternative<Incompressible>(model)) return 0.0;
  return std::nullopt;
}

FlowRegime classify(const DensityModel& model, double q, double tol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("classify: tol must be >= 0");
  double d = mass_flux_derivative(model, q);
  if (std::abs(d) <= tol) return FlowRegime::Sonic;
  return d > 0.0 ? FlowRegime::Tranquil : FlowRegime::Shooting;
}

double depth(const Shallow& model, double q, double g) {
  check_params(model);
  if (!(g > 0.0)) throw std::invalid_argument("depth: g must be > 0");
  if (!(q >= 0.0) || q > model.C)
    throw std::domain_error("depth: Q must lie in [0, C]");
  return (model.C - q) / (2.0 * g);
}

double rho_unchecked(const DensityModel& model, double q) {
  return raw_rho_model(model, q);
}

double rho_prime_unchecked(const DensityModel& model, double q) {
  return raw_rho_prime_model(model, q);
}

double variational_density_unchecked(const DensityModel& model, double q) {
  return raw_e_model(model, q);
}

}  // namespace hodgeflow
