#include "hodgeflow/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hodgeflow {

namespace {

constexpr double kSonicDenominatorTol = 1e-10;  // bore_linear refusal
constexpr double kSonicFroudeBand = 1e-3;       // bore_exact refusal

double cubic_value(double a, double b, double c, double d, double x) {
  return ((a * x + b) * x + c) * x + d;
}

// A few Newton steps; keeps the polish only while it shrinks |f|.
double polish_root(double a, double b, double c, double d, double x) {
  for (int it = 0; it < 8; ++it) {
    const double f = cubic_value(a, b, c, d, x);
    const double fp = (3.0 * a * x + 2.0 * b) * x + c;
    if (f == 0.0 || fp == 0.0) break;
    const double step = f / fp;
    const double next = x - step;
    if (!(std::abs(cubic_value(a, b, c, d, next)) < std::abs(f))) break;
    x = next;
  }
  return x;
}

void sort_and_dedupe(std::vector<double>& roots) {
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots) {
    if (out.empty() || std::abs(r - out.back()) > 1e-12 * std::max(1.0, std::abs(r)))
      out.push_back(r);
  }
  roots.swap(out);
}

}  // namespace

void validate_problem(const BoreProblem& p) {
  if (!(p.H > 0.0) || !std::isfinite(p.H))
    throw std::invalid_argument("upstream depth H must be positive and finite");
  if (!(p.g > 0.0) || !std::isfinite(p.g))
    throw std::invalid_argument("gravity g must be positive and finite");
  if (!std::isfinite(p.delta) || !(std::abs(p.delta) < p.H))
    throw std::invalid_argument("incline delta must satisfy |delta| < H");
  if (p.v1 == 0.0 || !std::isfinite(p.v1))
    throw std::invalid_argument("upstream speed v1 must be nonzero and finite");
}

double froude_number(const BoreProblem& p) {
  return std::abs(p.v1) / std::sqrt(p.g * p.H);
}

double conserve_mass(double v_i, double area_i, double area_f) {
  if (!(area_i > 0.0) || !(area_f > 0.0))
    throw std::invalid_argument("section areas must be positive");
  return v_i * area_i / area_f;
}

double bore_linear(const BoreProblem& p) {
  validate_problem(p);
  const double denom = 1.0 - p.g * p.H / (p.v1 * p.v1);
  if (std::abs(denom) <= kSonicDenominatorTol)
    throw std::domain_error(
        "the first-order elevation formula blows up near sonic flow "
        "(|1 - gH/v1^2| <= 1e-10)");
  return p.delta / denom;
}

std::vector<double> real_cubic_roots(double a, double b, double c, double d) {
  std::vector<double> roots;
  if (a == 0.0) {
    if (b == 0.0) {
      if (c != 0.0) roots.push_back(-d / c);
      return roots;
    }
    const double disc = c * c - 4.0 * b * d;
    if (disc < 0.0) return roots;
    const double s = std::sqrt(disc);
    // Stable quadratic: avoid cancellation in the small-magnitude root.
    const double qq = -0.5 * (c + std::copysign(s, c));
    roots.push_back(qq / b);
    if (qq != 0.0)
      roots.push_back(d / qq);
    else
      roots.push_back(0.0);
    for (double& r : roots) r = polish_root(a, b, c, d, r);
    sort_and_dedupe(roots);
    return roots;
  }

  // Depressed form t^3 + p t + q with x = t - B/3.
  const double B = b / a, C = c / a, D = d / a;
  const double shift = B / 3.0;
  const double pcoef = C - B * B / 3.0;
  const double qcoef = 2.0 * B * B * B / 27.0 - B * C / 3.0 + D;
  const double disc = 0.25 * qcoef * qcoef + pcoef * pcoef * pcoef / 27.0;

  if (disc > 0.0) {
    const double s = std::sqrt(disc);
    const double t = std::cbrt(-0.5 * qcoef + s) + std::cbrt(-0.5 * qcoef - s);
    roots.push_back(t - shift);
  } else if (pcoef == 0.0 && qcoef == 0.0) {
    roots.push_back(-shift);
  } else {
    // Three real roots (p < 0 here).
    const double r = std::sqrt(-pcoef / 3.0);
    const double arg = std::clamp(-0.5 * qcoef / (r * r * r), -1.0, 1.0);
    const double theta = std::acos(arg);
    for (int k = 0; k < 3; ++k) {
      const double t =
          2.0 * r * std::cos((theta - 2.0 * std::numbers::pi * k) / 3.0);
      roots.push_back(t - shift);
    }
  }
  for (double& r : roots) r = polish_root(a, b, c, d, r);
  sort_and_dedupe(roots);
  return roots;
}

BoreResult bore_exact(const BoreProblem& p) {
  validate_problem(p);
  const double froude = froude_number(p);
  if (std::abs(froude - 1.0) < kSonicFroudeBand)
    throw std::domain_error(
        "near-sonic flow (|F - 1| < 1e-3): the small-offset model degenerates "
        "and the elevation is not meaningfully defined");

  BoreResult res;
  res.epsilon_linear = bore_linear(p);
  res.froude = froude;
  res.regime = froude < 1.0 ? FlowRegime::Tranquil : FlowRegime::Shooting;
  res.incline_ratio = std::abs(p.delta) / p.H;

  const double v2 = p.v1 * p.v1;
  const double a = 2.0 * p.g;
  const double b = 4.0 * p.g * p.H - v2;
  const double c = 2.0 * p.H * (p.g * p.H - v2);
  const double d = v2 * p.delta * (2.0 * p.H + p.delta);

  double eps;
  if (p.delta == 0.0) {
    eps = 0.0;  // the relation is satisfied identically
  } else {
    const std::vector<double> roots = real_cubic_roots(a, b, c, d);
    const double lo = -0.5 * p.H, hi = 0.5 * p.H;
    bool found = false;
    double best = 0.0;
    for (double r : roots) {
      if (r < lo || r > hi) continue;
      if (!found || std::abs(r - res.epsilon_linear) <
                        std::abs(best - res.epsilon_linear)) {
        best = r;
        found = true;
      }
    }
    if (!found) {
      std::ostringstream msg;
      msg << "no elevation root in [-H/2, H/2] = [" << lo << ", " << hi
          << "]; real roots of the combined relation:";
      for (double r : roots) msg << " " << r;
      if (roots.empty()) msg << " (none)";
      throw std::domain_error(msg.str());
    }
    eps = best;
  }

  res.epsilon_exact = eps;
  res.downstream_speed = (p.H + p.delta) * p.v1 / (p.H + eps);

  const double vd = res.downstream_speed;
  const double flux_in = (p.H + p.delta) * p.v1;
  res.continuity_residual =
      std::abs(flux_in - (p.H + eps) * vd) / std::abs(flux_in);
  const double head_scale =
      std::max({0.5 * v2, 0.5 * vd * vd, std::abs(p.g * eps)});
  res.energy_residual =
      head_scale == 0.0
          ? 0.0
          : std::abs(0.5 * v2 - 0.5 * vd * vd - p.g * eps) / head_scale;
  const double comb_scale = v2 * p.H * std::max(std::abs(p.delta), std::abs(eps));
  res.combined_residual =
      comb_scale == 0.0 ? 0.0
                        : std::abs(cubic_value(a, b, c, d, eps)) / comb_scale;
  return res;
}

}  // namespace hodgeflow
