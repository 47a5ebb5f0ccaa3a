#include "hodgeflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hodgeflow/util.hpp"

namespace hodgeflow {

namespace {

constexpr double kStepUnderflow = 1e-16;

double admissible_guard(const DensityModel& model, const SolveOptions& opts) {
  double guard = admissible_q_sup(model);
  if (opts.q_max) guard = std::min(guard, *opts.q_max);
  return guard;
}

// max Q over cells, or +inf short-circuit is unnecessary: caller compares.
double max_q_of(const std::vector<double>& q) {
  double m = 0.0;
  for (double v : q) m = std::max(m, v);
  return m;
}

// e(Q) summed with compensation; assumes every q is admissible.
double energy_from_q(const TorusGrid& g, const DensityModel& model,
                     const std::vector<double>& q) {
  CompensatedSum sum;
  for (double v : q) sum.add(variational_density_unchecked(model, v));
  return sum.value() * g.volume_element();
}

// rho(Q) du, weighting each axis component of the one-form cellwise.
void scale_by_density(const DensityModel& model, const std::vector<double>& q,
                      const OneForm& du, OneForm& out) {
  const int m = du.ambient;
  const int dim = du.dim;
  out.cells = du.cells;
  out.dim = dim;
  out.ambient = m;
  out.v.resize(du.v.size());
  for (long c = 0; c < du.cells; ++c) {
    const double r = rho_unchecked(model, q[static_cast<std::size_t>(c)]);
    const double* src = du.v.data() + static_cast<std::size_t>(c) * dim * m;
    double* dst = out.v.data() + static_cast<std::size_t>(c) * dim * m;
    for (int k = 0; k < dim * m; ++k) dst[k] = r * src[k];
  }
}

void check_admissible_field(const DensityModel& model, const std::vector<double>& q) {
  const double sup = admissible_q_sup(model);
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!(q[i] < sup)) {
      std::ostringstream msg;
      msg << "cell " << i << " has Q = " << q[i]
          << " at or beyond the admissible bound " << sup;
      throw std::domain_error(msg.str());
    }
  }
}

}  // namespace

void validate_options(const SolveOptions& opts) {
  if (opts.max_iterations < 1)
    throw std::invalid_argument("max_iterations must be at least 1");
  if (!(opts.gradient_norm_tolerance >= 0.0))
    throw std::invalid_argument("gradient_norm_tolerance must be nonnegative");
  if (!(opts.initial_step > 0.0))
    throw std::invalid_argument("initial_step must be positive");
  if (!(opts.backtracking_factor > 0.0 && opts.backtracking_factor < 1.0))
    throw std::invalid_argument("backtracking_factor must lie in (0, 1)");
  if (!(opts.sufficient_decrease > 0.0 && opts.sufficient_decrease < 1.0))
    throw std::invalid_argument("sufficient_decrease must lie in (0, 1)");
  if (opts.q_max && !(*opts.q_max > 0.0))
    throw std::invalid_argument("q_max must be positive when given");
}

double energy(const TorusGrid& g, const DensityModel& model, const SphereMap& u) {
  const OneForm du = differential(g, u.f);
  const std::vector<double> q = q_field(g, du);
  check_admissible_field(model, q);
  return energy_from_q(g, model, q);
}

AmbientField euler_lagrange_residual(const TorusGrid& g, const DensityModel& model,
                                     const SphereMap& u) {
  const OneForm du = differential(g, u.f);
  const std::vector<double> q = q_field(g, du);
  check_admissible_field(model, q);

  OneForm weighted;
  scale_by_density(model, q, du, weighted);
  AmbientField r = codifferential(g, weighted);

  // Subtract rho(Q) A(du,du) = rho(Q) (-Q u): residual = delta(rho du) + rho Q u.
  const int m = u.ambient();
  for (long c = 0; c < r.cells; ++c) {
    const double rq = rho_unchecked(model, q[static_cast<std::size_t>(c)]) *
                      q[static_cast<std::size_t>(c)];
    const double* uc = u.f.v.data() + static_cast<std::size_t>(c) * m;
    double* rc = r.v.data() + static_cast<std::size_t>(c) * m;
    for (int k = 0; k < m; ++k) rc[k] += rq * uc[k];
  }
  return r;
}

double tangential_residual_norm(const TorusGrid& g, const DensityModel& model,
                                const SphereMap& u) {
  AmbientField r = euler_lagrange_residual(g, model, u);
  tangent_project_field_in_place(u, r);
  return l2_norm(g, r);
}

AmbientField energy_gradient(const TorusGrid& g, const DensityModel& model,
                             const SphereMap& u) {
  const OneForm du = differential(g, u.f);
  const std::vector<double> q = q_field(g, du);
  check_admissible_field(model, q);

  OneForm weighted;
  scale_by_density(model, q, du, weighted);
  AmbientField grad = codifferential(g, weighted);
  for (double& x : grad.v) x *= 2.0;
  tangent_project_field_in_place(u, grad);
  return grad;
}

std::pair<SphereMap, CriticalPointReport> minimize(const TorusGrid& g,
                                                   const DensityModel& model,
                                                   SphereMap u0,
                                                   const SolveOptions& opts) {
  validate_options(opts);
  validate_model(model);
  u0.validate();
  const double guard = admissible_guard(model, opts);

  SphereMap u = std::move(u0);
  const int m = u.ambient();
  const long cells = g.cells();

  // Workspaces reused across iterations.
  OneForm du = differential(g, u.f);
  std::vector<double> q = q_field(g, du);
  if (!(max_q_of(q) < guard)) {
    std::ostringstream msg;
    msg << "initial map has max Q = " << max_q_of(q)
        << ", not below the speed guard " << guard;
    throw std::domain_error(msg.str());
  }
  OneForm weighted;
  SphereMap trial = u;

  double e_cur = energy_from_q(g, model, q);

  auto gradient_at = [&](const SphereMap& w, const std::vector<double>& qw) {
    OneForm dw = differential(g, w.f);
    scale_by_density(model, qw, dw, weighted);
    AmbientField grad = codifferential(g, weighted);
    for (double& x : grad.v) x *= 2.0;
    tangent_project_field_in_place(w, grad);
    return grad;
  };

  AmbientField grad = gradient_at(u, q);
  double gnorm = l2_norm(g, grad);

  CriticalPointReport rep;
  rep.termination = "max_iterations";
  double step = opts.initial_step;

  for (long it = 0; it < opts.max_iterations; ++it) {
    if (gnorm <= opts.gradient_norm_tolerance) {
      rep.converged = true;
      rep.termination = "gradient_tolerance";
      break;
    }

    // inner(grad, grad) in the vol-weighted product drives the Armijo test.
    const double g2 = gnorm * gnorm;
    bool accepted = false;
    while (step >= kStepUnderflow) {
      // trial = project(u - step * grad), cellwise.
      for (long c = 0; c < cells; ++c) {
        const double* uc = u.f.v.data() + static_cast<std::size_t>(c) * m;
        const double* gc = grad.v.data() + static_cast<std::size_t>(c) * m;
        double* tc = trial.f.v.data() + static_cast<std::size_t>(c) * m;
        for (int k = 0; k < m; ++k) tc[k] = uc[k] - step * gc[k];
        project_in_place({tc, static_cast<std::size_t>(m)});
      }
      OneForm dt = differential(g, trial.f);
      std::vector<double> qt = q_field(g, dt);
      if (max_q_of(qt) < guard) {
        const double e_trial = energy_from_q(g, model, qt);
        if (e_trial <= e_cur - opts.sufficient_decrease * step * g2) {
          u.f.v.swap(trial.f.v);
          q.swap(qt);
          e_cur = e_trial;
          accepted = true;
          break;
        }
      }
      step *= opts.backtracking_factor;
    }
    if (!accepted) {
      rep.termination = "step_underflow";
      break;
    }
    rep.iterations = it + 1;
    grad = gradient_at(u, q);
    gnorm = l2_norm(g, grad);
    step *= 2.0;  // cheap trust-region style warm start for the next line search
  }
  if (!rep.converged && rep.termination == "max_iterations" &&
      gnorm <= opts.gradient_norm_tolerance) {
    // Tolerance met exactly on the final allowed iteration.
    rep.converged = true;
    rep.termination = "gradient_tolerance";
  }

  rep.final_energy = e_cur;
  rep.gradient_norm = gnorm;
  rep.residual_norm = tangential_residual_norm(g, model, u);
  rep.max_q = max_q_of(q);
  double min_rho = std::numeric_limits<double>::infinity();
  RegimeCounts counts;
  for (double v : q) {
    min_rho = std::min(min_rho, rho_unchecked(model, v));
    switch (classify(model, v)) {
      case FlowRegime::Tranquil: ++counts.tranquil; break;
      case FlowRegime::Sonic: ++counts.sonic; break;
      case FlowRegime::Shooting: ++counts.shooting; break;
    }
  }
  rep.min_rho = min_rho;
  rep.regimes = counts;
  return {std::move(u), std::move(rep)};
}

std::pair<std::vector<FlowRegime>, RegimeCounts> regime_map(
    const TorusGrid& g, const DensityModel& model, const SphereMap& u,
    double sonic_tol) {
  const OneForm du = differential(g, u.f);
  const std::vector<double> q = q_field(g, du);
  check_admissible_field(model, q);
  std::vector<FlowRegime> out(q.size());
  RegimeCounts counts;
  for (std::size_t i = 0; i < q.size(); ++i) {
    out[i] = classify(model, q[i], sonic_tol);
    switch (out[i]) {
      case FlowRegime::Tranquil: ++counts.tranquil; break;
      case FlowRegime::Sonic: ++counts.sonic; break;
      case FlowRegime::Shooting: ++counts.shooting; break;
    }
  }
  return {std::move(out), counts};
}

}  // namespace hodgeflow
