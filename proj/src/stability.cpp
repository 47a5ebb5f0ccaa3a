#include "hodgeflow/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "hodgeflow/util.hpp"

namespace hodgeflow {

namespace {

constexpr double kMinProbeStep = 1e-10;
constexpr double kTangencyTol = 1e-8;
constexpr double kSkipBasisNorm = 1e-12;
// Stability verdicts mean something only near critical points: warn beyond
// 100x the default solver gradient tolerance.
constexpr double kNearCriticalNorm = 100.0 * 1e-8;
constexpr double kNontrivialQ = 1e-6;  // theorem_experiment constancy cut

void check_probe_shape(const SphereMap& u, const AmbientField& v) {
  if (v.cells != u.f.cells || v.ambient != u.f.ambient)
    throw std::invalid_argument("probe field shape does not match the map");
}

void check_tangential(const SphereMap& u, const AmbientField& v) {
  const int m = u.ambient();
  for (int c = 0; c < v.cells; ++c) {
    const double* uc = u.f.v.data() + std::size_t(c) * m;
    const double* vc = v.v.data() + std::size_t(c) * m;
    double dot = 0.0, norm2 = 0.0;
    for (int k = 0; k < m; ++k) {
      dot += uc[k] * vc[k];
      norm2 += vc[k] * vc[k];
    }
    if (std::abs(dot) > kTangencyTol * std::max(1.0, std::sqrt(norm2))) {
      std::ostringstream msg;
      msg << "probe is not tangential at cell " << c << " (defect " << dot << ")";
      throw std::invalid_argument(msg.str());
    }
  }
}

// E(project(u + a V + b W)); nullptr w means b unused.
double displaced_energy(const TorusGrid& g, const DensityModel& model,
                        const SphereMap& u, const AmbientField& v, double a,
                        const AmbientField* w, double b, SphereMap& scratch) {
  const int m = u.ambient();
  for (int c = 0; c < u.f.cells; ++c) {
    const std::size_t off = std::size_t(c) * m;
    double* sc = scratch.f.v.data() + off;
    const double* uc = u.f.v.data() + off;
    const double* vc = v.v.data() + off;
    if (w) {
      // a*v + b*w first: addition is commutative, so swapping (V,a) with
      // (W,b) reproduces the same bits and the mixed stencil is exactly
      // symmetric.
      const double* wc = w->v.data() + off;
      for (int k = 0; k < m; ++k) sc[k] = uc[k] + (a * vc[k] + b * wc[k]);
    } else {
      for (int k = 0; k < m; ++k) sc[k] = uc[k] + a * vc[k];
    }
    project_in_place({sc, std::size_t(m)});
  }
  return energy(g, model, scratch);
}

bool try_displaced_energy(const TorusGrid& g, const DensityModel& model,
                          const SphereMap& u, const AmbientField& v, double a,
                          const AmbientField* w, double b, SphereMap& scratch,
                          double& out) {
  try {
    out = displaced_energy(g, model, u, v, a, w, b, scratch);
    return true;
  } catch (const std::domain_error&) {
    return false;
  }
}

}  // namespace

double second_variation_fd(const TorusGrid& g, const DensityModel& model,
                           const SphereMap& u, const AmbientField& v,
                           double t_step) {
  check_probe_shape(u, v);
  check_tangential(u, v);
  if (!(t_step > 0.0)) throw std::invalid_argument("t_step must be positive");

  SphereMap scratch = u;
  // Baseline through the same displace-project-evaluate path as the stencil
  // points: the projection rounding then cancels in the second difference,
  // and a zero probe yields exactly zero.
  const double e0 = displaced_energy(g, model, u, v, 0.0, nullptr, 0.0, scratch);

  double t = t_step;
  while (t >= kMinProbeStep) {
    double ep, em, ep2, em2;
    const double h = t / 2.0;
    if (try_displaced_energy(g, model, u, v, t, nullptr, 0.0, scratch, ep) &&
        try_displaced_energy(g, model, u, v, -t, nullptr, 0.0, scratch, em) &&
        try_displaced_energy(g, model, u, v, h, nullptr, 0.0, scratch, ep2) &&
        try_displaced_energy(g, model, u, v, -h, nullptr, 0.0, scratch, em2)) {
      const double d_t = (ep - 2.0 * e0 + em) / (t * t);
      const double d_h = (ep2 - 2.0 * e0 + em2) / (h * h);
      return (4.0 * d_h - d_t) / 3.0;
    }
    t *= 0.5;
  }
  throw std::domain_error(
      "could not probe the second variation: every step size down to 1e-10 "
      "left the admissible region");
}

double second_variation_mixed(const TorusGrid& g, const DensityModel& model,
                              const SphereMap& u, const AmbientField& v,
                              const AmbientField& w, double t_step) {
  check_probe_shape(u, v);
  check_probe_shape(u, w);
  check_tangential(u, v);
  check_tangential(u, w);
  if (!(t_step > 0.0)) throw std::invalid_argument("t_step must be positive");

  SphereMap scratch = u;
  double t = t_step;
  while (t >= kMinProbeStep) {
    double epp, epm, emp, emm;
    if (try_displaced_energy(g, model, u, v, t, &w, t, scratch, epp) &&
        try_displaced_energy(g, model, u, v, t, &w, -t, scratch, epm) &&
        try_displaced_energy(g, model, u, v, -t, &w, t, scratch, emp) &&
        try_displaced_energy(g, model, u, v, -t, &w, -t, scratch, emm)) {
      return (epp - epm - emp + emm) / (4.0 * t * t);
    }
    t *= 0.5;
  }
  throw std::domain_error(
      "could not probe the mixed second variation: every step size down to "
      "1e-10 left the admissible region");
}

double instability_integrand(const DensityModel& model, double q, int sphere_m) {
  if (sphere_m < 1)
    throw std::invalid_argument("target sphere dimension must be at least 1");
  const double r = rho(model, q);
  const double rp = rho_prime(model, q);
  return q * (q * rp + (2.0 - sphere_m) * r);
}

double instability_index(const TorusGrid& g, const DensityModel& model,
                         const SphereMap& u) {
  const OneForm du = differential(g, u.f);
  const std::vector<double> q = q_field(g, du);
  const int m = u.m();
  std::vector<double> cellwise(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    cellwise[i] = instability_integrand(model, q[i], m);
  return integrate(g, cellwise);
}

StabilityReport stability_probe(const TorusGrid& g, const DensityModel& model,
                                const SphereMap& u, const StabilityOptions& opts) {
  if (opts.probes < 0) throw std::invalid_argument("probes must be nonnegative");
  if (opts.smoothing_passes < 0)
    throw std::invalid_argument("smoothing_passes must be nonnegative");
  if (!(opts.negative_tol >= 0.0))
    throw std::invalid_argument("negative_tol must be nonnegative");
  u.validate();

  StabilityReport rep;
  rep.seed = opts.seed;
  const int ambient = u.ambient();
  const int cells = g.cells();

  {
    const OneForm du = differential(g, u.f);
    const std::vector<double> q = q_field(g, du);
    double mq = 0.0;
    for (double x : q) mq = std::max(mq, x);
    rep.max_q = mq;
  }
  rep.gradient_norm = l2_norm(g, energy_gradient(g, model, u));
  rep.near_critical = rep.gradient_norm <= kNearCriticalNorm;
  rep.index_value = instability_index(g, model, u);

  if (rep.max_q <= opts.trivial_q_tol) {
    rep.verdict = "Trivial-map";
    return rep;
  }

  // Assemble all probe directions first, then evaluate in parallel.
  std::vector<AmbientField> dirs;
  std::vector<ProbeRecord> records;

  for (int axis = 0; axis < ambient; ++axis) {
    AmbientField dir(cells, ambient);
    for (int c = 0; c < cells; ++c) dir.v[std::size_t(c) * ambient + axis] = 1.0;
    tangent_project_field_in_place(u, dir);
    const double n = l2_norm(g, dir);
    if (n <= kSkipBasisNorm * std::sqrt(g.total_volume())) continue;
    for (double& x : dir.v) x /= n;
    dirs.push_back(std::move(dir));
    records.push_back({"basis", axis, 0.0});
  }

  for (int p = 0; p < opts.probes; ++p) {
    GaussianRng rng(mix_seed(opts.seed, std::uint64_t(p) + 1));
    AmbientField dir(cells, ambient);
    for (double& x : dir.v) x = rng.next();
    tangent_project_field_in_place(u, dir);
    for (int s = 0; s < opts.smoothing_passes; ++s) dir = smooth_once(g, dir);
    tangent_project_field_in_place(u, dir);
    const double n = l2_norm(g, dir);
    if (n <= kSkipBasisNorm) continue;  // smoothing cannot kill a Gaussian field
    for (double& x : dir.v) x /= n;
    dirs.push_back(std::move(dir));
    records.push_back({"random", p, 0.0});
  }

  std::vector<double> values(dirs.size(), 0.0);
  parallel_for_indices(int(dirs.size()), [&](int i) {
    values[std::size_t(i)] =
        second_variation_fd(g, model, u, dirs[std::size_t(i)], opts.t_step);
  });

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].value = values[i];
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
  }
  rep.probe_values = std::move(records);
  if (rep.probe_values.empty()) lo = hi = 0.0;
  rep.min_value = lo;
  rep.max_value = hi;
  rep.verdict = (lo < -opts.negative_tol) ? "Unstable" : "Stable-up-to-probes";
  if (opts.keep_probe_fields) rep.probe_fields = std::move(dirs);
  return rep;
}

TheoremExperimentResult theorem_experiment(const TorusGrid& g,
                                           const DensityModel& model,
                                           SphereMap u0,
                                           const TheoremExperimentConfig& cfg) {
  if (cfg.target_m < 2)
    throw std::invalid_argument("target sphere dimension must be at least 2");
  if (u0.ambient() != cfg.target_m + 1)
    throw std::invalid_argument(
        "initial map has the wrong number of components for the target sphere");

  TheoremExperimentResult res;

  SphereMap u = std::move(u0);
  if (cfg.minimize_first) {
    auto [crit, rep] = minimize(g, model, std::move(u), cfg.solve_options);
    u = std::move(crit);
    res.solve_report = std::move(rep);
    if (!res.solve_report.converged) {
      res.verdict = "inconclusive";
      res.detail = "the descent run did not reach a critical point (" +
                   res.solve_report.termination + ")";
      return res;
    }
  } else {
    res.solve_report.converged = true;
    res.solve_report.termination = "gradient_tolerance";
    res.solve_report.final_energy = energy(g, model, u);
    res.solve_report.gradient_norm = l2_norm(g, energy_gradient(g, model, u));
    res.solve_report.residual_norm = tangential_residual_norm(g, model, u);
  }

  res.stability_report = stability_probe(g, model, u, cfg.probe_options);
  res.trivial = res.stability_report.max_q <= kNontrivialQ;

  std::ostringstream d;
  if (res.trivial) {
    // A constant critical point must show no descent direction.
    if (res.stability_report.verdict != "Unstable") {
      res.verdict = "pass";
      d << "the critical point is constant (max Q = " << res.stability_report.max_q
        << ") and no probe found a descent direction";
    } else {
      res.verdict = "fail";
      d << "a probe of the constant critical point went below the descent "
           "threshold (min value " << res.stability_report.min_value << ")";
    }
  } else {
    // A non-constant critical point must be a saddle.
    if (res.stability_report.verdict == "Unstable") {
      res.verdict = "pass";
      d << "the non-constant critical point has a descent direction "
           "(min probe value " << res.stability_report.min_value << ")";
    } else {
      res.verdict = "fail";
      d << "no probe of the non-constant critical point went below the descent "
           "threshold (min value " << res.stability_report.min_value << ")";
    }
  }
  res.detail = d.str();
  return res;
}

}  // namespace hodgeflow
