#include <doctest.h>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hodgeflow/density.hpp"
#include "hodgeflow/grid.hpp"
#include "hodgeflow/solver.hpp"
#include "hodgeflow/sphere.hpp"
#include "oracles.hpp"

using namespace hodgeflow;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

const std::array<double, 3> kPole = {0.0, 0.0, 1.0};

// Discrete constant squared speed of the axis-0 unit wrap.
double wrap_q(const TorusGrid& g) {
  const int n = g.size(0);
  const double s = 2.0 * std::sin((kTau / 2.0) / n);
  const double h = g.spacing(0);
  return (s / h) * (s / h);
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("option validation") {
  CHECK_NOTHROW(validate_options(SolveOptions{}));
  SolveOptions bad;
  bad.max_iterations = 0;
  CHECK_THROWS_AS(validate_options(bad), std::invalid_argument);
  bad = SolveOptions{};
  bad.gradient_norm_tolerance = -1.0;
  CHECK_THROWS_AS(validate_options(bad), std::invalid_argument);
  bad = SolveOptions{};
  bad.initial_step = 0.0;
  CHECK_THROWS_AS(validate_options(bad), std::invalid_argument);
  bad = SolveOptions{};
  bad.backtracking_factor = 1.0;
  CHECK_THROWS_AS(validate_options(bad), std::invalid_argument);
  bad = SolveOptions{};
  bad.backtracking_factor = 0.0;
  CHECK_THROWS_AS(validate_options(bad), std::invalid_argument);
  bad = SolveOptions{};
  bad.sufficient_decrease = 1.5;
  CHECK_THROWS_AS(validate_options(bad), std::invalid_argument);
  bad = SolveOptions{};
  bad.q_max = 0.0;
  CHECK_THROWS_AS(validate_options(bad), std::invalid_argument);
}

TEST_CASE("constant maps carry zero energy and zero gradient") {
  TorusGrid g({16, 16}, {kTau, kTau});
  SphereMap u = constant_map(g, kPole);
  for (const DensityModel& m :
       {DensityModel{Incompressible{}}, DensityModel{Shallow{2.0}},
        DensityModel{Polytropic{1.4}}, DensityModel{LimitingExponential{}}}) {
    CHECK(energy(g, m, u) == 0.0);
    AmbientField grad = energy_gradient(g, m, u);
    for (double x : grad.v) CHECK(x == 0.0);
    CHECK(tangential_residual_norm(g, m, u) == 0.0);
  }
}

TEST_CASE("wrap energies approach the continuum values at second order") {
  // Unit-speed wrap on the 2pi x 2pi torus: continuum energy e(1) * (2pi)^2.
  struct Case {
    DensityModel model;
    double continuum;
  };
  const Case cases[] = {
      {Incompressible{}, kTau * kTau},             // e(1) = 1
      {Shallow{2.0}, 0.75 * kTau * kTau},          // e(1) = 3/4
  };
  for (const auto& cs : cases) {
    double err_prev = 0.0;
    for (int n : {64, 128}) {
      TorusGrid g({n, n}, {kTau, kTau});
      SphereMap u = circle_wrap(g, 3);
      const double e = energy(g, cs.model, u);
      // The discrete energy is exactly e(Q_disc) * volume.
      const double qd = wrap_q(g);
      const double want =
          variational_density(cs.model, qd) * g.total_volume();
      CHECK(e == doctest::Approx(want).epsilon(1e-12));
      const double err = std::abs(e - cs.continuum);
      if (n == 64) {
        err_prev = err;
      } else {
        CHECK(err_prev / err == doctest::Approx(4.0).epsilon(0.05));
      }
    }
  }
}

TEST_CASE("energy rejects maps that reach the admissible bound") {
  // One wrap winding on a coarse grid pushes Q near (N/pi)^2 sin^2(pi w/N);
  // with enough windings Q exceeds the shallow bound C = 2.
  TorusGrid g({8, 8}, {kTau, kTau});
  SphereMap u = circle_wrap(g, 3, 3);  // Q about 7.4
  CHECK_THROWS_AS(energy(g, Shallow{2.0}, u), std::domain_error);
  CHECK_NOTHROW(energy(g, Incompressible{}, u));
}

TEST_CASE("gradient matches central finite differences of the energy") {
  TorusGrid g({8, 8}, {kTau, kTau});
  const DensityModel models[] = {DensityModel{Incompressible{}},
                                 DensityModel{Shallow{2.0}},
                                 DensityModel{Polytropic{1.4}}};
  int pair_count = 0;
  for (const auto& m : models) {
    for (std::uint64_t s = 0; s < 17; ++s) {
      SphereMap u = random_perturbation_map(g, 3, kPole, 100 + s, 0.25);
      AmbientField w = oracles::random_tangent_field(g, u, 200 + s);
      AmbientField grad = energy_gradient(g, m, u);
      const double analytic = inner(g, grad, w);
      const double t = 1e-5;
      const double fd = (energy(g, m, oracles::displace(u, w, t)) -
                         energy(g, m, oracles::displace(u, w, -t))) /
                        (2.0 * t);
      CHECK(std::abs(analytic - fd) / (1.0 + std::abs(analytic)) < 1e-6);
      ++pair_count;
    }
  }
  CHECK(pair_count >= 50);
}

TEST_CASE("tangential residual is half the projected gradient") {
  // codifferential(rho du) is the gradient up to the factor 2 and the
  // tangential part of rho Q u vanishes against u, so the two norms are tied.
  TorusGrid g({12, 12}, {kTau, kTau});
  for (std::uint64_t s : {0u, 1u, 2u}) {
    SphereMap u = random_perturbation_map(g, 3, kPole, 300 + s, 0.3);
    const DensityModel m = Shallow{2.0};
    const double rn = tangential_residual_norm(g, m, u);
    AmbientField grad = energy_gradient(g, m, u);
    const double gn = l2_norm(g, grad);
    CHECK(rn == doctest::Approx(0.5 * gn).epsilon(1e-10));
  }
}

TEST_CASE("minimize accepts a constant map immediately") {
  TorusGrid g({16, 16}, {kTau, kTau});
  SphereMap u0 = constant_map(g, kPole);
  auto [u, report] = minimize(g, Shallow{2.0}, u0, SolveOptions{});
  CHECK(report.converged);
  CHECK(report.iterations == 0);
  CHECK(report.termination == "gradient_tolerance");
  CHECK(report.final_energy == 0.0);
  CHECK(report.max_q == 0.0);
  CHECK(report.min_rho == doctest::Approx(1.0));
  CHECK(report.regimes.tranquil == g.cells());
  CHECK(report.regimes.sonic == 0);
  CHECK(report.regimes.shooting == 0);
  CHECK(u.f.v == u0.f.v);
}

TEST_CASE("minimize drives random perturbations back to a point") {
  TorusGrid g({16, 16}, {kTau, kTau});
  for (std::uint64_t s : {7u, 8u}) {
    SphereMap u0 = random_perturbation_map(g, 3, kPole, s, 0.2);
    const DensityModel m = Shallow{2.0};
    const double e0 = energy(g, m, u0);
    auto [u, report] = minimize(g, m, u0, SolveOptions{});
    CHECK(report.converged);
    CHECK(report.termination == "gradient_tolerance");
    CHECK(report.gradient_norm <= 1e-8);
    CHECK(report.final_energy <= e0);
    CHECK(report.final_energy < 1e-12);
    CHECK(report.max_q < 1e-10);
    // Residual at a critical point obeys the report bound.
    CHECK(report.residual_norm <= 10.0 * 1e-8);
    CHECK_NOTHROW(u.validate());
  }
}

TEST_CASE("minimize stalls on the exactly critical wrap") {
  // The sampled great-circle wrap is a discrete critical point to rounding,
  // so descent accepts it as converged without moving.
  TorusGrid g({32, 32}, {kTau, kTau});
  SphereMap u0 = circle_wrap(g, 3);
  auto [u, report] = minimize(g, Incompressible{}, u0, SolveOptions{});
  CHECK(report.converged);
  CHECK(report.iterations == 0);
  CHECK(report.gradient_norm < 1e-10);
  CHECK(report.max_q == doctest::Approx(wrap_q(g)).epsilon(1e-12));
  CHECK(u.f.v == u0.f.v);
}

TEST_CASE("step underflow is reported, not thrown") {
  // Zero tolerance can never be met; on the critical wrap every step fails
  // the Armijo test and the step size collapses.
  TorusGrid g({16, 16}, {kTau, kTau});
  SphereMap u0 = circle_wrap(g, 3);
  SolveOptions opts;
  opts.gradient_norm_tolerance = 0.0;
  opts.max_iterations = 1000;
  auto [u, report] = minimize(g, Incompressible{}, u0, opts);
  CHECK_FALSE(report.converged);
  CHECK(report.termination == "step_underflow");
}

TEST_CASE("iteration cap is reported, not thrown") {
  TorusGrid g({16, 16}, {kTau, kTau});
  SphereMap u0 = random_perturbation_map(g, 3, kPole, 11, 0.2);
  SolveOptions opts;
  opts.max_iterations = 3;
  auto [u, report] = minimize(g, Shallow{2.0}, u0, opts);
  CHECK_FALSE(report.converged);
  CHECK(report.termination == "max_iterations");
  CHECK(report.iterations == 3);
  // Monotone descent even when cut short.
  CHECK(report.final_energy <= energy(g, Shallow{2.0}, u0));
}

TEST_CASE("speed guard rejects inadmissible starts and bounds the run") {
  TorusGrid g({8, 8}, {kTau, kTau});
  SphereMap wrap3 = circle_wrap(g, 3, 3);  // Q about 7.4
  CHECK_THROWS_AS(minimize(g, Shallow{2.0}, wrap3, SolveOptions{}),
                  std::domain_error);

  // An explicit q_max below the admissible bound is respected throughout.
  SphereMap u0 = random_perturbation_map(g, 3, kPole, 21, 0.15);
  SolveOptions opts;
  opts.q_max = 0.5;
  auto [u, report] = minimize(g, Shallow{2.0}, u0, opts);
  CHECK(report.converged);
  CHECK(report.max_q < 0.5);

  // And a q_max the start already violates is a domain error.
  SolveOptions tight;
  tight.q_max = 1e-9;
  CHECK_THROWS_AS(minimize(g, Shallow{2.0}, u0, tight), std::domain_error);
}

TEST_CASE("shallow C=2 and polytropic gamma=2 agree along whole solves") {
  TorusGrid g({12, 12}, {kTau, kTau});
  for (std::uint64_t s : {31u, 32u, 33u}) {
    SphereMap u = random_perturbation_map(g, 3, kPole, s, 0.25);
    const DensityModel ms = Shallow{2.0};
    const DensityModel mp = Polytropic{2.0};
    const double es = energy(g, ms, u);
    const double ep = energy(g, mp, u);
    CHECK(std::abs(es - ep) <= 1e-14 * std::max(1.0, std::abs(es)));
    const double rs = tangential_residual_norm(g, ms, u);
    const double rp = tangential_residual_norm(g, mp, u);
    CHECK(std::abs(rs - rp) <= 1e-13 * std::max(1.0, rs));
  }
}

TEST_CASE("regime partition covers every cell exactly once") {
  TorusGrid g({16, 16}, {kTau, kTau});

  SphereMap flat = constant_map(g, kPole);
  auto [regs_flat, counts_flat] = regime_map(g, Shallow{2.0}, flat);
  CHECK(int(regs_flat.size()) == g.cells());
  CHECK(counts_flat.tranquil == g.cells());
  CHECK(counts_flat.sonic + counts_flat.shooting == 0);

  // Unit wrap at Q about 1 > Q_crit = 2/3: every cell shoots.
  SphereMap wrap = circle_wrap(g, 3);
  auto [regs, counts] = regime_map(g, Shallow{2.0}, wrap);
  CHECK(counts.shooting == g.cells());
  CHECK(counts.tranquil + counts.sonic + counts.shooting == g.cells());
  for (auto r : regs) CHECK(r == FlowRegime::Shooting);

  // A huge sonic tolerance reclassifies everything as sonic.
  auto [regs_s, counts_s] = regime_map(g, Shallow{2.0}, wrap, 1e9);
  CHECK(counts_s.sonic == g.cells());
  for (auto r : regs_s) CHECK(r == FlowRegime::Sonic);
}

TEST_CASE("euler-lagrange residual of the wrap is radial") {
  // codiff(rho du) lands along u for the wrap, so the tangential part is
  // rounding noise while the full field is order Q.
  TorusGrid g({32, 32}, {kTau, kTau});
  SphereMap u = circle_wrap(g, 3);
  const DensityModel m = Shallow{2.0};
  AmbientField r = euler_lagrange_residual(g, m, u);
  double full = l2_norm(g, r);
  CHECK(full > 1e-2);
  CHECK(tangential_residual_norm(g, m, u) < 1e-11);
}

}  // TEST_SUITE
