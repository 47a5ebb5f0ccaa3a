#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hodgeflow/density.hpp"
#include "oracles.hpp"

using namespace hodgeflow;

namespace {

std::vector<DensityModel> bounded_models() {
  return {Polytropic{1.1}, Polytropic{1.4}, Polytropic{2.0}, Polytropic{3.0},
          Shallow{0.5},    Shallow{2.0},    Shallow{7.0}};
}

std::vector<DensityModel> unbounded_models() {
  return {LimitingExponential{}, Incompressible{},
          WithSurfaceTension{LimitingExponential{}, 0.5},
          WithSurfaceTension{Incompressible{}, 1.0}};
}

double sample_hi(const DensityModel& m) {
  const double sup = admissible_q_sup(m);
  return std::isfinite(sup) ? sup : 8.0;
}

}  // namespace

TEST_SUITE("density") {

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(validate_model(Polytropic{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_model(Polytropic{0.9}), std::invalid_argument);
  CHECK_THROWS_AS(validate_model(Shallow{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_model(Shallow{-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_model(WithSurfaceTension{Shallow{2.0}, -0.1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_model(WithSurfaceTension{Shallow{-2.0}, 0.1}),
                  std::invalid_argument);
  CHECK_NOTHROW(validate_model(Polytropic{1.0001}));
  CHECK_NOTHROW(validate_model(WithSurfaceTension{Polytropic{1.4}, 0.0}));
  CHECK_NOTHROW(validate_model(LimitingExponential{}));
  CHECK_NOTHROW(validate_model(Incompressible{}));
}

TEST_CASE("closed-form density values") {
  CHECK(rho(Polytropic{2.0}, 0.0) == 1.0);
  CHECK(rho(Polytropic{2.0}, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rho(Shallow{2.0}, 0.0) == 1.0);
  CHECK(rho(Shallow{2.0}, 1.0) == 0.5);
  CHECK(rho(LimitingExponential{}, 1.0) ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(rho(Incompressible{}, 123.0) == 1.0);
  // Capillary term adds mu / sqrt(1 + Q).
  CHECK(rho(WithSurfaceTension{Incompressible{}, 2.0}, 3.0) ==
        doctest::Approx(1.0 + 2.0 / 2.0).epsilon(1e-15));
}

TEST_CASE("admissible domain bounds and violations") {
  CHECK(admissible_q_sup(Polytropic{2.0}) == doctest::Approx(2.0));
  CHECK(admissible_q_sup(Polytropic{3.0}) == doctest::Approx(1.0));
  CHECK(admissible_q_sup(Shallow{7.0}) == doctest::Approx(7.0));
  CHECK(std::isinf(admissible_q_sup(LimitingExponential{})));
  CHECK(std::isinf(admissible_q_sup(Incompressible{})));

  CHECK_THROWS_AS(rho(Polytropic{2.0}, 2.0), std::domain_error);
  CHECK_THROWS_AS(rho(Shallow{2.0}, 2.0), std::domain_error);
  CHECK_THROWS_AS(rho(Shallow{2.0}, -0.1), std::domain_error);
  CHECK_THROWS_AS(variational_density(Polytropic{3.0}, 1.5),
                  std::domain_error);
  CHECK_THROWS_AS(mass_flux_derivative(Shallow{0.5}, 0.6), std::domain_error);
  CHECK_THROWS_AS(rho(Incompressible{}, std::nan("")), std::domain_error);
  // Just inside the bound is fine.
  CHECK(rho(Shallow{2.0}, std::nextafter(2.0, 0.0)) > 0.0);
}

TEST_CASE("variational density matches quadrature of rho") {
  auto models = bounded_models();
  auto unbounded = unbounded_models();
  models.insert(models.end(), unbounded.begin(), unbounded.end());
  models.push_back(WithSurfaceTension{Shallow{2.0}, 0.7});
  models.push_back(WithSurfaceTension{Polytropic{1.4}, 0.3});

  for (const auto& m : models) {
    const double hi = sample_hi(m);
    for (double q : oracles::q_samples(hi, 25, 1001)) {
      const double want = oracles::integrate_1d(
          [&](double s) { return rho(m, s); }, 0.0, q, 1e-13);
      const double got = variational_density(m, q);
      CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
    CHECK(variational_density(m, 0.0) == 0.0);
  }
}

TEST_CASE("rho_prime matches a central difference") {
  auto models = bounded_models();
  auto unbounded = unbounded_models();
  models.insert(models.end(), unbounded.begin(), unbounded.end());
  models.push_back(WithSurfaceTension{Shallow{2.0}, 0.7});

  for (const auto& m : models) {
    const double hi = sample_hi(m);
    for (double q : oracles::q_samples(hi, 40, 2002)) {
      const double h = std::min(1e-6, 0.25 * std::min(q, hi - q));
      if (h <= 0.0) continue;
      const double fd = oracles::central_diff(
          [&](double s) { return rho(m, s); }, q, h);
      const double an = rho_prime(m, q);
      CHECK(an == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("mass-flux derivative matches a central difference of Q rho^2") {
  auto models = bounded_models();
  auto unbounded = unbounded_models();
  models.insert(models.end(), unbounded.begin(), unbounded.end());
  models.push_back(WithSurfaceTension{Shallow{2.0}, 1.0});
  models.push_back(WithSurfaceTension{Polytropic{1.4}, 0.2});

  for (const auto& m : models) {
    const double hi = sample_hi(m);
    for (double q : oracles::q_samples(hi, 100, 3003)) {
      const double h = std::min(1e-6, 0.25 * std::min(q, hi - q));
      if (h <= 0.0) continue;
      const double fd = oracles::central_diff(
          [&](double s) {
            const double r = rho(m, s);
            return s * r * r;
          },
          q, h);
      const double an = mass_flux_derivative(m, q);
      // Relative where the value is O(1), absolute through the sonic zero.
      CHECK(an == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("critical speeds: closed forms") {
  for (double gamma : {1.1, 1.4, 2.0, 3.0}) {
    auto qc = q_crit(Polytropic{gamma});
    REQUIRE(qc.has_value());
    CHECK(*qc == doctest::Approx(2.0 / (gamma + 1.0)).epsilon(1e-12));
  }
  for (double c : {0.5, 2.0, 7.0}) {
    auto qc = q_crit(Shallow{c});
    REQUIRE(qc.has_value());
    CHECK(*qc == doctest::Approx(c / 3.0).epsilon(1e-12));
  }
  auto qe = q_crit(LimitingExponential{});
  REQUIRE(qe.has_value());
  CHECK(*qe == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_FALSE(q_crit(Incompressible{}).has_value());
}

TEST_CASE("critical speeds: bisection agrees with the closed forms") {
  for (const auto& m : bounded_models()) {
    auto closed = q_crit(m);
    auto searched = q_crit_by_bisection(m);
    REQUIRE(closed.has_value());
    REQUIRE(searched.has_value());
    CHECK(*searched == doctest::Approx(*closed).epsilon(1e-9));
    // The root really is a sign change of the flux derivative.
    CHECK(mass_flux_derivative(m, *closed * 0.99) > 0.0);
    CHECK(mass_flux_derivative(m, *closed * 1.01) < 0.0);
  }
  // Surface tension shifts the root; bisection must still find one for a
  // bounded base.
  auto st = q_crit(WithSurfaceTension{Shallow{2.0}, 0.5});
  REQUIRE(st.has_value());
  CHECK(std::abs(mass_flux_derivative(WithSurfaceTension{Shallow{2.0}, 0.5},
                                      *st)) < 1e-9);
}

TEST_CASE("cavitation speeds") {
  CHECK(*cavitation_speed(Polytropic{2.0}) == doctest::Approx(2.0));
  CHECK(*cavitation_speed(Polytropic{3.0}) == doctest::Approx(1.0));
  CHECK(*cavitation_speed(Shallow{7.0}) == doctest::Approx(7.0));
  CHECK_FALSE(cavitation_speed(LimitingExponential{}).has_value());
  CHECK_FALSE(cavitation_speed(Incompressible{}).has_value());

  // mu = 0 reduces to the base law.
  CHECK(*cavitation_speed(WithSurfaceTension{Shallow{2.0}, 0.0}) ==
        doctest::Approx(2.0));
  // mu > 0 postpones cavitation past the base zero, and the admissible
  // domain follows the total.
  const WithSurfaceTension st{Shallow{2.0}, 0.5};
  auto qc = cavitation_speed(st);
  REQUIRE(qc.has_value());
  CHECK(*qc > 2.0);
  CHECK(admissible_q_sup(st) == doctest::Approx(*qc));
  CHECK(rho(st, *qc * (1.0 - 1e-9)) > 0.0);
  CHECK(std::abs(rho(st, *qc * (1.0 - 1e-13))) < 1e-10);
  // Tension on a never-cavitating base still never cavitates.
  CHECK_FALSE(
      cavitation_speed(WithSurfaceTension{LimitingExponential{}, 0.5})
          .has_value());
}

TEST_CASE("froude numbers") {
  // Shallow: F^2 = Q / ((C - Q)/2); unity exactly at Q_crit = C/3.
  for (double c : {0.5, 2.0, 7.0}) {
    const Shallow m{c};
    for (double q : oracles::q_samples(c, 20, 4004)) {
      auto f = froude(m, q);
      REQUIRE(f.has_value());
      CHECK(*f == doctest::Approx(std::sqrt(2.0 * q / (c - q))).epsilon(1e-13));
    }
    CHECK(*froude(m, c / 3.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Polytropic: c^2 = 1 - (gamma-1) Q/2, unity at Q_crit.
  for (double gamma : {1.4, 2.0, 3.0}) {
    const Polytropic m{gamma};
    const double qc = 2.0 / (gamma + 1.0);
    CHECK(*froude(m, qc) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*froude(m, 0.5 * qc) < 1.0);
  }
  CHECK(*froude(Incompressible{}, 5.0) == 0.0);
  CHECK_FALSE(froude(LimitingExponential{}, 0.5).has_value());
  CHECK_FALSE(froude(WithSurfaceTension{Shallow{2.0}, 0.5}, 0.5).has_value());
}

TEST_CASE("regime classification and precedence") {
  const Shallow m{2.0};
  const double qc = 2.0 / 3.0;
  CHECK(classify(m, 0.1) == FlowRegime::Tranquil);
  CHECK(classify(m, 1.5) == FlowRegime::Shooting);
  // Sonic wins whenever |flux derivative| <= tol, even though the value is
  // fractionally positive or negative there.
  CHECK(classify(m, qc) == FlowRegime::Sonic);
  CHECK(classify(m, qc + 1e-12) == FlowRegime::Sonic);
  CHECK(classify(m, qc - 1e-12) == FlowRegime::Sonic);
  // A generous tolerance widens the sonic band.
  CHECK(classify(m, qc + 1e-3, 1e-2) == FlowRegime::Sonic);
  CHECK(classify(m, qc + 1e-3, 1e-12) == FlowRegime::Shooting);

  CHECK(classify(Incompressible{}, 100.0) == FlowRegime::Tranquil);
  CHECK(classify(LimitingExponential{}, 0.5) == FlowRegime::Tranquil);
  CHECK(classify(LimitingExponential{}, 2.0) == FlowRegime::Shooting);

  for (const auto& model : bounded_models()) {
    auto qcrit = q_crit(model);
    REQUIRE(qcrit.has_value());
    CHECK(classify(model, *qcrit) == FlowRegime::Sonic);
    CHECK(subsonic_check(model, 0.5 * *qcrit));
    CHECK_FALSE(subsonic_check(model, 1.5 * *qcrit));
  }

  CHECK(std::string(to_string(FlowRegime::Tranquil)) == "Tranquil");
  CHECK(std::string(to_string(FlowRegime::Sonic)) == "Sonic");
  CHECK(std::string(to_string(FlowRegime::Shooting)) == "Shooting");
}

TEST_CASE("shallow C=2 coincides with polytropic gamma=2") {
  const DensityModel s = Shallow{2.0};
  const DensityModel p = Polytropic{2.0};
  for (double q : oracles::q_samples(2.0, 60, 5005)) {
    CHECK(rho(s, q) == doctest::Approx(rho(p, q)).epsilon(1e-14));
    CHECK(variational_density(s, q) ==
          doctest::Approx(variational_density(p, q)).epsilon(1e-14));
    CHECK(rho_prime(s, q) == doctest::Approx(rho_prime(p, q)).epsilon(1e-14));
    CHECK(mass_flux_derivative(s, q) ==
          doctest::Approx(mass_flux_derivative(p, q))
              .epsilon(1e-13)
              .scale(1.0));
  }
  CHECK(*q_crit(s) == doctest::Approx(*q_crit(p)).epsilon(1e-14));
  CHECK(*cavitation_speed(s) == doctest::Approx(*cavitation_speed(p)));
}

TEST_CASE("polytropic family approaches the exponential law as gamma -> 1") {
  const DensityModel near{Polytropic{1.0 + 1e-6}};
  const DensityModel lim{LimitingExponential{}};
  for (double q : {0.1, 0.5, 1.0, 2.0, 3.5}) {
    CHECK(rho(near, q) == doctest::Approx(rho(lim, q)).epsilon(1e-5));
    CHECK(variational_density(near, q) ==
          doctest::Approx(variational_density(lim, q)).epsilon(1e-5));
  }
}

TEST_CASE("surface tension term semantics") {
  const double mu = 0.7;
  const DensityModel base = Shallow{2.0};
  const DensityModel st = WithSurfaceTension{Shallow{2.0}, mu};
  for (double q : oracles::q_samples(2.0, 30, 6006)) {
    CHECK(rho(st, q) ==
          doctest::Approx(rho(base, q) + mu / std::sqrt(1.0 + q))
              .epsilon(1e-14));
    // integral of the capillary term is 2 mu (sqrt(1+Q) - 1).
    CHECK(variational_density(st, q) ==
          doctest::Approx(variational_density(base, q) +
                          2.0 * mu * (std::sqrt(1.0 + q) - 1.0))
              .epsilon(1e-13));
  }
  // mu = 0 is exactly the base model.
  const DensityModel st0 = WithSurfaceTension{Shallow{2.0}, 0.0};
  for (double q : {0.3, 1.0, 1.9}) {
    CHECK(rho(st0, q) == rho(base, q));
    CHECK(variational_density(st0, q) == variational_density(base, q));
    CHECK(mass_flux_derivative(st0, q) == mass_flux_derivative(base, q));
  }
}

TEST_CASE("unchecked fast paths agree with checked evaluation") {
  for (const auto& m : bounded_models()) {
    const double hi = sample_hi(m);
    for (double q : oracles::q_samples(hi, 10, 7007)) {
      CHECK(rho_unchecked(m, q) == rho(m, q));
      CHECK(rho_prime_unchecked(m, q) == rho_prime(m, q));
      CHECK(variational_density_unchecked(m, q) == variational_density(m, q));
    }
  }
}

TEST_CASE("shallow channel depth") {
  CHECK(depth(Shallow{2.0}, 0.0, 9.8) == doctest::Approx(1.0 / 9.8));
  CHECK(depth(Shallow{2.0}, 2.0, 9.8) == 0.0);
  CHECK(depth(Shallow{7.0}, 1.0, 2.0) == doctest::Approx(6.0 / 4.0));
  CHECK_THROWS_AS(depth(Shallow{2.0}, 2.5, 9.8), std::domain_error);
  CHECK_THROWS_AS(depth(Shallow{2.0}, -0.5, 9.8), std::domain_error);
  CHECK_THROWS_AS(depth(Shallow{2.0}, 1.0, 0.0), std::invalid_argument);
}

}  // TEST_SUITE
