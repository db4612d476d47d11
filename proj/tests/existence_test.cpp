#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "milat/errors.hpp"
#include "milat/existence.hpp"
#include "milat/model.hpp"
#include "milat/trig_series.hpp"

using namespace milat;

namespace {

ModelParams nonresonant_instance() {
  ModelParams params;
  params.gamma = 0.15;
  params.lambda = 0.3;
  params.omega = 0.8;
  params.p = PhaseIncrement::from_rational(1, 3);
  return params;
}

ModelParams resonant_instance(double gamma) {
  ModelParams params;
  params.gamma = gamma;
  params.lambda = 12.0 / (37.0 * std::sqrt(2.0));
  params.omega = std::sqrt(37.0) / 5.0;
  params.p = PhaseIncrement::from_rational(1, 4);
  return params;
}

double w_constant(const ModelParams& p) {
  return 8.0 * p.omega * (2.0 * p.omega + 4.0 * p.lambda * p.omega + p.gamma);
}

TrigSeries random_series(std::mt19937& rng, int k_max, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  TrigSeries s(k_max);
  s.set_coeff(0, {u(rng), 0.0});
  for (int k = 1; k <= k_max; ++k) s.set_coeff(k, {u(rng), u(rng)});
  return s;
}

ModelParams random_admissible_instance(std::mt19937& rng, double load = 0.3) {
  std::uniform_real_distribution<double> ul(0.1, 0.45), uw(0.4, 1.8), ug(0.05, 0.3);
  const std::vector<std::pair<long, long>> phases = {{1, 4}, {1, 6}, {2, 5}, {1, 3}};
  std::uniform_int_distribution<size_t> up(0, phases.size() - 1);
  for (;;) {
    ModelParams params;
    params.lambda = ul(rng);
    params.omega = uw(rng);
    params.gamma = ug(rng);
    auto [num, den] = phases[up(rng)];
    params.p = PhaseIncrement::from_rational(num, den);
    if (!resonance_scan(params).resonant_modes.empty()) continue;
    double bound = certify(params).bound_H;
    if (bound <= 0.0) continue;
    TrigSeries shape = random_series(rng, 3, 1.0);
    if (shape.norm(0) == 0.0) continue;
    params.h = shape * (load * bound / shape.norm(0));
    return params;
  }
}

}  // namespace

TEST_CASE("certificate matches the closed-form bound") {
  ModelParams params = nonresonant_instance();
  params.h = TrigSeries::cosine(1, 1e-4);  // ||h|| = 1e-4
  ExistenceCertificate cert = certify(params);
  double W = w_constant(params);
  double th = theta(params).value;
  CHECK(cert.theta == doctest::Approx(th).epsilon(1e-14));
  CHECK(cert.bound_H == doctest::Approx(th * th / W).epsilon(1e-14));
  REQUIRE(cert.admissible);
  double norm_h = params.h.norm(0);
  double rho = (th - std::sqrt(th * th - W * norm_h)) / (0.5 * W);
  CHECK(cert.rho_h == doctest::Approx(rho).epsilon(1e-12));
  CHECK(cert.contraction_constant == doctest::Approx(0.5 * W * rho / th).epsilon(1e-12));
  CHECK(cert.contraction_constant < 1.0);
  // rho_h solves Theta*rho - (W/4)*rho^2 = ||h|| (the smaller root).
  CHECK(th * rho - 0.25 * W * rho * rho == doctest::Approx(norm_h).epsilon(1e-12));
}

TEST_CASE("inadmissible cases carry a reason") {
  ModelParams params = nonresonant_instance();

  ExistenceCertificate zero = certify(params);  // h = 0
  CHECK(!zero.admissible);
  CHECK(!zero.reason.empty());

  params.h = TrigSeries::cosine(1, 100.0);
  ExistenceCertificate big = certify(params);
  CHECK(!big.admissible);
  CHECK(!big.reason.empty());
  CHECK_THROWS_AS(solve_contraction(params), NotAdmissible);

  ModelParams res = resonant_instance(0.0);  // Theta = 0
  res.h = TrigSeries::cosine(1, 1e-6);
  ExistenceCertificate r = certify(res);
  CHECK(!r.admissible);
  CHECK(r.theta == doctest::Approx(0.0));
}

TEST_CASE("contraction solve: small forcing") {
  ModelParams params = nonresonant_instance();
  params.h = TrigSeries::cosine(1, 1e-3) + TrigSeries::sine(2, 5e-4);
  ExistenceCertificate cert = certify(params);
  REQUIRE(cert.admissible);

  ContractionResult result = solve_contraction(params);
  CHECK(result.residual <= 1e-10);
  CHECK(result.U.norm(2) <= cert.rho_h * (1.0 + 1e-12));
  CHECK(result.observed_rate <= cert.contraction_constant + 0.05);

  // At leading order the solution is the linear response K^{-1} h.
  TrigSeries linear = invert_K(params, params.h);
  double norm_h = params.h.norm(0);
  CHECK((result.U - linear).norm(0) <= 50.0 * norm_h * norm_h);
}

TEST_CASE("bypassing admissibility at h = 0 yields the zero wave") {
  ModelParams params = nonresonant_instance();
  ContractionOptions opts;
  opts.bypass_admissibility = true;
  ContractionResult result = solve_contraction(params, opts);
  CHECK(result.U.norm(0) == doctest::Approx(0.0));
  CHECK(result.residual == doctest::Approx(0.0));
}

TEST_CASE("nonlinearity bounds on random inputs") {
  std::mt19937 rng(90210);
  ModelParams params = nonresonant_instance();
  double C = 2.0 * params.omega *
             (2.0 * params.omega + 4.0 * params.lambda * params.omega + params.gamma);
  for (int trial = 0; trial < 40; ++trial) {
    params.h = random_series(rng, 3, 0.5);
    TrigSeries U1 = random_series(rng, 5, 0.7);
    TrigSeries U2 = random_series(rng, 5, 0.7);
    // ||F(U, h)|| <= C ||U||_2^2 + ||h||.
    CHECK(apply_F(params, U1).norm(0) <=
          C * U1.norm(2) * U1.norm(2) + params.h.norm(0) + 1e-12);
    // ||F(U1, h) - F(U2, h)|| <= C ||U1 - U2||_2 (||U1||_2 + ||U2||_2).
    CHECK((apply_F(params, U1) - apply_F(params, U2)).norm(0) <=
          C * (U1 - U2).norm(2) * (U1.norm(2) + U2.norm(2)) + 1e-12);
    // Forcing enters additively: ||F(U, h1) - F(U, h2)|| = ||h1 - h2||.
    ModelParams params2 = params.with_h(random_series(rng, 3, 0.5));
    CHECK((apply_F(params, U1) - apply_F(params2, U1)).norm(0) <=
          (params.h - params2.h).norm(0) + 1e-12);
  }
}

TEST_CASE("random admissible instances converge inside the certified ball") {
  std::mt19937 rng(112358);
  for (int trial = 0; trial < 10; ++trial) {
    ModelParams params = random_admissible_instance(rng);
    ExistenceCertificate cert = certify(params);
    REQUIRE(cert.admissible);
    ContractionResult result = solve_contraction(params);
    CHECK(result.residual <= 1e-10);
    CHECK(result.U.norm(2) <= cert.rho_h * (1.0 + 1e-10));
    CHECK(result.observed_rate <= cert.contraction_constant + 0.05);
  }
}

TEST_CASE("the fixed point is unique in the ball: random starts coincide") {
  std::mt19937 rng(5150);
  ModelParams params = random_admissible_instance(rng, 0.4);
  ExistenceCertificate cert = certify(params);
  REQUIRE(cert.admissible);
  ContractionResult reference = solve_contraction(params);
  for (int trial = 0; trial < 10; ++trial) {
    TrigSeries start = random_series(rng, 4, 1.0);
    double n2 = start.norm(2);
    if (n2 > 0.0) start = start * (0.9 * cert.rho_h / n2);  // inside B(rho_h)
    ContractionOptions opts;
    opts.start = &start;
    ContractionResult probe = solve_contraction(params, opts);
    CHECK((probe.U - reference.U).norm(2) <= 1e-9);
  }
}

TEST_CASE("solutions are Lipschitz in the forcing") {
  std::mt19937 rng(246810);
  ModelParams base = random_admissible_instance(rng, 0.25);
  for (int trial = 0; trial < 8; ++trial) {
    std::uniform_real_distribution<double> u(0.5, 1.0);
    ModelParams p1 = base.with_h(base.h * u(rng));
    ModelParams p2 = base.with_h(base.h * u(rng));
    TrigSeries U1 = solve_contraction(p1).U;
    TrigSeries U2 = solve_contraction(p2).U;
    LipschitzReport report = lipschitz_check(p1, p2, U1, U2);
    CHECK(report.holds);
    CHECK(report.lhs <= report.rhs + 1e-12);
  }
}
