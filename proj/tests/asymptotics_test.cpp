#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "milat/asymptotics.hpp"
#include "milat/errors.hpp"
#include "milat/model.hpp"
#include "milat/trig_series.hpp"

using namespace milat;

namespace {

// The worked instance: lambda = 12/(37 sqrt 2), omega = sqrt(37)/5,
// p = pi/4. Mode k0 = +-1 is the unique resonance; delta_2 = -123/25.
ModelParams base_instance(double gamma) {
  ModelParams params;
  params.gamma = gamma;
  params.lambda = 12.0 / (37.0 * std::sqrt(2.0));
  params.omega = std::sqrt(37.0) / 5.0;
  params.p = PhaseIncrement::from_rational(1, 4);
  return params;
}

// Forcing with unforced kernel mode: mu0 + 2 cos 2z - 2 sin 2z.
TrigSeries mean_plus_second(double mu0) {
  return TrigSeries::constant(mu0) + TrigSeries::cosine(2, 2.0) + TrigSeries::sine(2, -2.0);
}

}  // namespace

TEST_CASE("reduced coefficients at the worked instance") {
  ModelParams params = base_instance(0.0);
  params.h = TrigSeries::cosine(1, 1.0);
  BifCoefficients coeffs = bif_coefficients(params, 1);
  CHECK(coeffs.delta(1) == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(coeffs.delta(2) == doctest::Approx(-123.0 / 25.0).epsilon(1e-13));
  CHECK(coeffs.upsilon() == doctest::Approx(-296.0 / 123.0).epsilon(1e-13));
  CHECK(coeffs.mu(1) == doctest::Approx(0.5));
  CHECK(coeffs.nu(1) == doctest::Approx(0.0));
  // d_k vanishes on the kernel pair and where h carries no mass.
  CHECK(coeffs.d(1) == std::complex<double>{0.0, 0.0});
  CHECK(coeffs.d(3) == std::complex<double>{0.0, 0.0});
}

TEST_CASE("coefficient construction rejects non-simple or non-resonant modes") {
  ModelParams params = base_instance(0.0);
  params.h = TrigSeries::cosine(1, 1.0);
  CHECK_THROWS_AS(bif_coefficients(params, 3), NotSimpleResonance);

  ModelParams dbl = params;
  dbl.omega = std::sqrt(37.0) / 35.0;  // resonant modes {+-5, +-7}
  CHECK_THROWS_AS(bif_coefficients(dbl, 5), NotSimpleResonance);
}

TEST_CASE("cube-root regime: forced kernel mode, zero loss") {
  ModelParams params = base_instance(0.0);
  params.h = TrigSeries::cosine(1, 1.0);
  BranchPrediction pred = predict(params, 1);
  CHECK(pred.regime == Regime::CubeRoot);
  CHECK(pred.scaling_exponent == doctest::Approx(1.0 / 3.0));
  REQUIRE(pred.points.size() == 1);
  // x0 = cbrt(123/74)/2, y0 = 0.
  double x0 = 0.5 * std::cbrt(123.0 / 74.0);
  CHECK(pred.points[0].first == doctest::Approx(x0).epsilon(1e-12));
  CHECK(pred.points[0].second == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(2.0 * x0 == doctest::Approx(1.18456).epsilon(1e-5));

  // The point zeroes the reduced equations to rounding for every eps.
  BifCoefficients coeffs(params, 1);
  for (double eps : {1e-4, 1e-6, 1e-8}) {
    double s = std::cbrt(eps);
    auto [r1, r2] = bif_residual(coeffs, x0 * s, 0.0, eps);
    CHECK(std::abs(r1) <= 1e-18);
    CHECK(std::abs(r2) <= 1e-18);
  }

  // Single-mode forcing has no off-kernel correction.
  CHECK(pred.correction.norm(0) == doctest::Approx(0.0));
  TrigSeries prof = pred.profile(1e-6);
  CHECK(2.0 * prof.coeff(1).real() == doctest::Approx(2.0 * x0 * std::cbrt(1e-6)).epsilon(1e-12));
}

TEST_CASE("linear-response regime: scaled forcing with loss") {
  ModelParams params = base_instance(0.1);
  params.h = TrigSeries::cosine(1, 1.0);
  BranchPrediction pred = predict(params, 1, /*h_scaled=*/true);
  CHECK(pred.regime == Regime::LinearResponse);
  CHECK(pred.scaling_exponent == doctest::Approx(1.0));
  REQUIRE(pred.points.size() == 1);
  CHECK(pred.points[0].first == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(pred.points[0].second == doctest::Approx(-25.0 / std::sqrt(37.0)).epsilon(1e-12));
  // Leading profile (50 eps / sqrt 37) sin z, amplitude ~ 8.21995 eps.
  double eps = 1e-3;
  TrigSeries prof = pred.profile(eps);
  double sin_amp = -2.0 * prof.coeff(1).imag();
  CHECK(sin_amp == doctest::Approx(8.21995 * eps).epsilon(1e-5));

  ModelParams lossless = base_instance(0.0);
  lossless.h = params.h;
  CHECK_THROWS_AS(predict(lossless, 1, true), InvalidArgument);
}

TEST_CASE("order-eps regime: unforced kernel mode") {
  ModelParams params = base_instance(0.1);
  params.h = mean_plus_second(0.25);
  BranchPrediction pred = predict(params, 1);
  CHECK(pred.regime == Regime::OrderEps);
  REQUIRE(pred.points.size() == 1);
  // Both quadratic forcing sums vanish for support {0, +-2}.
  CHECK(pred.points[0].first == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(pred.points[0].second == doctest::Approx(0.0).epsilon(1e-14));
  // Off-kernel response: d_0 = mu0, d_2 = (1 + i) / delta_2 = -(25/123)(1 + i).
  CHECK(pred.correction.coeff(0).real() == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(pred.correction.coeff(2).real() == doctest::Approx(-25.0 / 123.0).epsilon(1e-13));
  CHECK(pred.correction.coeff(2).imag() == doctest::Approx(-25.0 / 123.0).epsilon(1e-13));
}

TEST_CASE("square-root branches of the unforced-kernel instance") {
  ModelParams params = base_instance(0.1);
  params.h = mean_plus_second(0.25);
  BifCoefficients coeffs = bif_coefficients(params, 1);

  SUBCASE("positive eps") {
    auto pts = sqrt_branches(coeffs, params.gamma, params.omega, 1, +1);
    REQUIRE(pts.size() == 2);  // one real slope, a +- pair
    double y = std::max(pts[0].second, pts[1].second);
    double x = pts[0].second > 0 ? pts[0].first : pts[1].first;
    double q = x / y;
    CHECK(q == doctest::Approx(-0.294153).epsilon(1e-4));
    CHECK(y * y == doctest::Approx(0.406108).epsilon(1e-4));
    CHECK(pts[0].first == doctest::Approx(-pts[1].first));
    CHECK(pts[0].second == doctest::Approx(-pts[1].second));
    CHECK(branch_jacobian_det(coeffs, params.gamma, params.omega, 1, +1, q, y) > 0.0);

    // The scaled point zeroes the reduced equations through order eps^{3/2}.
    for (double eps : {1e-4, 1e-6}) {
      double s = std::sqrt(eps);
      auto [r1, r2] = bif_residual(coeffs, q * y * s, y * s, eps);
      CHECK(std::abs(r1) <= 1e-12 * eps);
      CHECK(std::abs(r2) <= 1e-12 * eps);
    }
  }

  SUBCASE("negative eps") {
    auto pts = sqrt_branches(coeffs, params.gamma, params.omega, 1, -1);
    REQUIRE(pts.size() == 2);
    double y = std::max(pts[0].second, pts[1].second);
    double x = pts[0].second > 0 ? pts[0].first : pts[1].first;
    double q = x / y;
    CHECK(q == doctest::Approx(1.83348).epsilon(1e-4));
    CHECK(y * y == doctest::Approx(0.0535297 - 0.190543 * 0.25).epsilon(1e-3));
    CHECK(branch_jacobian_det(coeffs, params.gamma, params.omega, 1, -1, q, y) > 0.0);
  }

  SUBCASE("forced kernel mode is rejected") {
    ModelParams forced = params.with_h(TrigSeries::cosine(1, 1.0));
    BifCoefficients fc = bif_coefficients(forced, 1);
    CHECK_THROWS_AS(sqrt_branches(fc, forced.gamma, forced.omega, 1, +1), InvalidArgument);
  }
}

TEST_CASE("square-root branch wrapper") {
  ModelParams params = base_instance(0.1);
  params.h = mean_plus_second(0.25);
  BranchPrediction pred = predict_sqrt(params, 1, +1);
  CHECK(pred.regime == Regime::SqrtPair);
  CHECK(pred.scaling_exponent == doctest::Approx(0.5));
  CHECK(pred.points.size() == 2);
  double eps = 1e-4;
  TrigSeries prof = pred.profile(eps, 0);
  // cos z coefficient scales with sqrt(eps); the correction enters at eps.
  double expected = std::sqrt(eps) * pred.points[0].first;
  CHECK(prof.coeff(1).real() == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("regime thresholds in the forcing mean") {
  ModelParams params = base_instance(0.1);

  // The discriminant changes sign at mu0 ~ 0.280932 and crosses 4 mu0^2 at ~ 0.286921.
  params.h = mean_plus_second(0.25);
  BifCoefficients coeffs = bif_coefficients(params, 1);
  Mu0Thresholds th = mu0_thresholds(coeffs, params.gamma, params.omega, 1);
  CHECK(th.lower == doctest::Approx(0.280932).epsilon(5e-7));
  CHECK(th.upper == doctest::Approx(0.286921).epsilon(5e-7));

  // Bracketing mu0 by the thresholds flips the condition flags.
  auto conds = [&](double mu0) {
    ModelParams p = params.with_h(mean_plus_second(mu0));
    BifCoefficients c = bif_coefficients(p, 1);
    return branch_discriminant(c, p.gamma, p.omega, 1);
  };
  CHECK(conds(0.25).negative);
  CHECK(!conds(0.25).small_positive);
  CHECK(conds(0.284).small_positive);
  CHECK(!conds(0.284).negative);
  CHECK(!conds(0.30).negative);
  CHECK(!conds(0.30).small_positive);
}

TEST_CASE("branch degeneracies are reported") {
  ModelParams params = base_instance(0.1);
  // Pure mean forcing: the slope discriminant is -(g w k0)^2 / upsilon^2 < 0.
  params.h = TrigSeries::constant(0.25);
  BifCoefficients coeffs = bif_coefficients(params, 1);
  CHECK_THROWS_AS(sqrt_branches(coeffs, params.gamma, params.omega, 1, +1), ComplexBranch);
}
