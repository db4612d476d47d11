#include "milat/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "milat/errors.hpp"

namespace milat {

namespace {

void require_simple_resonance(const ModelParams& params, int k0) {
  ResonanceReport rr = resonance_scan(params, std::abs(k0) + 4);
  bool listed = std::find(rr.resonant_modes.begin(), rr.resonant_modes.end(), k0) !=
                rr.resonant_modes.end();
  if (!listed || !rr.simple)
    throw NotSimpleResonance("mode k0=" + std::to_string(k0) +
                             " is not a simple resonant mode of the instance");
  if (!rr.no_cosine_degeneracy)
    throw NotSimpleResonance("degenerate cosine set: 0 lies in 2*lambda*M2 - 1");
}

struct TildeCoeffs {
  double a, b, c, d, upsilon;
};

TildeCoeffs tilde_coeffs(const BifCoefficients& coeffs, double gamma, double omega, int k0,
                         int sign_eps) {
  double s = sign_eps >= 0 ? 1.0 : -1.0;
  double d2 = coeffs.delta(2 * k0);
  double mu0 = coeffs.mu(0);
  double mu2 = coeffs.mu(2 * k0);
  double nu2 = coeffs.nu(2 * k0);
  double gwk = gamma * omega * k0;
  double ups = coeffs.upsilon();
  TildeCoeffs t;
  t.a = s * 2.0 * (mu2 / d2 + mu0) / ups;
  t.b = s * (2.0 * nu2 / d2 + gwk) / ups;
  t.c = s * (2.0 * nu2 / d2 - gwk) / ups;
  t.d = s * 2.0 * (-mu2 / d2 + mu0) / ups;
  t.upsilon = ups;
  return t;
}

/// Real series from the off-kernel response sum_{k != +-k0} d_k e^{ikz}.
TrigSeries correction_series(const BifCoefficients& coeffs) {
  TrigSeries out(coeffs.h_k_max());
  for (int k = 0; k <= coeffs.h_k_max(); ++k) {
    if (k == std::abs(coeffs.k0())) continue;
    out.set_coeff(k, coeffs.d(k));
  }
  return out;
}

TrigSeries kernel_mode(int k0, double x, double y) {
  // c e^{i k0 z} + conj = 2x cos(k0 z) - 2y sin(k0 z) for c = x + iy.
  TrigSeries out(std::abs(k0));
  out.set_coeff(k0, {x, y});
  return out;
}

}  // namespace

BifCoefficients::BifCoefficients(const ModelParams& params, int k0)
    : k0_(k0), gamma_(params.gamma), omega_(params.omega), h_(params.h),
      symbol_(params) {
  if (k0 == 0) throw InvalidArgument("BifCoefficients: k0 must be nonzero");
}

std::complex<double> BifCoefficients::d(int k) const {
  if (k == k0_ || k == -k0_) return {0.0, 0.0};
  std::complex<double> hk = h_.coeff(k);
  if (hk == std::complex<double>{0.0, 0.0}) return {0.0, 0.0};
  double dk = symbol_.delta(k);
  if (std::abs(dk) < 1e-14)
    throw SingularSymbol("BifCoefficients::d: delta_k vanishes at k=" + std::to_string(k));
  return hk / dk;
}

double BifCoefficients::upsilon() const {
  double d2 = symbol_.delta(2 * k0_);
  if (std::abs(d2 - 1.0) < 1e-14)
    throw InvalidArgument("BifCoefficients::upsilon: delta_{2k0} = 1 (upsilon undefined)");
  return 2.0 * (1.0 - d2) / d2;
}

BifCoefficients bif_coefficients(const ModelParams& params, int k0) {
  require_simple_resonance(params, k0);
  return BifCoefficients(params, k0);
}

std::pair<double, double> bif_residual(const BifCoefficients& coeffs, double x, double y,
                                       double eps) {
  int k0 = coeffs.k0();
  double d2 = coeffs.delta(2 * k0);
  double mu0 = coeffs.mu(0);
  double mu2 = coeffs.mu(2 * k0), nu2 = coeffs.nu(2 * k0);
  double muk = coeffs.mu(k0), nuk = coeffs.nu(k0);
  double gwk = coeffs.gamma() * coeffs.omega() * k0;
  double cube = 2.0 * (1.0 - d2) / d2 * (x * x + y * y);

  // Quadratic-in-forcing sums over k outside {0, +-k0, 2k0}; only modes
  // where both h_k and h_{k-k0} carry mass contribute.
  double s1 = 0.0, s2 = 0.0;
  int K = coeffs.h_k_max() + std::abs(k0);
  for (int k = -K; k <= K; ++k) {
    if (k == 0 || k == k0 || k == -k0 || k == 2 * k0) continue;
    double mk = coeffs.mu(k), nk = coeffs.nu(k);
    double mj = coeffs.mu(k - k0), nj = coeffs.nu(k - k0);
    if ((mk == 0.0 && nk == 0.0) || (mj == 0.0 && nj == 0.0)) continue;
    double denom = coeffs.delta(k) * coeffs.delta(k - k0);
    double w = static_cast<double>(k0) * (k - k0) / denom;
    s1 += w * (mk * mj + nk * nj);
    s2 += w * (mj * nk - mk * nj);
  }
  double sum_factor = 2.0 * eps * eps / (static_cast<double>(k0) * k0);

  double r1 = 2.0 * (mu2 / d2 + mu0) * eps * x + (2.0 * nu2 / d2 + gwk) * eps * y +
              muk * eps + cube * x - sum_factor * s1;
  double r2 = (2.0 * nu2 / d2 - gwk) * eps * x + 2.0 * (-mu2 / d2 + mu0) * eps * y +
              nuk * eps + cube * y - sum_factor * s2;
  return {r1, r2};
}

BranchPrediction predict(const ModelParams& params, int k0, bool h_scaled) {
  require_simple_resonance(params, k0);
  BifCoefficients coeffs(params, k0);
  double muk = coeffs.mu(k0), nuk = coeffs.nu(k0);
  double g = params.gamma, w = params.omega;

  BranchPrediction pred;
  pred.k0 = k0;
  pred.correction = correction_series(coeffs);

  if (muk != 0.0 || nuk != 0.0) {
    if (h_scaled) {
      if (g == 0.0)
        throw InvalidArgument("predict: linear-response regime needs gamma != 0");
      pred.regime = Regime::LinearResponse;
      pred.scaling_exponent = 1.0;
      double gwk = g * w * k0;
      pred.points.emplace_back(nuk / gwk, -muk / gwk);
      // The off-kernel response enters only at the next order here.
      pred.correction = TrigSeries::zero(0);
      return pred;
    }
    pred.regime = Regime::CubeRoot;
    pred.scaling_exponent = 1.0 / 3.0;
    double d2 = coeffs.delta(2 * k0);
    double amp = -std::cbrt(d2 / (2.0 * (1.0 - d2) * (muk * muk + nuk * nuk)));
    pred.points.emplace_back(amp * muk, amp * nuk);
    return pred;
  }

  // Kernel modes unforced: order-eps solution from the linearized system.
  BranchDiscriminant th = branch_discriminant(coeffs, g, w, k0);
  double d2 = coeffs.delta(2 * k0);
  if (std::abs(th.value / (d2 * d2)) < 1e-12)
    throw DegenerateLinearPart("predict: linear part of the reduced system is singular");

  double mu0 = coeffs.mu(0);
  double mu2 = coeffs.mu(2 * k0), nu2 = coeffs.nu(2 * k0);
  double gwk = g * w * k0;
  double a11 = 2.0 * (mu2 / d2 + mu0), a12 = 2.0 * nu2 / d2 + gwk;
  double a21 = 2.0 * nu2 / d2 - gwk, a22 = 2.0 * (-mu2 / d2 + mu0);
  std::pair<double, double> rhs = [&] {
    // Same sums as in bif_residual, packaged as the eps^2 right-hand side.
    double s1 = 0.0, s2 = 0.0;
    int K = coeffs.h_k_max() + std::abs(k0);
    for (int k = -K; k <= K; ++k) {
      if (k == 0 || k == k0 || k == -k0 || k == 2 * k0) continue;
      double mk = coeffs.mu(k), nk = coeffs.nu(k);
      double mj = coeffs.mu(k - k0), nj = coeffs.nu(k - k0);
      if ((mk == 0.0 && nk == 0.0) || (mj == 0.0 && nj == 0.0)) continue;
      double wgt = static_cast<double>(k0) * (k - k0) / (coeffs.delta(k) * coeffs.delta(k - k0));
      s1 += wgt * (mk * mj + nk * nj);
      s2 += wgt * (mj * nk - mk * nj);
    }
    double f = 2.0 / (static_cast<double>(k0) * k0);
    return std::make_pair(f * s1, f * s2);
  }();
  double det = a11 * a22 - a12 * a21;
  double xp = (rhs.first * a22 - rhs.second * a12) / det;
  double yp = (a11 * rhs.second - a21 * rhs.first) / det;

  pred.regime = Regime::OrderEps;
  pred.scaling_exponent = 1.0;
  pred.points.emplace_back(xp, yp);
  return pred;
}

std::vector<std::pair<double, double>> sqrt_branches(const BifCoefficients& coeffs,
                                                    double gamma, double omega, int k0,
                                                    int sign_eps) {
  double muk = coeffs.mu(k0), nuk = coeffs.nu(k0);
  if (muk != 0.0 || nuk != 0.0)
    throw InvalidArgument("sqrt_branches: requires (mu_k0, nu_k0) = (0, 0)");
  TildeCoeffs t = tilde_coeffs(coeffs, gamma, omega, k0, sign_eps);
  double disc = (t.a - t.d) * (t.a - t.d) + 4.0 * t.b * t.c;
  if (disc < 0.0)
    throw ComplexBranch("sqrt_branches: negative slope discriminant");
  if (std::abs(t.c) < 1e-300)
    throw InvalidArgument("sqrt_branches: c coefficient vanishes, slope undefined");
  double root = std::sqrt(disc);
  std::vector<std::pair<double, double>> points;
  for (double q : {(t.a - t.d + root) / (2.0 * t.c), (t.a - t.d - root) / (2.0 * t.c)}) {
    double val = t.c * q + t.d;
    if (val >= 0.0) continue;  // no real amplitude on this slope
    double y = std::sqrt(-val / (1.0 + q * q));
    points.emplace_back(q * y, y);
    points.emplace_back(-q * y, -y);
  }
  return points;
}

BranchPrediction predict_sqrt(const ModelParams& params, int k0, int sign_eps) {
  require_simple_resonance(params, k0);
  BifCoefficients coeffs(params, k0);
  BranchPrediction pred;
  pred.regime = Regime::SqrtPair;
  pred.k0 = k0;
  pred.scaling_exponent = 0.5;
  pred.points = sqrt_branches(coeffs, params.gamma, params.omega, k0, sign_eps);
  pred.correction = correction_series(coeffs);
  return pred;
}

BranchDiscriminant branch_discriminant(const BifCoefficients& coeffs, double gamma, double omega,
                             int k0) {
  double d2 = coeffs.delta(2 * k0);
  double mu0 = coeffs.mu(0);
  double mu2 = coeffs.mu(2 * k0), nu2 = coeffs.nu(2 * k0);
  BranchDiscriminant th;
  th.value = d2 * d2 * (4.0 * mu0 * mu0 + gamma * gamma * omega * omega * k0 * k0) -
                  4.0 * (mu2 * mu2 + nu2 * nu2);
  th.negative = th.value < 0.0;
  th.small_positive = th.value > 0.0 && th.value < 4.0 * mu0 * mu0;
  return th;
}

Mu0Thresholds mu0_thresholds(const BifCoefficients& coeffs, double gamma, double omega,
                             int k0) {
  double d2 = coeffs.delta(2 * k0);
  double mu2 = coeffs.mu(2 * k0), nu2 = coeffs.nu(2 * k0);
  double gwk2 = gamma * gamma * omega * omega * k0 * k0;
  double h2 = 4.0 * (mu2 * mu2 + nu2 * nu2);
  Mu0Thresholds th;
  double s1 = h2 / (d2 * d2) - gwk2;
  if (s1 > 0.0) th.lower = 0.5 * std::sqrt(s1);
  double denom = 4.0 * (d2 * d2 - 1.0);
  double s2 = (h2 - d2 * d2 * gwk2) / denom;
  if (s2 > 0.0) th.upper = std::sqrt(s2);
  return th;
}

double branch_jacobian_det(const BifCoefficients& coeffs, double gamma, double omega, int k0,
                       int sign_eps, double q, double y) {
  TildeCoeffs t = tilde_coeffs(coeffs, gamma, omega, k0, sign_eps);
  double y2 = y * y;
  double one_q2 = 1.0 + q * q;
  return -t.b * t.c + t.a * t.d +
         (3.0 * t.a + t.d + q * (-2.0 * (t.b + t.c) + (t.a + 3.0 * t.d) * q)) * y2 +
         3.0 * one_q2 * one_q2 * y2 * y2;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::CubeRoot: return "cube-root";
    case Regime::LinearResponse: return "linear-response";
    case Regime::OrderEps: return "order-eps";
    case Regime::SqrtPair: return "sqrt";
  }
  return "unknown";
}

TrigSeries BranchPrediction::profile(double eps) const { return profile(eps, 0); }

TrigSeries BranchPrediction::profile(double eps, size_t point_index) const {
  if (point_index >= points.size())
    throw InvalidArgument("BranchPrediction::profile: no such branch point");
  auto [x0, y0] = points[point_index];
  switch (regime) {
    case Regime::CubeRoot:
      return std::cbrt(eps) * kernel_mode(k0, x0, y0) + eps * correction;
    case Regime::LinearResponse:
      return eps * kernel_mode(k0, x0, y0);
    case Regime::OrderEps:
      return eps * (kernel_mode(k0, x0, y0) + correction);
    case Regime::SqrtPair:
      return std::sqrt(std::abs(eps)) * kernel_mode(k0, x0, y0) + eps * correction;
  }
  throw InvalidArgument("BranchPrediction::profile: unknown regime");
}

nlohmann::json BranchPrediction::to_json() const {
  nlohmann::json j;
  j["regime"] = regime_name(regime);
  j["k0"] = k0;
  j["scaling_exponent"] = scaling_exponent;
  nlohmann::json pts = nlohmann::json::array();
  for (auto& [x, y] : points) pts.push_back({x, y});
  j["points"] = pts;
  j["correction"] = correction.to_json();
  return j;
}

}  // namespace milat
