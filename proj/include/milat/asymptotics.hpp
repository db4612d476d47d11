#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "milat/model.hpp"
#include "milat/trig_series.hpp"

namespace milat {

/// Reduced-equation coefficients at a simple resonant mode k0:
/// delta_k, the off-kernel response d_k = h_k / delta_k, the real and
/// imaginary forcing parts and upsilon = 2 (1 - delta_{2 k0}) / delta_{2 k0}.
class BifCoefficients {
 public:
  BifCoefficients(const ModelParams& params, int k0);

  int k0() const { return k0_; }
  double gamma() const { return gamma_; }
  double omega() const { return omega_; }
  int h_k_max() const { return h_.k_max(); }

  double delta(int k) const { return symbol_.delta(k); }
  double mu(int k) const { return h_.coeff(k).real(); }
  double nu(int k) const { return h_.coeff(k).imag(); }
  /// d_k = h_k / delta_k for k outside {+-k0}; zero where h has no mass.
  std::complex<double> d(int k) const;
  double upsilon() const;

 private:
  int k0_;
  double gamma_, omega_;
  TrigSeries h_;
  KSymbol symbol_;
};

enum class Regime { CubeRoot, LinearResponse, OrderEps, SqrtPair };

const char* regime_name(Regime r);

/// Leading-order branch data: which scaling applies, the kernel-plane
/// point(s) (x0, y0) and the leading profile as a function of epsilon.
struct BranchPrediction {
  Regime regime = Regime::CubeRoot;
  int k0 = 0;
  std::vector<std::pair<double, double>> points;
  double scaling_exponent = 1.0;  // 1/3, 1 or 1/2
  /// Off-kernel first-order series (the d_k part); used by the
  /// order-eps profile and by Newton initial guesses.
  TrigSeries correction;

  /// Leading-order profile for the first listed point.
  TrigSeries profile(double eps) const;
  /// Leading-order profile for the i-th point.
  TrigSeries profile(double eps, size_t point_index) const;

  nlohmann::json to_json() const;
};

/// Discriminant controlling the square-root branch structure when the
/// kernel mode is unforced.
struct BranchDiscriminant {
  double value = 0.0;  // delta^2 (4 mu0^2 + g^2 w^2 k0^2) - 4 (mu_{2k0}^2 + nu_{2k0}^2)
  bool negative = false;        // value < 0
  bool small_positive = false;  // 0 < value < 4 mu0^2
};

BifCoefficients bif_coefficients(const ModelParams& params, int k0);

/// Left-hand sides of the two reduced bifurcation equations, truncated
/// after the written terms. The double sums run over the forcing's
/// support, which is exact for finite-mode forcings.
std::pair<double, double> bif_residual(const BifCoefficients& coeffs, double x, double y,
                                       double eps);

/// Regime selection and leading point(s). `h_scaled` declares that the
/// forcing enters as eps*h (the linear-response regime).
BranchPrediction predict(const ModelParams& params, int k0, bool h_scaled = false);

/// Square-root branch points (q y, y) for the given sign of unscaled eps.
/// Throws ComplexBranch when the slope discriminant is negative.
std::vector<std::pair<double, double>> sqrt_branches(const BifCoefficients& coeffs,
                                                    double gamma, double omega, int k0,
                                                    int sign_eps);

/// Square-root branches wrapped as a BranchPrediction (possibly with
/// zero points when no real branch exists for this sign of eps).
BranchPrediction predict_sqrt(const ModelParams& params, int k0, int sign_eps);

BranchDiscriminant branch_discriminant(const BifCoefficients& coeffs, double gamma,
                                       double omega, int k0);

/// Boundary values of |mu_0| (the forcing mean, mode 0) at which the
/// branch structure changes, keeping every other forcing coefficient
/// fixed: `lower` is where the discriminant crosses 0, `upper` is where
/// it crosses 4 mu0^2. A threshold is 0 when no real boundary exists.
struct Mu0Thresholds {
  double lower = 0.0;
  double upper = 0.0;
};

Mu0Thresholds mu0_thresholds(const BifCoefficients& coeffs, double gamma, double omega,
                             int k0);

/// Jacobian determinant of the reduced cubic system at (q y, y),
/// in tilde coordinates. Nonzero certifies branch nondegeneracy.
double branch_jacobian_det(const BifCoefficients& coeffs, double gamma, double omega,
                           int k0, int sign_eps, double q, double y);

}  // namespace milat
