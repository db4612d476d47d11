#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "milat/trig_series.hpp"

namespace milat {

/// Spatial phase increment p, with optional recognition of p = p1*pi/p2.
/// The rational form is what makes the exact Theta machinery available.
struct PhaseIncrement {
  double value = 0.0;
  bool rational = false;
  long num = 0;  // p1, may be negative
  long den = 1;  // p2 > 0, coprime with p1

  static PhaseIncrement from_rational(long num, long den);
  /// Continued-fraction recognition of p/pi (denominator cap 1e6, tol 1e-12).
  static PhaseIncrement from_value(double p);
};

/// The complete problem instance: loss gamma, coupling lambda, drive
/// frequency omega, phase increment p and the forcing series h.
struct ModelParams {
  double gamma = 0.0;
  double lambda = 0.5;
  double omega = 1.0;
  PhaseIncrement p;
  TrigSeries h;

  /// Throws InvalidArgument on gamma < 0, lambda <= 0, omega <= 0, p == 0
  /// or a non-real forcing.
  void validate() const;

  ModelParams with_h(TrigSeries new_h) const;
  ModelParams with_gamma(double new_gamma) const;

  nlohmann::json to_json() const;
  static ModelParams from_json(const nlohmann::json& j);
};

/// Diagonal symbol of the linear operator: the k-th Fourier mode is
/// multiplied by sigma_k = 1 - w^2 k^2 + 2 l w^2 k^2 cos(kp) + i g w k.
/// delta_k is the gamma = 0 real part.
class KSymbol {
 public:
  explicit KSymbol(const ModelParams& params);

  std::complex<double> sigma(int k) const;
  double delta(int k) const;

 private:
  double gamma_, lambda_, omega_, p_;
};

/// Case tags for the Theta lower bound (closed-form certified cases vs a
/// plain truncated scan).
enum class ThetaCase { GenericScan, Theta1, Theta2, Theta3 };

struct ThetaResult {
  double value = 0.0;
  ThetaCase bound_case = ThetaCase::GenericScan;
  /// False when p/pi was not recognized as rational: the value is a
  /// truncated scan only and the true infimum could be smaller.
  bool certified = false;
};

struct ResonanceReport {
  bool rational = false;
  std::vector<double> M2;          // attainable cosine values cos(k pi / p2)
  bool no_cosine_degeneracy = false;   // 0 not in 2*lambda*M2 - 1
  std::vector<int> resonant_modes; // every k0 with w^2 k0^2 (1-2l cos k0 p) = 1
  std::vector<double> defects;     // residual of the identity per listed mode
  bool simple = false;             // exactly one +- pair
};

/// Coefficientwise application of the diagonal operator.
TrigSeries apply_K(const ModelParams& params, const TrigSeries& U);

/// Coefficientwise division by sigma_k. Throws SingularSymbol if any
/// |sigma_k| < 1e-14 on the working range.
TrigSeries invert_K(const ModelParams& params, const TrigSeries& f);

/// Nonlinear right-hand side
///   F(U,h) = -w^2[(U^2)'' - l (U^2)''(.-p) - l (U^2)''(.+p)] - g w (U^2)' + h.
TrigSeries apply_F(const ModelParams& params, const TrigSeries& U);

/// Infimum over k != 0 (capped at 1) of the scaled modulus |sigma_k|/k^2,
/// which bounds ||K^{-1}|| from the summable into the twice-weighted
/// space. Exact per cosine class when p is in pi*Q; a truncated scan
/// otherwise.
ThetaResult theta(const ModelParams& params);

/// Enumerates resonant modes up to max(k_limit, analytic cutoff) and
/// checks the non-degeneracy conditions.
ResonanceReport resonance_scan(const ModelParams& params, int k_limit = 64);

nlohmann::json to_json(const ResonanceReport& r);
nlohmann::json to_json(const ThetaResult& t);

}  // namespace milat
