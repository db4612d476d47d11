#pragma once

#include <complex>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace milat {

/// Truncated Fourier series of a real 2pi-periodic function,
///   U(z) = sum_{k=-K..K} c_k e^{ikz},  c_{-k} = conj(c_k).
///
/// Immutable value type; every operation returns a fresh series and
/// preserves the conjugate symmetry. The three coefficient norms
/// (orders 0, 1, 2) realize the spaces of summable, once- and
/// twice-weighted coefficient sequences.
class TrigSeries {
 public:
  using Complex = std::complex<double>;

  /// Zero series with the given truncation order.
  explicit TrigSeries(int k_max = 0);

  /// Builds from coefficients ordered k = -K..K. Throws InvalidArgument
  /// if the conjugate symmetry is violated beyond `reality_tol`.
  TrigSeries(int k_max, std::vector<Complex> coeffs, double reality_tol = 1e-9);

  static TrigSeries zero(int k_max = 0) { return TrigSeries(k_max); }
  static TrigSeries constant(double c0);
  /// amp * cos(k z)
  static TrigSeries cosine(int k, double amp = 1.0);
  /// amp * sin(k z)
  static TrigSeries sine(int k, double amp = 1.0);

  int k_max() const { return k_max_; }

  /// c_k; zero outside the stored range.
  Complex coeff(int k) const;

  /// Sets c_k and c_{-k} = conj(c_k) together.
  void set_coeff(int k, Complex value);

  /// Coefficient norms: order 0 -> sum |c_k|; order 1 -> |c_0| + sum |k||c_k|;
  /// order 2 -> |c_0| + sum k^2 |c_k|.
  double norm(int order) const;

  /// Evaluates the series at z. The imaginary part must vanish to
  /// 1e-12 relative; anything larger throws InvalidArgument.
  double evaluate(double z) const;

  /// Coefficientwise (ik)^order.
  TrigSeries derivative(int order = 1) const;

  /// z -> z + p, i.e. c_k -> c_k e^{ikp}. Norm-preserving.
  TrigSeries shift(double p) const;

  /// Coefficient mass beyond |k| > k_work.
  double tail_mass(int k_work) const;

  /// Cuts the series to k_work modes. Throws TailOverflow if the
  /// discarded mass exceeds max_tail_ratio * norm(0).
  TrigSeries truncated(int k_work, double max_tail_ratio = 1e-10) const;

  /// Drops the tail unconditionally (Galerkin projection).
  TrigSeries projected(int k_work) const;

  double max_conjugate_defect() const;

  /// Index of the largest-|c_k| mode with k >= 0.
  int dominant_mode() const;

  TrigSeries operator+(const TrigSeries& other) const;
  TrigSeries operator-(const TrigSeries& other) const;
  TrigSeries operator*(double s) const;
  friend TrigSeries operator*(double s, const TrigSeries& a) { return a * s; }

  bool operator==(const TrigSeries& other) const;

  nlohmann::json to_json() const;
  static TrigSeries from_json(const nlohmann::json& j);

 private:
  int k_max_;
  std::vector<Complex> coeffs_;  // index i <-> k = i - k_max_
};

/// Cauchy convolution, exact: K_max grows additively.
TrigSeries product(const TrigSeries& a, const TrigSeries& b);

}  // namespace milat
