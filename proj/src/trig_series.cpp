#include "milat/trig_series.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "milat/errors.hpp"

namespace milat {

TrigSeries::TrigSeries(int k_max)
    : k_max_(k_max), coeffs_(2 * static_cast<size_t>(k_max) + 1, Complex{0.0, 0.0}) {
  if (k_max < 0) throw InvalidArgument("TrigSeries: negative truncation order");
}

TrigSeries::TrigSeries(int k_max, std::vector<Complex> coeffs, double reality_tol)
    : k_max_(k_max), coeffs_(std::move(coeffs)) {
  if (k_max < 0) throw InvalidArgument("TrigSeries: negative truncation order");
  if (coeffs_.size() != 2 * static_cast<size_t>(k_max) + 1)
    throw InvalidArgument("TrigSeries: coefficient count does not match K_max");
  if (max_conjugate_defect() > reality_tol)
    throw InvalidArgument("TrigSeries: coefficients violate conjugate symmetry");
  // Snap to exact symmetry so downstream checks are not eroded by input noise.
  coeffs_[k_max_] = Complex{coeffs_[k_max_].real(), 0.0};
  for (int k = 1; k <= k_max_; ++k) {
    Complex avg = 0.5 * (coeffs_[k_max_ + k] + std::conj(coeffs_[k_max_ - k]));
    coeffs_[k_max_ + k] = avg;
    coeffs_[k_max_ - k] = std::conj(avg);
  }
}

TrigSeries TrigSeries::constant(double c0) {
  TrigSeries s(0);
  s.coeffs_[0] = c0;
  return s;
}

TrigSeries TrigSeries::cosine(int k, double amp) {
  TrigSeries s(std::abs(k));
  s.set_coeff(std::abs(k), Complex{amp / 2.0, 0.0});
  return s;
}

TrigSeries TrigSeries::sine(int k, double amp) {
  TrigSeries s(std::abs(k));
  // sin kz = (e^{ikz} - e^{-ikz}) / 2i
  s.set_coeff(k, Complex{0.0, -amp / 2.0});
  return s;
}

TrigSeries::Complex TrigSeries::coeff(int k) const {
  if (std::abs(k) > k_max_) return Complex{0.0, 0.0};
  return coeffs_[static_cast<size_t>(k + k_max_)];
}

void TrigSeries::set_coeff(int k, Complex value) {
  if (std::abs(k) > k_max_)
    throw InvalidArgument("TrigSeries::set_coeff: mode outside truncation");
  if (k == 0) {
    coeffs_[k_max_] = Complex{value.real(), 0.0};
    return;
  }
  coeffs_[static_cast<size_t>(k + k_max_)] = value;
  coeffs_[static_cast<size_t>(-k + k_max_)] = std::conj(value);
}

double TrigSeries::norm(int order) const {
  if (order < 0 || order > 2)
    throw InvalidArgument("TrigSeries::norm: order must be 0, 1 or 2");
  double total = std::abs(coeffs_[k_max_]);
  for (int k = 1; k <= k_max_; ++k) {
    double w = order == 0 ? 1.0 : (order == 1 ? k : static_cast<double>(k) * k);
    total += w * (std::abs(coeff(k)) + std::abs(coeff(-k)));
  }
  return total;
}

double TrigSeries::evaluate(double z) const {
  // c_0 + 2 sum_{k>0} Re(c_k e^{ikz}); real by conjugate symmetry.
  double value = coeffs_[k_max_].real();
  for (int k = 1; k <= k_max_; ++k) {
    Complex ck = coeff(k);
    value += 2.0 * (ck.real() * std::cos(k * z) - ck.imag() * std::sin(k * z));
  }
  return value;
}

TrigSeries TrigSeries::derivative(int order) const {
  if (order < 1 || order > 2)
    throw InvalidArgument("TrigSeries::derivative: order must be 1 or 2");
  TrigSeries out(k_max_);
  for (int k = -k_max_; k <= k_max_; ++k) {
    Complex ik{0.0, static_cast<double>(k)};
    Complex factor = order == 1 ? ik : ik * ik;
    out.coeffs_[static_cast<size_t>(k + k_max_)] = factor * coeff(k);
  }
  return out;
}

TrigSeries TrigSeries::shift(double p) const {
  TrigSeries out(k_max_);
  for (int k = -k_max_; k <= k_max_; ++k) {
    Complex rot = std::polar(1.0, k * p);
    out.coeffs_[static_cast<size_t>(k + k_max_)] = rot * coeff(k);
  }
  return out;
}

double TrigSeries::tail_mass(int k_work) const {
  double mass = 0.0;
  for (int k = k_work + 1; k <= k_max_; ++k)
    mass += std::abs(coeff(k)) + std::abs(coeff(-k));
  return mass;
}

TrigSeries TrigSeries::truncated(int k_work, double max_tail_ratio) const {
  if (k_work >= k_max_) return *this;
  double mass = tail_mass(k_work);
  double total = norm(0);
  if (total > 0.0 && mass > max_tail_ratio * total)
    throw TailOverflow("TrigSeries::truncated: discarded tail mass " +
                       std::to_string(mass) + " exceeds ratio limit");
  return projected(k_work);
}

TrigSeries TrigSeries::projected(int k_work) const {
  if (k_work >= k_max_) return *this;
  TrigSeries out(k_work);
  for (int k = -k_work; k <= k_work; ++k)
    out.coeffs_[static_cast<size_t>(k + k_work)] = coeff(k);
  return out;
}

double TrigSeries::max_conjugate_defect() const {
  double defect = std::abs(coeffs_[k_max_].imag());
  for (int k = 1; k <= k_max_; ++k)
    defect = std::max(defect, std::abs(coeff(k) - std::conj(coeff(-k))));
  return defect;
}

int TrigSeries::dominant_mode() const {
  int best = 0;
  double best_abs = std::abs(coeff(0));
  for (int k = 1; k <= k_max_; ++k) {
    double a = std::abs(coeff(k));
    if (a > best_abs) {
      best_abs = a;
      best = k;
    }
  }
  return best;
}

TrigSeries TrigSeries::operator+(const TrigSeries& other) const {
  int K = std::max(k_max_, other.k_max_);
  TrigSeries out(K);
  for (int k = -K; k <= K; ++k)
    out.coeffs_[static_cast<size_t>(k + K)] = coeff(k) + other.coeff(k);
  return out;
}

TrigSeries TrigSeries::operator-(const TrigSeries& other) const {
  return *this + other * -1.0;
}

TrigSeries TrigSeries::operator*(double s) const {
  TrigSeries out(k_max_);
  for (size_t i = 0; i < coeffs_.size(); ++i) out.coeffs_[i] = s * coeffs_[i];
  return out;
}

bool TrigSeries::operator==(const TrigSeries& other) const {
  int K = std::max(k_max_, other.k_max_);
  for (int k = -K; k <= K; ++k)
    if (coeff(k) != other.coeff(k)) return false;
  return true;
}

TrigSeries product(const TrigSeries& a, const TrigSeries& b) {
  int K = a.k_max() + b.k_max();
  TrigSeries out(K);
  for (int l = -K; l <= K; ++l) {
    TrigSeries::Complex sum{0.0, 0.0};
    int lo = std::max(-a.k_max(), l - b.k_max());
    int hi = std::min(a.k_max(), l + b.k_max());
    for (int k = lo; k <= hi; ++k) sum += a.coeff(k) * b.coeff(l - k);
    if (l >= 0) out.set_coeff(l, l == 0 ? TrigSeries::Complex{sum.real(), 0.0} : sum);
  }
  return out;
}

nlohmann::json TrigSeries::to_json() const {
  nlohmann::json j;
  j["K_max"] = k_max_;
  nlohmann::json arr = nlohmann::json::array();
  for (const Complex& c : coeffs_) arr.push_back({c.real(), c.imag()});
  j["coeffs"] = arr;
  return j;
}

TrigSeries TrigSeries::from_json(const nlohmann::json& j) {
  try {
    int k_max = j.at("K_max").get<int>();
    std::vector<Complex> coeffs;
    for (const auto& pair : j.at("coeffs"))
      coeffs.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    return TrigSeries(k_max, std::move(coeffs));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("series: malformed JSON: ") + e.what());
  }
}

}  // namespace milat
