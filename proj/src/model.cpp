#include "milat/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <nlohmann/json.hpp>

#include "milat/errors.hpp"

namespace milat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr long kDenCap = 1000000;
constexpr double kRationalTol = 1e-12;
constexpr double kResonanceTol = 1e-9;

}  // namespace

PhaseIncrement PhaseIncrement::from_rational(long num, long den) {
  if (den <= 0) throw InvalidArgument("PhaseIncrement: denominator must be positive");
  long g = std::gcd(std::abs(num), den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  PhaseIncrement p;
  p.rational = true;
  p.num = num;
  p.den = den;
  p.value = static_cast<double>(num) * kPi / static_cast<double>(den);
  return p;
}

PhaseIncrement PhaseIncrement::from_value(double value) {
  PhaseIncrement p;
  p.value = value;
  double x = value / kPi;
  // Continued-fraction convergents of p/pi.
  double frac = x;
  long h0 = 1, h1 = static_cast<long>(std::floor(frac));
  long k0 = 0, k1 = 1;
  double rem = frac - std::floor(frac);
  for (int iter = 0; iter < 64; ++iter) {
    // Denominator-scaled acceptance: a double that genuinely encodes
    // p1*pi/p2 matches its convergent to ~1e-16, while accidental
    // convergents of irrational ratios only reach ~1/den^2.
    if (std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) <=
        kRationalTol * std::max(1.0, std::abs(x)) / static_cast<double>(k1)) {
      if (k1 <= kDenCap && !(h1 == 0)) {
        return from_rational(h1, k1);
      }
      break;
    }
    if (rem < 1e-18) break;
    frac = 1.0 / rem;
    long a = static_cast<long>(std::floor(frac));
    rem = frac - std::floor(frac);
    long h2 = a * h1 + h0;
    long k2 = a * k1 + k0;
    if (k2 > kDenCap) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
  }
  p.rational = false;
  return p;
}

void ModelParams::validate() const {
  if (gamma < 0.0) throw InvalidArgument("params.gamma: must be >= 0");
  if (lambda <= 0.0) throw InvalidArgument("params.lambda: must be > 0");
  if (omega <= 0.0) throw InvalidArgument("params.omega: must be > 0");
  if (p.value == 0.0) throw InvalidArgument("params.p: must be nonzero");
  if (h.max_conjugate_defect() > 1e-9)
    throw InvalidArgument("params.h: forcing violates conjugate symmetry");
}

ModelParams ModelParams::with_h(TrigSeries new_h) const {
  ModelParams out = *this;
  out.h = std::move(new_h);
  return out;
}

ModelParams ModelParams::with_gamma(double new_gamma) const {
  ModelParams out = *this;
  out.gamma = new_gamma;
  return out;
}

KSymbol::KSymbol(const ModelParams& params)
    : gamma_(params.gamma), lambda_(params.lambda), omega_(params.omega),
      p_(params.p.value) {}

std::complex<double> KSymbol::sigma(int k) const {
  double kk = static_cast<double>(k) * k;
  double re = 1.0 - omega_ * omega_ * kk +
              2.0 * lambda_ * omega_ * omega_ * kk * std::cos(k * p_);
  double im = gamma_ * omega_ * k;
  return {re, im};
}

double KSymbol::delta(int k) const {
  double kk = static_cast<double>(k) * k;
  return 1.0 - omega_ * omega_ * kk +
         2.0 * lambda_ * omega_ * omega_ * kk * std::cos(k * p_);
}

TrigSeries apply_K(const ModelParams& params, const TrigSeries& U) {
  KSymbol sym(params);
  TrigSeries out(U.k_max());
  for (int k = 0; k <= U.k_max(); ++k) out.set_coeff(k, sym.sigma(k) * U.coeff(k));
  return out;
}

TrigSeries invert_K(const ModelParams& params, const TrigSeries& f) {
  KSymbol sym(params);
  TrigSeries out(f.k_max());
  for (int k = 0; k <= f.k_max(); ++k) {
    std::complex<double> s = sym.sigma(k);
    if (std::abs(s) < 1e-14)
      throw SingularSymbol("invert_K: symbol vanishes at mode k=" + std::to_string(k));
    out.set_coeff(k, f.coeff(k) / s);
  }
  return out;
}

TrigSeries apply_F(const ModelParams& params, const TrigSeries& U) {
  double w = params.omega, l = params.lambda, g = params.gamma;
  double p = params.p.value;
  TrigSeries W = product(U, U);
  TrigSeries W2 = W.derivative(2);
  TrigSeries delta_part = W2 - l * W2.shift(-p) - l * W2.shift(p);
  return -1.0 * (w * w) * delta_part - (g * w) * W.derivative(1) + params.h;
}

namespace {

// The k-th term of the Theta infimum: |sigma_k| / k^2, i.e. the scaled
// modulus sqrt((1/k^2 + w^2 (2 l cos kp - 1))^2 + g^2 w^2 / k^2) that
// bounds the inverse operator from the summable into the twice-weighted
// coefficient space.
double scaled_symbol_modulus(double omega, double lambda, double gamma, double p, long k) {
  double t = 1.0 / (static_cast<double>(k) * k);
  double a = t + omega * omega * (2.0 * lambda * std::cos(k * p) - 1.0);
  double b2 = gamma * gamma * omega * omega * t;
  return std::sqrt(a * a + b2);
}

}  // namespace

ThetaResult theta(const ModelParams& params) {
  double w = params.omega, l = params.lambda, g = params.gamma;
  double p = params.p.value;
  ThetaResult result;
  double best = 1.0;

  if (!params.p.rational) {
    // Uncertified: truncated scan only.
    for (long k = 1; k <= 100000; ++k)
      best = std::min(best, scaled_symbol_modulus(w, l, g, p, k));
    result.value = best;
    result.bound_case = ThetaCase::GenericScan;
    result.certified = false;
    return result;
  }

  long p2 = params.p.den;
  long period = 2 * p2;  // cos kp depends on k mod 2*p2 only

  // Exhaustive low modes.
  for (long k = 1; k <= std::max<long>(64, period); ++k)
    best = std::min(best, scaled_symbol_modulus(w, l, g, p, k));

  // Per cosine class (k mod 2*p2 fixed, so cos kp = c is constant):
  // the squared scaled modulus (t - A)^2 + g^2 w^2 t with t = 1/k^2 and
  // A = w^2 (1 - 2 l c) is a convex quadratic in t, hence unimodal in k.
  // Its infimum is either the k -> infinity limit |A| or attained at a
  // member adjacent to the interior minimizer t_star.
  for (long r = 1; r <= period; ++r) {
    double c = std::cos(static_cast<double>(r) * p);
    double A = w * w * (1.0 - 2.0 * l * c);
    best = std::min(best, std::abs(A));  // class limit t -> 0
    double t_star = A - 0.5 * g * g * w * w;
    if (t_star <= 0.0) continue;  // modulus decreases toward the limit |A|
    double k_star = 1.0 / std::sqrt(t_star);
    long m = static_cast<long>(std::floor((k_star - static_cast<double>(r)) /
                                          static_cast<double>(period)));
    for (long j = m - 2; j <= m + 2; ++j) {
      long k = r + j * period;
      if (k >= 1) best = std::min(best, scaled_symbol_modulus(w, l, g, p, k));
    }
  }
  result.value = best;
  result.certified = true;

  ResonanceReport rr = resonance_scan(params);
  bool in_2pi_z = (params.p.den == 1 && params.p.num % 2 == 0);
  if (in_2pi_z && l > 0.5)
    result.bound_case = ThetaCase::Theta1;
  else if (g == 0.0 && rr.resonant_modes.empty() && rr.no_cosine_degeneracy)
    result.bound_case = ThetaCase::Theta2;
  else if (g > 0.0 && rr.no_cosine_degeneracy)
    result.bound_case = ThetaCase::Theta3;
  else
    result.bound_case = ThetaCase::GenericScan;
  return result;
}

ResonanceReport resonance_scan(const ModelParams& params, int k_limit) {
  double w = params.omega, l = params.lambda;
  double p = params.p.value;
  ResonanceReport report;
  report.rational = params.p.rational;

  if (params.p.rational) {
    long p2 = params.p.den;
    for (long k = 0; k < 2 * p2; ++k) {
      double c = std::cos(static_cast<double>(k) * kPi / static_cast<double>(p2));
      bool seen = false;
      for (double m : report.M2)
        if (std::abs(m - c) < 1e-12) seen = true;
      if (!seen) report.M2.push_back(c);
    }
    std::sort(report.M2.begin(), report.M2.end());
    report.no_cosine_degeneracy = true;
    for (double m : report.M2)
      if (std::abs(2.0 * l * m - 1.0) <= 1e-12) report.no_cosine_degeneracy = false;
  }

  long k_max = k_limit;
  if (l < 0.5) {
    // Resonance needs w^2 k^2 (1 - 2 l cos kp) = 1 and 1 - 2 l cos kp >= 1 - 2 l,
    // so |k| <= 1 / (w sqrt(1 - 2 l)).
    long cutoff = static_cast<long>(std::ceil(1.0 / (w * std::sqrt(1.0 - 2.0 * l))));
    k_max = std::max<long>(k_max, cutoff);
  }
  for (long k = 1; k <= k_max; ++k) {
    double expr = w * w * static_cast<double>(k) * k * (1.0 - 2.0 * l * std::cos(k * p));
    double defect = std::abs(expr - 1.0);
    if (defect <= kResonanceTol) {
      report.resonant_modes.push_back(static_cast<int>(k));
      report.resonant_modes.push_back(static_cast<int>(-k));
      report.defects.push_back(defect);
      report.defects.push_back(defect);
    }
  }
  report.simple = report.resonant_modes.size() == 2;
  return report;
}

nlohmann::json to_json(const ResonanceReport& r) {
  nlohmann::json j;
  j["rational"] = r.rational;
  j["M2"] = r.M2;
  j["no_cosine_degeneracy"] = r.no_cosine_degeneracy;
  j["resonant_modes"] = r.resonant_modes;
  j["defects"] = r.defects;
  j["simple"] = r.simple;
  return j;
}

nlohmann::json to_json(const ThetaResult& t) {
  static const char* names[] = {"generic-scan", "Theta1", "Theta2", "Theta3"};
  nlohmann::json j;
  j["value"] = t.value;
  j["case"] = names[static_cast<int>(t.bound_case)];
  j["certified"] = t.certified;
  return j;
}

namespace {

PhaseIncrement parse_phase(const nlohmann::json& j) {
  if (j.is_number()) return PhaseIncrement::from_value(j.get<double>());
  if (j.is_object()) {
    long num = j.at("num").get<long>();
    long den = j.at("den").get<long>();
    bool times_pi = j.value("times_pi", true);
    if (!times_pi)
      return PhaseIncrement::from_value(static_cast<double>(num) / static_cast<double>(den));
    return PhaseIncrement::from_rational(num, den);
  }
  if (j.is_string()) {
    // Accepted forms: "pi", "-pi", "2pi", "pi/4", "-3pi/7".
    std::string s = j.get<std::string>();
    auto pos = s.find("pi");
    if (pos == std::string::npos)
      return PhaseIncrement::from_value(std::stod(s));
    long num = 1;
    std::string head = s.substr(0, pos);
    if (head == "-")
      num = -1;
    else if (!head.empty())
      num = std::stol(head);
    long den = 1;
    std::string tail = s.substr(pos + 2);
    if (!tail.empty()) {
      if (tail[0] != '/') throw InvalidArgument("params.p: malformed phase string '" + s + "'");
      den = std::stol(tail.substr(1));
    }
    return PhaseIncrement::from_rational(num, den);
  }
  throw InvalidArgument("params.p: expected number, object or string");
}

}  // namespace

nlohmann::json ModelParams::to_json() const {
  nlohmann::json j;
  j["gamma"] = gamma;
  j["lambda"] = lambda;
  j["omega"] = omega;
  if (p.rational)
    j["p"] = {{"num", p.num}, {"den", p.den}, {"times_pi", true}};
  else
    j["p"] = p.value;
  j["h"] = h.to_json();
  return j;
}

ModelParams ModelParams::from_json(const nlohmann::json& j) {
  ModelParams params;
  params.gamma = j.at("gamma").get<double>();
  params.lambda = j.at("lambda").get<double>();
  params.omega = j.at("omega").get<double>();
  params.p = parse_phase(j.at("p"));
  if (j.contains("h")) params.h = TrigSeries::from_json(j.at("h"));
  params.validate();
  return params;
}

}  // namespace milat
