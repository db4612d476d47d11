#include "milat/existence.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "milat/errors.hpp"

namespace milat {

namespace {

double quadratic_weight(const ModelParams& params) {
  double w = params.omega, l = params.lambda, g = params.gamma;
  return 2.0 * w * (2.0 * w + 4.0 * l * w + g);  // the constant of the F bound
}

}  // namespace

ExistenceCertificate certify(const ModelParams& params) {
  params.validate();
  ExistenceCertificate cert;
  cert.theta = theta(params).value;
  double W = 4.0 * quadratic_weight(params);  // 8 w (2w + 4 l w + g)
  if (cert.theta <= 0.0) {
    cert.reason = "resonant";
    return cert;
  }
  cert.bound_H = cert.theta * cert.theta / W;
  double hn = params.h.norm(0);
  if (hn <= 0.0) {
    cert.reason = "forcing norm must be positive";
    return cert;
  }
  if (hn >= cert.bound_H) {
    cert.reason = "forcing norm exceeds admissible bound";
    return cert;
  }
  cert.admissible = true;
  double disc = cert.theta * cert.theta - W * hn;
  cert.rho_h = (cert.theta - std::sqrt(disc)) / (0.5 * W);
  cert.contraction_constant = 0.5 * W * cert.rho_h / cert.theta;
  return cert;
}

ContractionResult solve_contraction(const ModelParams& params,
                                    const ContractionOptions& options) {
  ExistenceCertificate cert = certify(params);
  if (!cert.admissible && !options.bypass_admissibility)
    throw NotAdmissible("solve_contraction: " + cert.reason);

  int k_work = options.k_work;
  if (k_work <= 0) k_work = std::max(8, 4 * params.h.k_max());

  for (;; k_work *= 2) {
    if (k_work > (1 << 16))
      throw TailOverflow("solve_contraction: working truncation exceeded 65536");
    try {
      TrigSeries U = options.start ? options.start->projected(k_work)
                                   : TrigSeries::zero(k_work);
      ContractionResult result{U, 0, 0.0, 0.0};
      double prev_diff = -1.0;
      double worst_rate = 0.0;
      for (int it = 1; it <= options.max_iterations; ++it) {
        TrigSeries next = invert_K(params, apply_F(params, U).truncated(k_work)).projected(k_work);
        double diff = (next - U).norm(2);
        if (prev_diff > 0.0 && diff > 0.0) {
          double rate = diff / prev_diff;
          worst_rate = std::max(worst_rate, rate);
          if (rate >= 1.0 && diff > options.tol)
            throw NonContraction("solve_contraction: observed rate " +
                                 std::to_string(rate) + " >= 1");
        }
        prev_diff = diff;
        U = next;
        result.iterations = it;
        double residual = (apply_K(params, U) - apply_F(params, U).truncated(k_work)).norm(0);
        if (diff < options.tol && residual < 10.0 * options.tol) {
          result.U = U;
          result.residual = residual;
          result.observed_rate = worst_rate;
          return result;
        }
      }
      throw NoConvergence("solve_contraction: no convergence in " +
                          std::to_string(options.max_iterations) + " iterations");
    } catch (const TailOverflow&) {
      continue;  // double k_work and retry
    }
  }
}

LipschitzReport lipschitz_check(const ModelParams& params1, const ModelParams& params2,
                                const TrigSeries& U1, const TrigSeries& U2) {
  double W = 4.0 * quadratic_weight(params1);
  double th = theta(params1).value;
  double max_h = std::max(params1.h.norm(0), params2.h.norm(0));
  LipschitzReport report;
  report.lhs = (U1 - U2).norm(2);
  double disc = th * th - W * max_h;
  report.rhs = disc > 0.0 ? (params1.h - params2.h).norm(0) / std::sqrt(disc)
                          : std::numeric_limits<double>::infinity();
  report.holds = report.lhs <= report.rhs * (1.0 + 1e-12) + 1e-15;
  return report;
}

nlohmann::json ExistenceCertificate::to_json() const {
  nlohmann::json j;
  j["theta"] = theta;
  j["bound_H"] = bound_H;
  j["admissible"] = admissible;
  j["rho_h"] = rho_h;
  j["contraction_constant"] = contraction_constant;
  if (!admissible) j["reason"] = reason;
  return j;
}

}  // namespace milat
