#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "milat/model.hpp"
#include "milat/trig_series.hpp"

namespace milat {

/// Admissibility certificate of the small-solution existence theorem:
/// the forcing must satisfy 0 < ||h|| < Theta^2 / (8 w (2w + 4 l w + g)),
/// in which case the fixed-point map contracts on the ball of radius rho_h.
struct ExistenceCertificate {
  double theta = 0.0;
  double bound_H = 0.0;
  bool admissible = false;
  double rho_h = 0.0;
  double contraction_constant = 0.0;
  std::string reason;  // set when not admissible

  nlohmann::json to_json() const;
};

struct ContractionResult {
  TrigSeries U;
  int iterations = 0;
  double residual = 0.0;       // norm(apply_K(U) - apply_F(U), 0)
  double observed_rate = 0.0;  // geometric estimate from successive diffs
};

struct ContractionOptions {
  double tol = 1e-12;
  int max_iterations = 500;
  /// Working truncation; 0 means 4x the highest forcing mode (min 8),
  /// doubled adaptively on tail overflow.
  int k_work = 0;
  /// Permits iterating a non-admissible instance (h = 0 boundary case).
  bool bypass_admissibility = false;
  /// Optional start point; default is the zero series.
  const TrigSeries* start = nullptr;
};

struct LipschitzReport {
  double lhs = 0.0;  // norm(U1 - U2, 2)
  double rhs = 0.0;  // norm(h1 - h2, 0) / sqrt(Theta^2 - 8w(2w+4lw+g) max ||h||)
  bool holds = false;
};

ExistenceCertificate certify(const ModelParams& params);

/// Fixed-point iteration U <- K^{-1} F(U) from U0 = 0 (or options.start).
/// Throws NotAdmissible / NonContraction / SingularSymbol.
ContractionResult solve_contraction(const ModelParams& params,
                                    const ContractionOptions& options = {});

/// Verifies the Lipschitz-in-h bound for two solved instances sharing
/// (gamma, lambda, omega, p).
LipschitzReport lipschitz_check(const ModelParams& params1, const ModelParams& params2,
                                const TrigSeries& U1, const TrigSeries& U2);

}  // namespace milat
