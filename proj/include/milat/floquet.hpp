#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "milat/model.hpp"
#include "milat/trig_series.hpp"

namespace milat {

/// Solver for the constant coupling stencil C x = d with
/// (C x)_n = x_n - lambda x_{n-1} - lambda x_{n+1}, periodic indexing.
/// Thomas factorization plus a rank-one corner correction, reused
/// across RK stages; O(N) per right-hand side.
class CouplingStencil {
 public:
  CouplingStencil(int N, double lambda);

  int size() const { return N_; }
  /// Applies C.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  /// Solves C x = d columnwise.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& d) const;

 private:
  int N_;
  double lambda_;
  Eigen::VectorXd w_;     // Thomas forward multipliers
  Eigen::VectorXd dhat_;  // pivots
  Eigen::VectorXd z_;     // T^{-1} u for the corner correction
  double denom_;          // 1 + v . z
  Eigen::MatrixXd dense_lu_;  // small-N fallback
  bool use_dense_ = false;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;

  Eigen::MatrixXd thomas_solve(Eigen::MatrixXd d) const;
};

struct LatticeState {
  int N = 0;
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  double t = 0.0;

  static LatticeState zero(int N);
  /// Travelling-wave initial data u_n = U(pn), v_n = w U'(pn).
  static LatticeState from_wave(const ModelParams& params, const TrigSeries& wave,
                                int N, double t0 = 0.0);
};

/// Samples U(wt + pn) and its first two time derivatives on the ring.
class WaveSampler {
 public:
  WaveSampler(const ModelParams& params, const TrigSeries& wave, int N);

  void sample(double t, Eigen::VectorXd& U, Eigen::VectorXd& dU,
              Eigen::VectorXd& ddU) const;

 private:
  int N_;
  double omega_;
  TrigSeries wave_;
  Eigen::MatrixXcd site_phases_;  // e^{i k p n}, N x (K+1)
};

/// One RK4 step of the nonlinear ring lattice. Throws MassSingular when
/// 1 + 2 u_n vanishes or the stencil is singular.
LatticeState step_lattice(const ModelParams& params, const CouplingStencil& stencil,
                          const LatticeState& state, double dt);

/// One RK4 step of the linearization about the travelling wave, applied
/// to a batch of perturbation columns (2N x m, rows = [u; v]).
void step_linearized(const ModelParams& params, const CouplingStencil& stencil,
                     const WaveSampler& sampler, Eigen::MatrixXd& columns, double t,
                     double dt);

enum class StabilityVerdict { Stable, Unstable, Marginal };

struct MonodromyResult {
  std::vector<std::complex<double>> multipliers;  // sorted by modulus, descending
  double max_modulus = 0.0;
  StabilityVerdict verdict = StabilityVerdict::Marginal;
  bool stable = false;
  /// Multipliers within tol_margin of the unit circle, reported apart
  /// from the verdict (the trivial-multiplier band).
  std::vector<std::complex<double>> near_unit;
  double period = 0.0;
  double multiplier_product_modulus = 0.0;
  double liouville_prediction = 0.0;  // |det M| from the integrated trace

  nlohmann::json to_json() const;
};

/// Floquet multipliers of the travelling wave on an N-site ring.
/// Requires e^{ipN} = 1 (ring compatibility).
MonodromyResult monodromy(const ModelParams& params, const TrigSeries& wave, int N,
                          int steps_per_period = 2000, double tol_margin = 1e-6);

struct SimulateOptions {
  double blowup_ceiling = 1e6;
  /// Reference travelling wave for deviation tracking.
  const TrigSeries* reference_wave = nullptr;
  /// Emit CSV rows (t, u_1..u_N) every `snapshot_stride` steps.
  std::ostream* snapshot_out = nullptr;
  int snapshot_stride = 100;
};

struct SimulationSummary {
  bool blow_up = false;
  double max_abs_u = 0.0;
  double max_deviation = 0.0;  // vs reference wave, when given
  double final_time = 0.0;
  int steps = 0;
};

SimulationSummary simulate(const ModelParams& params, const LatticeState& initial,
                           double duration, double dt, const SimulateOptions& options = {});

}  // namespace milat
