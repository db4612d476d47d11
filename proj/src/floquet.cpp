#include "milat/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "milat/errors.hpp"

namespace milat {

namespace {

constexpr double kPivotFloor = 1e-12;

double coupling_symbol_min(int N, double lambda) {
  double m = std::numeric_limits<double>::infinity();
  for (int j = 0; j < N; ++j) {
    const double s = 1.0 - 2.0 * lambda * std::cos(2.0 * std::numbers::pi * j / N);
    m = std::min(m, std::abs(s));
  }
  return m;
}

}  // namespace

CouplingStencil::CouplingStencil(int N, double lambda) : N_(N), lambda_(lambda) {
  if (N < 2) throw InvalidArgument("ring needs at least 2 sites");
  if (coupling_symbol_min(N, lambda) < kPivotFloor)
    throw MassSingular("coupling stencil is singular on this ring");

  if (N == 2) {
    // Neighbours coincide: C = [[1, -2l], [-2l, 1]]; no tridiagonal split.
    use_dense_ = true;
  } else {
    // C = T + u v^T with u = (-1, 0,...,0, -lambda), v = (1, 0,...,0, lambda):
    // T keeps the tridiagonal band, the rank-one part carries the corners.
    Eigen::VectorXd diag = Eigen::VectorXd::Ones(N_);
    diag(0) = 2.0;
    diag(N_ - 1) = 1.0 + lambda_ * lambda_;

    w_.resize(N_);
    dhat_.resize(N_);
    dhat_(0) = diag(0);
    w_(0) = 0.0;
    bool ok = std::abs(dhat_(0)) >= kPivotFloor;
    for (int i = 1; i < N_ && ok; ++i) {
      w_(i) = -lambda_ / dhat_(i - 1);
      dhat_(i) = diag(i) - w_(i) * (-lambda_);
      ok = std::abs(dhat_(i)) >= kPivotFloor;
    }
    if (ok) {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(N_);
      u(0) = -1.0;
      u(N_ - 1) = -lambda_;
      z_ = thomas_solve(u);
      denom_ = 1.0 + z_(0) + lambda_ * z_(N_ - 1);
      if (std::abs(denom_) < kPivotFloor) ok = false;
    }
    use_dense_ = !ok;
  }

  if (use_dense_) {
    Eigen::MatrixXd C = Eigen::MatrixXd::Identity(N_, N_);
    for (int n = 0; n < N_; ++n) {
      C(n, (n + 1) % N_) += -lambda_;
      C(n, (n + N_ - 1) % N_) += -lambda_;
    }
    lu_.compute(C);
  }
}

Eigen::MatrixXd CouplingStencil::apply(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out = x;
  // x_{n-1} contribution: row n of the shifted matrix is row n-1 (cyclic).
  out.middleRows(1, N_ - 1) -= lambda_ * x.middleRows(0, N_ - 1);
  out.row(0) -= lambda_ * x.row(N_ - 1);
  // x_{n+1} contribution.
  out.middleRows(0, N_ - 1) -= lambda_ * x.middleRows(1, N_ - 1);
  out.row(N_ - 1) -= lambda_ * x.row(0);
  return out;
}

Eigen::MatrixXd CouplingStencil::thomas_solve(Eigen::MatrixXd d) const {
  for (int i = 1; i < N_; ++i) d.row(i) -= w_(i) * d.row(i - 1);
  d.row(N_ - 1) /= dhat_(N_ - 1);
  for (int i = N_ - 2; i >= 0; --i)
    d.row(i) = (d.row(i) + lambda_ * d.row(i + 1)) / dhat_(i);
  return d;
}

Eigen::MatrixXd CouplingStencil::solve(const Eigen::MatrixXd& d) const {
  if (use_dense_) return lu_.solve(d);
  Eigen::MatrixXd y = thomas_solve(d);
  const Eigen::RowVectorXd vy = y.row(0) + lambda_ * y.row(N_ - 1);
  return y - (z_ * vy) / denom_;
}

LatticeState LatticeState::zero(int N) {
  LatticeState s;
  s.N = N;
  s.u = Eigen::VectorXd::Zero(N);
  s.v = Eigen::VectorXd::Zero(N);
  return s;
}

LatticeState LatticeState::from_wave(const ModelParams& params, const TrigSeries& wave,
                                     int N, double t0) {
  LatticeState s;
  s.N = N;
  s.t = t0;
  s.u.resize(N);
  s.v.resize(N);
  const TrigSeries dwave = wave.derivative(1);
  for (int n = 0; n < N; ++n) {
    const double z = params.omega * t0 + params.p.value * n;
    s.u(n) = wave.evaluate(z);
    s.v(n) = params.omega * dwave.evaluate(z);
  }
  return s;
}

WaveSampler::WaveSampler(const ModelParams& params, const TrigSeries& wave, int N)
    : N_(N), omega_(params.omega), wave_(wave) {
  const int K = wave_.k_max();
  site_phases_.resize(N_, K + 1);
  for (int n = 0; n < N_; ++n)
    for (int k = 0; k <= K; ++k)
      site_phases_(n, k) = std::polar(1.0, k * params.p.value * n);
}

void WaveSampler::sample(double t, Eigen::VectorXd& U, Eigen::VectorXd& dU,
                         Eigen::VectorXd& ddU) const {
  const int K = wave_.k_max();
  U.setConstant(N_, wave_.coeff(0).real());
  dU.setZero(N_);
  ddU.setZero(N_);
  for (int k = 1; k <= K; ++k) {
    const std::complex<double> ikw(0.0, k * omega_);
    const std::complex<double> m = wave_.coeff(k) * std::polar(1.0, k * omega_ * t);
    U += 2.0 * (site_phases_.col(k) * m).real();
    dU += 2.0 * (site_phases_.col(k) * (ikw * m)).real();
    ddU += 2.0 * (site_phases_.col(k) * (ikw * ikw * m)).real();
  }
}

namespace {

struct NonlinearRhs {
  const ModelParams& params;
  const CouplingStencil& stencil;

  void operator()(double t, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                  Eigen::VectorXd& du, Eigen::VectorXd& dv) const {
    const int N = stencil.size();
    const Eigen::ArrayXd mass = 1.0 + 2.0 * u.array();
    if (mass.abs().minCoeff() < kPivotFloor)
      throw MassSingular("1 + 2u vanished during time stepping");

    Eigen::VectorXd h(N);
    for (int n = 0; n < N; ++n)
      h(n) = params.h.evaluate(params.omega * t + params.p.value * n);

    Eigen::VectorXd rhs = h - u - params.gamma * (v.array() * mass).matrix() -
                          stencil.apply(2.0 * v.array().square().matrix());
    du = v;
    dv = (stencil.solve(rhs).array() / mass).matrix();
  }
};

struct LinearizedRhs {
  const ModelParams& params;
  const CouplingStencil& stencil;
  const WaveSampler& sampler;
  mutable Eigen::VectorXd U, dU, ddU;

  Eigen::MatrixXd operator()(double t, const Eigen::MatrixXd& cols) const {
    const int N = stencil.size();
    sampler.sample(t, U, dU, ddU);
    const Eigen::ArrayXd mass = 1.0 + 2.0 * U.array();
    if (mass.abs().minCoeff() < kPivotFloor)
      throw MassSingular("1 + 2U vanished along the wave");

    const Eigen::ArrayXXd u = cols.topRows(N).array();
    const Eigen::ArrayXXd v = cols.bottomRows(N).array();
    Eigen::MatrixXd rhs =
        ((v.colwise() * mass) * (-params.gamma) -
         u.colwise() * (1.0 + 2.0 * params.gamma * dU.array()))
            .matrix();
    rhs -= 2.0 * stencil.apply(
                     (u.colwise() * ddU.array() + (v.colwise() * dU.array()) * 2.0)
                         .matrix());
    Eigen::MatrixXd out(2 * N, cols.cols());
    out.topRows(N) = v.matrix();
    out.bottomRows(N) = (stencil.solve(rhs).array().colwise() / mass).matrix();
    return out;
  }
};

}  // namespace

LatticeState step_lattice(const ModelParams& params, const CouplingStencil& stencil,
                          const LatticeState& state, double dt) {
  const NonlinearRhs f{params, stencil};
  const int N = stencil.size();
  Eigen::VectorXd k1u(N), k1v(N), k2u(N), k2v(N), k3u(N), k3v(N), k4u(N), k4v(N);
  const double t = state.t;
  f(t, state.u, state.v, k1u, k1v);
  f(t + 0.5 * dt, state.u + 0.5 * dt * k1u, state.v + 0.5 * dt * k1v, k2u, k2v);
  f(t + 0.5 * dt, state.u + 0.5 * dt * k2u, state.v + 0.5 * dt * k2v, k3u, k3v);
  f(t + dt, state.u + dt * k3u, state.v + dt * k3v, k4u, k4v);

  LatticeState next = state;
  next.u += (dt / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
  next.v += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  next.t = t + dt;
  return next;
}

void step_linearized(const ModelParams& params, const CouplingStencil& stencil,
                     const WaveSampler& sampler, Eigen::MatrixXd& columns, double t,
                     double dt) {
  const LinearizedRhs f{params, stencil, sampler};
  const Eigen::MatrixXd k1 = f(t, columns);
  const Eigen::MatrixXd k2 = f(t + 0.5 * dt, columns + 0.5 * dt * k1);
  const Eigen::MatrixXd k3 = f(t + 0.5 * dt, columns + 0.5 * dt * k2);
  const Eigen::MatrixXd k4 = f(t + dt, columns + dt * k3);
  columns += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

nlohmann::json MonodromyResult::to_json() const {
  nlohmann::json mults = nlohmann::json::array();
  for (const auto& m : multipliers) mults.push_back({m.real(), m.imag()});
  nlohmann::json near = nlohmann::json::array();
  for (const auto& m : near_unit) near.push_back({m.real(), m.imag()});
  const char* v = verdict == StabilityVerdict::Stable
                      ? "stable"
                      : (verdict == StabilityVerdict::Unstable ? "unstable" : "marginal");
  return {{"multipliers", mults},
          {"max_modulus", max_modulus},
          {"verdict", v},
          {"stable", stable},
          {"near_unit", near},
          {"period", period},
          {"multiplier_product_modulus", multiplier_product_modulus},
          {"liouville_prediction", liouville_prediction}};
}

MonodromyResult monodromy(const ModelParams& params, const TrigSeries& wave, int N,
                          int steps_per_period, double tol_margin) {
  params.validate();
  if (N < 2) throw InvalidArgument("ring needs at least 2 sites");
  if (steps_per_period < 1) throw InvalidArgument("steps_per_period must be positive");
  const double windings = params.p.value * N / (2.0 * std::numbers::pi);
  if (std::abs(windings - std::round(windings)) > 1e-9 * std::max(1.0, std::abs(windings)))
    throw InvalidArgument("p*N is not a multiple of 2*pi: the wave does not close on the ring");

  const CouplingStencil stencil(N, params.lambda);
  const WaveSampler sampler(params, wave, N);

  const double T = 2.0 * std::numbers::pi / params.omega;
  const double dt = T / steps_per_period;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(2 * N, 2 * N);
  for (int s = 0; s < steps_per_period; ++s)
    step_linearized(params, stencil, sampler, M, s * dt, dt);

  Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw EigenFailure("monodromy eigenvalue iteration failed");

  MonodromyResult result;
  result.period = T;
  result.multipliers.reserve(2 * N);
  for (int i = 0; i < 2 * N; ++i) result.multipliers.push_back(es.eigenvalues()(i));
  std::sort(result.multipliers.begin(), result.multipliers.end(),
            [](const auto& a, const auto& b) { return std::abs(a) > std::abs(b); });

  double log_product = 0.0;
  bool any_above = false;
  bool all_below = true;
  for (const auto& m : result.multipliers) {
    const double mod = std::abs(m);
    log_product += std::log(mod);
    if (std::abs(mod - 1.0) <= tol_margin) result.near_unit.push_back(m);
    if (mod > 1.0 + tol_margin) any_above = true;
    if (mod >= 1.0 - tol_margin) all_below = false;
  }
  result.max_modulus = std::abs(result.multipliers.front());
  result.multiplier_product_modulus = std::exp(log_product);

  double trace_inv = 0.0;
  for (int j = 0; j < N; ++j)
    trace_inv += 1.0 / (1.0 - 2.0 * params.lambda * std::cos(2.0 * std::numbers::pi * j / N));
  result.liouville_prediction = std::exp(-params.gamma * T * trace_inv);

  result.verdict = any_above ? StabilityVerdict::Unstable
                             : (all_below ? StabilityVerdict::Stable
                                          : StabilityVerdict::Marginal);
  result.stable = result.verdict == StabilityVerdict::Stable;
  return result;
}

SimulationSummary simulate(const ModelParams& params, const LatticeState& initial,
                           double duration, double dt, const SimulateOptions& options) {
  params.validate();
  if (dt <= 0.0 || duration < 0.0) throw InvalidArgument("simulate needs dt > 0, duration >= 0");
  const int N = initial.N;
  const CouplingStencil stencil(N, params.lambda);

  const TrigSeries* ref = options.reference_wave;
  SimulationSummary summary;
  LatticeState state = initial;
  const int steps = static_cast<int>(std::ceil(duration / dt));

  auto observe = [&](const LatticeState& s, int step) {
    summary.max_abs_u = std::max(summary.max_abs_u, s.u.array().abs().maxCoeff());
    if (ref) {
      double dev = 0.0;
      for (int n = 0; n < N; ++n)
        dev = std::max(dev, std::abs(s.u(n) - ref->evaluate(params.omega * s.t +
                                                            params.p.value * n)));
      summary.max_deviation = std::max(summary.max_deviation, dev);
    }
    if (options.snapshot_out && step % options.snapshot_stride == 0) {
      auto& out = *options.snapshot_out;
      out << s.t;
      for (int n = 0; n < N; ++n) out << ',' << s.u(n);
      out << '\n';
    }
  };

  observe(state, 0);
  for (int step = 1; step <= steps; ++step) {
    const double step_dt = std::min(dt, duration - (step - 1) * dt);
    try {
      state = step_lattice(params, stencil, state, step_dt);
    } catch (const MassSingular&) {
      summary.blow_up = true;
      break;
    }
    observe(state, step);
    if (!state.u.allFinite() || state.u.array().abs().maxCoeff() > options.blowup_ceiling) {
      summary.blow_up = true;
      break;
    }
  }
  summary.final_time = state.t;
  summary.steps = steps;
  return summary;
}

}  // namespace milat
