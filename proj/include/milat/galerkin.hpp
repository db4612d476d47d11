#pragma once

#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "milat/model.hpp"
#include "milat/trig_series.hpp"

namespace milat {

struct GalerkinSolution {
  TrigSeries series;
  double residual_norm = 0.0;
  double amplitude = 0.0;  // (max U - min U) / 2 on a 1024-point grid
  int iterations = 0;

  nlohmann::json to_json() const;
};

/// Spectral residual of the travelling-wave equation,
///   r_k = sigma_k c_k + (sigma_k - 1) (U^2)_k - h_k,
/// projected onto the modes of U.
TrigSeries residual(const ModelParams& params, const TrigSeries& U);

/// Oscillation amplitude on a uniform 1024-point grid.
double oscillation_amplitude(const TrigSeries& U);

/// Real-basis unknown vector (c_0, Re c_1, Im c_1, ..., Re c_J, Im c_J).
Eigen::VectorXd pack_state(const TrigSeries& U, int J);
TrigSeries unpack_state(const Eigen::VectorXd& x);

/// Analytic Jacobian of the residual in the real basis.
Eigen::MatrixXd residual_jacobian(const ModelParams& params, const TrigSeries& U, int J);

/// Newton iteration on the 2J+1 real unknowns. Throws NoConvergence
/// after max_iter steps, SingularJacobian when the linear solve degrades
/// (usually a fold).
GalerkinSolution newton_solve(const ModelParams& params, const TrigSeries& U_init, int J,
                              double tol = 1e-11, int max_iter = 50);

struct StepControls {
  double initial_step = 1e-3;
  double min_step = 1e-10;
  double max_step = 5e-2;
  int max_points = 4000;
  int newton_tol_iters = 3;  // step doubles when the corrector beats this
  double tol = 1e-11;
  bool validate_two_J = true;
  double two_J_tol = 1e-6;
};

struct CurvePoint {
  double h0 = 0.0;
  GalerkinSolution solution;
  double arc_s = 0.0;
  double tangent_h0 = 0.0;  // dh0/ds along the branch
  bool valid = true;        // two-J dominant-coefficient agreement
  bool fold_flag = false;
  double sigma_min = 0.0;   // smallest singular value of the plain Jacobian
};

struct ContinuationCurve {
  std::vector<CurvePoint> points;
  std::vector<double> folds;  // h0 locations where dh0/ds changes sign
  bool stopped_invalid = false;
};

/// Pseudo-arclength continuation in the driving amplitude h0 for
/// h(z) = h0 * h_shape(z). Requires a converged start at h0_start;
/// stops at h0 outside [h0_min, h0_max], at the two-J breaking point,
/// or on step underflow.
ContinuationCurve continue_in_h0(const ModelParams& params_template,
                                 const TrigSeries& h_shape, double h0_start,
                                 double h0_min, double h0_max, int J,
                                 const StepControls& controls = {});

void write_curve_csv(const ContinuationCurve& curve, std::ostream& out);

}  // namespace milat
