#include "milat/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "milat/errors.hpp"

namespace milat {

namespace {

using Complex = std::complex<double>;

double lu_condition_estimate(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
  Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
  double mx = diag.maxCoeff();
  double mn = diag.minCoeff();
  return mn > 0.0 ? mx / mn : std::numeric_limits<double>::infinity();
}

}  // namespace

TrigSeries residual(const ModelParams& params, const TrigSeries& U) {
  int J = U.k_max();
  KSymbol sym(params);
  TrigSeries W = product(U, U).projected(J);
  TrigSeries r(J);
  for (int k = 0; k <= J; ++k) {
    Complex s = sym.sigma(k);
    r.set_coeff(k, s * U.coeff(k) + (s - 1.0) * W.coeff(k) - params.h.coeff(k));
  }
  return r;
}

double oscillation_amplitude(const TrigSeries& U) {
  constexpr int n = 1024;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < n; ++i) {
    double v = U.evaluate(2.0 * M_PI * i / n);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return 0.5 * (hi - lo);
}

Eigen::VectorXd pack_state(const TrigSeries& U, int J) {
  Eigen::VectorXd x(2 * J + 1);
  x(0) = U.coeff(0).real();
  for (int k = 1; k <= J; ++k) {
    x(2 * k - 1) = U.coeff(k).real();
    x(2 * k) = U.coeff(k).imag();
  }
  return x;
}

TrigSeries unpack_state(const Eigen::VectorXd& x) {
  int J = static_cast<int>((x.size() - 1) / 2);
  TrigSeries U(J);
  U.set_coeff(0, {x(0), 0.0});
  for (int k = 1; k <= J; ++k) U.set_coeff(k, {x(2 * k - 1), x(2 * k)});
  return U;
}

Eigen::MatrixXd residual_jacobian(const ModelParams& params, const TrigSeries& U, int J) {
  KSymbol sym(params);
  int n = 2 * J + 1;
  Eigen::MatrixXd jac(n, n);
  // Complex derivative dr_k/dc_j = sigma_k [k=j] + 2 (sigma_k - 1) c_{k-j}.
  auto A = [&](int k, int j) -> Complex {
    Complex s = sym.sigma(k);
    Complex val = 2.0 * (s - 1.0) * U.coeff(k - j);
    if (k == j) val += s;
    return val;
  };
  for (int k = 0; k <= J; ++k) {
    int row_re = k == 0 ? 0 : 2 * k - 1;
    for (int j = 0; j <= J; ++j) {
      Complex dx, dy;
      if (j == 0) {
        dx = A(k, 0);
        dy = {0.0, 0.0};
      } else {
        dx = A(k, j) + A(k, -j);
        dy = Complex{0.0, 1.0} * (A(k, j) - A(k, -j));
      }
      int col_x = j == 0 ? 0 : 2 * j - 1;
      jac(row_re, col_x) = dx.real();
      if (j > 0) jac(row_re, 2 * j) = dy.real();
      if (k > 0) {
        jac(2 * k, col_x) = dx.imag();
        if (j > 0) jac(2 * k, 2 * j) = dy.imag();
      }
    }
  }
  return jac;
}

namespace {

Eigen::VectorXd pack_residual(const TrigSeries& r, int J) {
  Eigen::VectorXd v(2 * J + 1);
  v(0) = r.coeff(0).real();
  for (int k = 1; k <= J; ++k) {
    v(2 * k - 1) = r.coeff(k).real();
    v(2 * k) = r.coeff(k).imag();
  }
  return v;
}

}  // namespace

GalerkinSolution newton_solve(const ModelParams& params, const TrigSeries& U_init, int J,
                              double tol, int max_iter) {
  if (J < params.h.k_max() + 2)
    throw InvalidArgument("newton_solve: J must be at least the forcing order + 2");
  Eigen::VectorXd x = pack_state(U_init, J);
  for (int it = 1; it <= max_iter; ++it) {
    TrigSeries U = unpack_state(x);
    TrigSeries r = residual(params, U);
    double rn = r.norm(0);
    if (rn <= tol) {
      GalerkinSolution sol{U, rn, oscillation_amplitude(U), it - 1};
      return sol;
    }
    Eigen::MatrixXd jac = residual_jacobian(params, U, J);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    if (lu_condition_estimate(lu) > 1e14)
      throw SingularJacobian("newton_solve: Jacobian condition estimate > 1e14");
    Eigen::VectorXd dx = lu.solve(-pack_residual(r, J));
    if (!dx.allFinite())
      throw SingularJacobian("newton_solve: non-finite Newton step");
    x += dx;
  }
  throw NoConvergence("newton_solve: no convergence in " + std::to_string(max_iter) +
                      " iterations");
}

namespace {

struct BorderedSolve {
  Eigen::VectorXd x;  // 2J+1 coefficients
  double h0;
  int iterations;
  bool converged;
};

/// Newton corrector for [R(x, h0); tangent . (Y - Y_ref) - ds] = 0.
BorderedSolve correct_bordered(const ModelParams& tmpl, const TrigSeries& shape, int J,
                               Eigen::VectorXd x, double h0, const Eigen::VectorXd& tangent,
                               const Eigen::VectorXd& y_ref, double ds, double tol,
                               int max_iter) {
  int n = 2 * J + 1;
  Eigen::VectorXd shape_vec = pack_state(shape.projected(J), J);
  for (int it = 1; it <= max_iter; ++it) {
    ModelParams params = tmpl.with_h((h0 * shape).projected(J));
    TrigSeries U = unpack_state(x);
    TrigSeries r = residual(params, U);
    Eigen::VectorXd g(n + 1);
    g.head(n) = pack_residual(r, J);
    Eigen::VectorXd y(n + 1);
    y.head(n) = x;
    y(n) = h0;
    g(n) = tangent.dot(y - y_ref) - ds;
    if (r.norm(0) <= tol && std::abs(g(n)) <= tol * std::max(1.0, std::abs(ds)))
      return {x, h0, it - 1, true};

    Eigen::MatrixXd big(n + 1, n + 1);
    big.topLeftCorner(n, n) = residual_jacobian(params, U, J);
    big.topRightCorner(n, 1) = -shape_vec;  // dR/dh0
    big.bottomLeftCorner(1, n) = tangent.head(n).transpose();
    big(n, n) = tangent(n);
    Eigen::VectorXd dy = Eigen::PartialPivLU<Eigen::MatrixXd>(big).solve(-g);
    if (!dy.allFinite()) return {x, h0, it, false};
    x += dy.head(n);
    h0 += dy(n);
  }
  return {x, h0, max_iter, false};
}

double smallest_singular_value(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().tail(1)(0);
}

}  // namespace

ContinuationCurve continue_in_h0(const ModelParams& params_template,
                                 const TrigSeries& h_shape, double h0_start, double h0_min,
                                 double h0_max, int J, const StepControls& controls) {
  ContinuationCurve curve;
  int n = 2 * J + 1;

  auto solve_at = [&](double h0, const TrigSeries& guess) {
    return newton_solve(params_template.with_h((h0 * h_shape).projected(J)), guess, J,
                        controls.tol);
  };

  auto two_J_valid = [&](double h0, const GalerkinSolution& sol) {
    if (!controls.validate_two_J) return true;
    try {
      GalerkinSolution refined =
          newton_solve(params_template.with_h((h0 * h_shape).projected(2 * J)),
                       sol.series, 2 * J, controls.tol);
      double worst = 0.0;
      for (int k = 0; k <= J; ++k)
        worst = std::max(worst, std::abs(sol.series.coeff(k) - refined.series.coeff(k)));
      return worst < controls.two_J_tol;
    } catch (const Error&) {
      return false;
    }
  };

  // Seed from the linear response where the symbol permits, else zero.
  TrigSeries guess = TrigSeries::zero(J);
  try {
    guess = invert_K(params_template, (h0_start * h_shape).projected(J)).projected(J);
  } catch (const SingularSymbol&) {
  }
  GalerkinSolution sol = solve_at(h0_start, guess);

  ModelParams p0 = params_template.with_h((h0_start * h_shape).projected(J));
  Eigen::MatrixXd jac0 = residual_jacobian(p0, sol.series, J);
  Eigen::VectorXd shape_vec = pack_state(h_shape.projected(J), J);

  // Initial tangent by natural parameterization dx/dh0 = J^{-1} dh/dh0.
  Eigen::VectorXd t(n + 1);
  t.head(n) = Eigen::PartialPivLU<Eigen::MatrixXd>(jac0).solve(shape_vec);
  t(n) = 1.0;
  t.normalize();
  if (t(n) < 0.0) t = -t;  // march toward increasing h0 first

  CurvePoint first;
  first.h0 = h0_start;
  first.solution = sol;
  first.arc_s = 0.0;
  first.tangent_h0 = t(n);
  first.valid = two_J_valid(h0_start, sol);
  first.sigma_min = smallest_singular_value(jac0);
  curve.points.push_back(first);
  if (!first.valid) {
    curve.stopped_invalid = true;
    return curve;
  }

  Eigen::VectorXd y_prev(n + 1);
  y_prev.head(n) = pack_state(sol.series, J);
  y_prev(n) = h0_start;

  double ds = controls.initial_step;
  double arc = 0.0;
  while (static_cast<int>(curve.points.size()) < controls.max_points) {
    Eigen::VectorXd y_pred = y_prev + ds * t;
    BorderedSolve corr = correct_bordered(params_template, h_shape, J, y_pred.head(n),
                                          y_pred(n), t, y_prev, ds, controls.tol, 12);
    if (!corr.converged) {
      ds *= 0.5;
      if (ds < controls.min_step)
        throw StepUnderflow("continue_in_h0: arclength step fell below 1e-10");
      continue;
    }

    Eigen::VectorXd y_new(n + 1);
    y_new.head(n) = corr.x;
    y_new(n) = corr.h0;
    Eigen::VectorXd t_new = (y_new - y_prev).normalized();
    arc += (y_new - y_prev).norm();

    ModelParams params = params_template.with_h((corr.h0 * h_shape).projected(J));
    TrigSeries U = unpack_state(corr.x);
    CurvePoint pt;
    pt.h0 = corr.h0;
    pt.solution.series = U;
    pt.solution.residual_norm = residual(params, U).norm(0);
    pt.solution.amplitude = oscillation_amplitude(U);
    pt.solution.iterations = corr.iterations;
    pt.arc_s = arc;
    pt.tangent_h0 = t_new(n);
    pt.sigma_min = smallest_singular_value(residual_jacobian(params, U, J));

    const CurvePoint& prev = curve.points.back();
    if (prev.tangent_h0 * pt.tangent_h0 < 0.0) {
      pt.fold_flag = true;
      double t0 = prev.tangent_h0, t1 = pt.tangent_h0;
      curve.folds.push_back(prev.h0 + (pt.h0 - prev.h0) * t0 / (t0 - t1));
    }

    pt.valid = two_J_valid(corr.h0, pt.solution);
    curve.points.push_back(pt);
    if (!pt.valid) {
      curve.stopped_invalid = true;
      break;
    }
    if (corr.h0 > h0_max || corr.h0 < h0_min) break;

    y_prev = y_new;
    t = t_new;
    if (corr.iterations <= controls.newton_tol_iters)
      ds = std::min(2.0 * ds, controls.max_step);
  }
  return curve;
}

void write_curve_csv(const ContinuationCurve& curve, std::ostream& out) {
  out << "h0,A,residual,valid,fold_flag\n";
  char buf[128];
  for (const CurvePoint& pt : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d,%d\n", pt.h0,
                  pt.solution.amplitude, pt.solution.residual_norm, pt.valid ? 1 : 0,
                  pt.fold_flag ? 1 : 0);
    out << buf;
  }
}

nlohmann::json GalerkinSolution::to_json() const {
  nlohmann::json j;
  j["series"] = series.to_json();
  j["residual_norm"] = residual_norm;
  j["amplitude"] = amplitude;
  j["iterations"] = iterations;
  return j;
}

}  // namespace milat
