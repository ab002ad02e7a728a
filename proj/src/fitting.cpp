#include "xdamp/fitting.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include <unsupported/Eigen/NonLinearOptimization>

namespace xdamp {
namespace {

struct Adapter {
  using Scalar = double;
  const ResidualFunction* fn;
  int m, n;
  mutable int evaluations = 0;

  int values() const { return m; }
  int inputs() const { return n; }
  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    ++evaluations;
    (*fn)(p, r, nullptr);
    return r.allFinite() ? 0 : -1;
  }
  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& j) const {
    Eigen::VectorXd r(m);
    (*fn)(p, r, &j);
    return j.allFinite() ? 0 : -1;
  }
};

const char* status_name(Eigen::LevenbergMarquardtSpace::Status s) {
  using namespace Eigen::LevenbergMarquardtSpace;
  switch (s) {
    case ImproperInputParameters: return "improper input parameters";
    case RelativeReductionTooSmall: return "relative reduction below tolerance";
    case RelativeErrorTooSmall: return "relative step below tolerance";
    case RelativeErrorAndReductionTooSmall: return "relative step and reduction below tolerance";
    case CosinusTooSmall: return "residual orthogonal to Jacobian";
    case TooManyFunctionEvaluation: return "too many function evaluations";
    case FtolTooSmall: return "no further reduction possible";
    case XtolTooSmall: return "no further improvement in parameters possible";
    case GtolTooSmall: return "gradient orthogonality limit";
    default: return "user interrupt";
  }
}

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

LeastSquaresResult least_squares(const ResidualFunction& fn, std::size_t residuals, const Eigen::VectorXd& start,
                                 const LeastSquaresOptions& options) {
  const int n = static_cast<int>(start.size());
  const int m = static_cast<int>(residuals);
  if (n == 0 || m < n) throw FitError("least squares needs at least as many residuals as parameters", start);
  Adapter adapter{&fn, m, n};
  Eigen::LevenbergMarquardt<Adapter> lm(adapter);
  lm.parameters.ftol = options.tolerance;
  lm.parameters.xtol = options.tolerance;
  lm.parameters.maxfev = options.max_evaluations;
  Eigen::VectorXd p = start;
  const auto status = lm.minimize(p);

  LeastSquaresResult out;
  out.params = p;
  out.evaluations = adapter.evaluations;
  out.status = status_name(status);
  Eigen::VectorXd r(m);
  Eigen::MatrixXd j(m, n);
  fn(p, r, &j);
  out.residual_norm = r.norm();
  const double denom = j.norm() * r.norm();
  out.gradient_norm = denom > 0.0 ? (j.transpose() * r).norm() / denom : 0.0;
  const bool exact = out.residual_norm <= options.residual_floor * std::sqrt(static_cast<double>(m));
  out.converged = status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters &&
                  status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation &&
                  status != Eigen::LevenbergMarquardtSpace::UserAsked &&
                  (exact || out.gradient_norm <= options.gradient_tolerance) && p.allFinite();
  if (!out.converged)
    throw FitError("least squares did not converge: " + out.status + " (relative gradient " +
                       format_g(out.gradient_norm) + ", residual " + format_g(out.residual_norm) + ")",
                   p);
  return out;
}

}  // namespace xdamp
