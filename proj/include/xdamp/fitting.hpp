#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace xdamp {

class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, Eigen::VectorXd last) : std::runtime_error(what), last_iterate(std::move(last)) {}
  Eigen::VectorXd last_iterate;
};

/// Residuals r(p) and, when `jacobian` is non-null, dr/dp.
using ResidualFunction = std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jacobian)>;

struct LeastSquaresOptions {
  double tolerance = 1e-15;
  int max_evaluations = 5000;
  double gradient_tolerance = 1e-5;  ///< on |J^T r| / (|J| |r|)
  double residual_floor = 1e-10;     ///< rms residual treated as an exact fit (the gradient test is noise there)
};

struct LeastSquaresResult {
  Eigen::VectorXd params;
  double residual_norm = 0.0;
  double gradient_norm = 0.0;  ///< relative, see LeastSquaresOptions
  int evaluations = 0;
  bool converged = false;
  std::string status;
};

/// Levenberg-Marquardt (MINPACK lmder). Throws FitError when the iteration
/// budget is exhausted or the gradient test fails.
LeastSquaresResult least_squares(const ResidualFunction& fn, std::size_t residuals, const Eigen::VectorXd& start,
                                 const LeastSquaresOptions& options = {});

}  // namespace xdamp
