#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace carleman {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using cplx = std::complex<double>;
using VectorXd = VectorX<double>;
using MatrixXd = MatrixX<double>;
using VectorXc = VectorX<cplx>;
using MatrixXc = MatrixX<cplx>;
using SparseMatrixc = Eigen::SparseMatrix<cplx>;

/// Input rejected by a precondition check. `field()` names the offending
/// input (a config path such as `weight.alpha_minus`, or an argument name).
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// An iterative or self-consistency procedure did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// A classification that is proven total returned no label. Always a bug.
class CoverFailure : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace carleman
