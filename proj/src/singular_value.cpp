#include "carleman/singular_value.hpp"

#include <cmath>
#include <random>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseQR>
#include <Eigen/SVD>

namespace carleman {

namespace {

SingularValueResult dense_sigma(const SparseMatrixc& a) {
  SingularValueResult out;
  out.method = SvdMethod::Dense;
  if (a.rows() < a.cols()) return out;  // nontrivial kernel
  const MatrixXc d(a);
  Eigen::BDCSVD<MatrixXc> svd(d);
  out.sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
  return out;
}

SingularValueResult iterative_sigma(const SparseMatrixc& a_in, const SingularValueOptions& opt) {
  SingularValueResult out;
  out.method = SvdMethod::InverseIteration;
  if (a_in.rows() < a_in.cols()) return out;
  SparseMatrixc a = a_in;
  a.makeCompressed();
  Eigen::SparseQR<SparseMatrixc, Eigen::COLAMDOrdering<int>> qr;
  qr.compute(a);
  if (qr.info() != Eigen::Success) throw ConvergenceError("min_singular_value", "sparse QR failed");
  const Eigen::Index n = a.cols();
  if (qr.rank() < n) return out;
  const SparseMatrixc r = qr.matrixR().topLeftCorner(n, n);
  const SparseMatrixc rh = r.adjoint();
  const auto& perm = qr.colsPermutation();

  // A P = Q R, so (A^* A)^{-1} = P R^{-1} R^{-*} P^T.
  auto apply_inverse = [&](const VectorXc& x) {
    VectorXc y = perm.transpose() * x;
    y = rh.triangularView<Eigen::Lower>().solve(y);
    y = r.triangularView<Eigen::Upper>().solve(y);
    return VectorXc(perm * y);
  };

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  VectorXc x(n);
  for (Eigen::Index k = 0; k < n; ++k) x(k) = cplx(normal(rng), normal(rng));
  x.normalize();
  double sigma = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opt.max_iterations; ++it) {
    VectorXc y = apply_inverse(x);
    y.normalize();
    const double next = (a * y).norm();
    x = y;
    out.iterations = it;
    if (std::abs(next - sigma) <= opt.tolerance * next) {
      out.sigma_min = next;
      return out;
    }
    sigma = next;
  }
  throw ConvergenceError("min_singular_value",
                         "inverse iteration did not converge in " +
                             std::to_string(opt.max_iterations) + " iterations");
}

}  // namespace

SingularValueResult min_singular_value(const SparseMatrixc& a, const SingularValueOptions& opt) {
  if (a.rows() == 0 || a.cols() == 0) throw ValidationError("matrix", "empty matrix");
  switch (opt.method) {
    case SvdMethod::Dense:
      return dense_sigma(a);
    case SvdMethod::InverseIteration:
      return iterative_sigma(a, opt);
    case SvdMethod::Auto:
    default:
      return a.cols() <= opt.dense_limit ? dense_sigma(a) : iterative_sigma(a, opt);
  }
}

}  // namespace carleman
