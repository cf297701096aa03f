#ifndef RPE_PROJECTION_HPP
#define RPE_PROJECTION_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rpe/error.hpp"
#include "rpe/trajectory.hpp"

namespace rpe {

template <typename Scalar>
struct SimpleProjection {
  Vector<Scalar> a_hat;
  Vector<Scalar> residual;
};

template <typename Scalar>
struct RobustProjectionResult {
  Vector<Scalar> a_hat;
  std::vector<Eigen::Index> kept_rows;  // ascending
  Vector<Scalar> residual;              // x - U a_hat
  Vector<Scalar> prelim_residual;       // |x - U U^T x|
};

template <typename Scalar>
struct L1ProjectionResult {
  Vector<Scalar> a_hat;
  int iterations = 0;
  bool converged = false;
};

struct L1Options {
  int max_iter = 500;
  double tol = 1e-12;
  double epsilon = 1e-8;
};

namespace detail {

template <typename DerivedU, typename DerivedX>
void check_dims(const Eigen::MatrixBase<DerivedU>& U,
                const Eigen::MatrixBase<DerivedX>& x) {
  if (x.cols() != 1 || x.rows() != U.rows()) {
    throw Error(Errc::dimension_mismatch,
                "window of length " + std::to_string(x.rows()) +
                    " against basis with " + std::to_string(U.rows()) + " rows");
  }
}

}  // namespace detail

/// Least-squares projection onto span(U): a_hat = U^T x.
template <typename DerivedU, typename DerivedX>
SimpleProjection<typename DerivedU::Scalar> simple_projection(
    const Eigen::MatrixBase<DerivedU>& U, const Eigen::MatrixBase<DerivedX>& x) {
  using Scalar = typename DerivedU::Scalar;
  detail::check_dims(U, x);
  SimpleProjection<Scalar> out;
  out.a_hat = U.transpose() * x;
  out.residual = x - U * out.a_hat;
  return out;
}

/// Closed-form robust projection.
///
/// The preliminary residual |x - U U^T x| ranks the rows; the `n_s` rows with
/// the largest preliminary residual are discarded (ties keep the lower index)
/// and a_hat solves least squares on the remaining rows. When U is
/// sufficiently incoherent and x = U a + s with at most n_s nonzeros in s,
/// every corrupted row lands in the discarded set and a_hat == a regardless of
/// the magnitude of s.
///
/// With n_s == 0 the result is bitwise identical to simple_projection.
template <typename DerivedU, typename DerivedX>
RobustProjectionResult<typename DerivedU::Scalar> robust_projection(
    const Eigen::MatrixBase<DerivedU>& U, const Eigen::MatrixBase<DerivedX>& x,
    Eigen::Index n_s) {
  using Scalar = typename DerivedU::Scalar;
  detail::check_dims(U, x);
  const Eigen::Index m1 = U.rows();
  const Eigen::Index r = U.cols();
  if (n_s < 0 || n_s + r > m1) {
    throw Error(Errc::bad_budget, "n_s = " + std::to_string(n_s) + " with r = " +
                                      std::to_string(r) + " and M1 = " +
                                      std::to_string(m1));
  }

  RobustProjectionResult<Scalar> out;
  const Vector<Scalar> coarse = U.transpose() * x;
  out.prelim_residual = (x - U * coarse).cwiseAbs();

  if (n_s == 0) {
    out.a_hat = coarse;
    out.kept_rows.resize(static_cast<std::size_t>(m1));
    std::iota(out.kept_rows.begin(), out.kept_rows.end(), Eigen::Index{0});
    out.residual = x - U * out.a_hat;
    return out;
  }

  const Eigen::Index keep = m1 - n_s;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m1));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto& e = out.prelim_residual;
  std::nth_element(order.begin(), order.begin() + keep, order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     return e(a) < e(b) || (e(a) == e(b) && a < b);
                   });
  order.resize(static_cast<std::size_t>(keep));
  std::sort(order.begin(), order.end());
  out.kept_rows = std::move(order);

  Matrix<Scalar> U_kept(keep, r);
  Vector<Scalar> x_kept(keep);
  for (Eigen::Index k = 0; k < keep; ++k) {
    const Eigen::Index row = out.kept_rows[static_cast<std::size_t>(k)];
    U_kept.row(k) = U.row(row);
    x_kept(k) = x(row);
  }
  Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(U_kept);
  qr.setThreshold(Scalar(1e-10));
  if (qr.rank() < r) {
    throw Error(Errc::rank_deficient,
                "kept-row submatrix has rank " + std::to_string(qr.rank()) +
                    " < " + std::to_string(r));
  }
  out.a_hat = qr.solve(x_kept);
  out.residual = x - U * out.a_hat;
  return out;
}

/// Reference l1 fit argmin ||x - U a||_1 by iteratively reweighted least
/// squares with weights 1 / max(|residual_i|, epsilon). Not used on the
/// streaming path. A run that exhausts max_iter still returns its last
/// iterate with converged = false.
template <typename DerivedU, typename DerivedX>
L1ProjectionResult<typename DerivedU::Scalar> l1_projection_oracle(
    const Eigen::MatrixBase<DerivedU>& U, const Eigen::MatrixBase<DerivedX>& x,
    const L1Options& options = {}) {
  using Scalar = typename DerivedU::Scalar;
  detail::check_dims(U, x);
  L1ProjectionResult<Scalar> out;
  Vector<Scalar> a = U.transpose() * x;
  const Scalar eps = static_cast<Scalar>(options.epsilon);
  for (int it = 1; it <= options.max_iter; ++it) {
    const Vector<Scalar> w =
        (x - U * a).cwiseAbs().cwiseMax(eps).cwiseInverse().cwiseSqrt();
    const Matrix<Scalar> Uw = w.asDiagonal() * U;
    const Vector<Scalar> xw = w.cwiseProduct(x);
    const Vector<Scalar> next = Uw.colPivHouseholderQr().solve(xw);
    const Scalar change = (next - a).norm();
    a = next;
    out.iterations = it;
    if (change <= static_cast<Scalar>(options.tol) * std::max(Scalar(1), a.norm())) {
      out.converged = true;
      break;
    }
  }
  out.a_hat = std::move(a);
  return out;
}

/// v - a_hat^T u_last, the residual of the newest stamp of the window.
template <typename DerivedU, typename Scalar>
Scalar residual_of_last(const Eigen::MatrixBase<DerivedU>& U,
                        const RobustProjectionResult<Scalar>& result, Scalar v) {
  return v - U.row(U.rows() - 1).dot(result.a_hat);
}

}  // namespace rpe

#endif  // RPE_PROJECTION_HPP
