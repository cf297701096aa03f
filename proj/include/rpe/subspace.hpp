#ifndef RPE_SUBSPACE_HPP
#define RPE_SUBSPACE_HPP

#include <iosfwd>
#include <span>
#include <string>

#include "rpe/trajectory.hpp"

namespace rpe {

enum class Estimator { simple, elementwise, columnwise };

const char* to_string(Estimator estimator) noexcept;
Estimator estimator_from_string(const std::string& name);

/// Orthonormal basis of the background trajectory subspace.
struct SubspaceModel {
  Matrix<double> U;                // M1 x r, orthonormal columns
  Vector<double> singular_values;  // full spectrum of the fitted matrix

  Eigen::Index window_size() const noexcept { return U.rows(); }
  Eigen::Index rank() const noexcept { return U.cols(); }
};

/// Rank rule: count spectrum entries strictly above ratio * spectrum[0],
/// clamped to [1, cap].
struct RankRule {
  double ratio = 0.01;
  int cap = 10;
};

int select_rank(const Eigen::Ref<const Vector<double>>& spectrum,
                double ratio = 0.01, int cap = 10);

/// Rank of a fitted matrix from its singular values. The rule is applied to
/// the eigenvalues of X X^T, i.e. the squared singular values.
int rank_from_singular_values(const Eigen::Ref<const Vector<double>>& singular_values,
                              const RankRule& rule = {});

/// Median-replacement estimator: the ceil(beta% * n) largest-magnitude samples
/// are replaced by the series median before the truncated SVD.
SubspaceModel estimate_simple(std::span<const double> t, Eigen::Index window_size,
                              double beta_percent = 1.0, const RankRule& rule = {});

/// Element-wise estimator. An initial basis from the median-cleaned series
/// flags the alpha% entries of X with the largest off-subspace residual; those
/// entries are overwritten by the initial fit and the basis is recomputed at
/// the same rank.
SubspaceModel estimate_elementwise(std::span<const double> t,
                                   Eigen::Index window_size,
                                   double alpha_percent = 3.0,
                                   const RankRule& rule = {});

/// Column-wise estimator. Columns are scored on the unit sphere by the share
/// of their energy lying outside the dominant subspace; the drop_percent%
/// highest-scoring columns are removed before the final SVD.
SubspaceModel estimate_columnwise(std::span<const double> t,
                                  Eigen::Index window_size, double drop_percent = 5.0,
                                  const RankRule& rule = {});

SubspaceModel estimate(Estimator estimator, std::span<const double> t,
                       Eigen::Index window_size, const RankRule& rule = {});

/// Outlier score per column used by estimate_columnwise (bigger = more
/// outlying). Exposed for diagnostics and tests.
Vector<double> column_outlier_scores(const Eigen::Ref<const Matrix<double>>& X,
                                     const RankRule& rule = {});

/// Thin SVD returning the top-`rank` left singular vectors, signs fixed so the
/// largest-magnitude entry of each column is positive.
Matrix<double> leading_left_singular_vectors(const Eigen::Ref<const Matrix<double>>& X,
                                             Eigen::Index rank,
                                             Vector<double>* singular_values = nullptr);

/// Largest principal angle between two subspaces, in degrees. Subspaces of
/// different dimension are compared over the smaller one.
double max_principal_angle_deg(const Eigen::Ref<const Matrix<double>>& A,
                               const Eigen::Ref<const Matrix<double>>& B);

/// Median of a sample (mean of the two middle order statistics for even n).
double median(std::span<const double> values);

// Versioned JSON document {version, M1, r, U (row-major), singular_values}.
std::string to_json(const SubspaceModel& model);
SubspaceModel subspace_from_json(const std::string& text);

}  // namespace rpe

#endif  // RPE_SUBSPACE_HPP
