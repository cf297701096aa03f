#ifndef RPE_TRAJECTORY_HPP
#define RPE_TRAJECTORY_HPP

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpe/error.hpp"

namespace rpe {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// M1 x M2 Hankel embedding; column j holds samples [j, j + M1).
/// Eigen's default column-major storage keeps each window contiguous.
template <typename Scalar>
using TrajectoryMatrix = Matrix<Scalar>;

/// Ordered real-valued samples with optional per-stamp anomaly labels.
///
/// Construction validates the invariants: at least one sample, every value
/// finite, and labels (when present) matching the value count. Timestamps are
/// carried through from ingestion untouched.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(std::vector<double> values,
                      std::optional<std::vector<bool>> labels = std::nullopt,
                      std::vector<std::string> timestamps = {});

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const double> values() const noexcept { return values_; }
  const std::optional<std::vector<bool>>& labels() const noexcept {
    return labels_;
  }
  const std::vector<std::string>& timestamps() const noexcept {
    return timestamps_;
  }

  double operator[](std::size_t i) const { return values_[i]; }
  /// Label of stamp i; false for unlabelled series.
  bool label(std::size_t i) const { return labels_ && (*labels_)[i]; }

 private:
  std::vector<double> values_;
  std::optional<std::vector<bool>> labels_;
  std::vector<std::string> timestamps_;
};

template <typename Scalar>
TrajectoryMatrix<Scalar> build_trajectory(std::span<const Scalar> t,
                                          Eigen::Index window_size) {
  const auto n = static_cast<Eigen::Index>(t.size());
  if (window_size < 1) {
    throw Error(Errc::invalid_input, "window size must be positive");
  }
  if (window_size > n) {
    throw Error(Errc::window_too_large,
                "window size " + std::to_string(window_size) +
                    " exceeds series length " + std::to_string(n));
  }
  const Eigen::Index cols = n - window_size + 1;
  TrajectoryMatrix<Scalar> X(window_size, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    X.col(j) = Eigen::Map<const Vector<Scalar>>(t.data() + j, window_size);
  }
  return X;
}

inline TrajectoryMatrix<double> build_trajectory(const TimeSeries& t,
                                                 Eigen::Index window_size) {
  return build_trajectory<double>(t.values(), window_size);
}

/// The final `window_size` samples; the last entry is the current stamp.
template <typename Scalar>
Vector<Scalar> last_window(std::span<const Scalar> t, Eigen::Index window_size) {
  const auto n = static_cast<Eigen::Index>(t.size());
  if (window_size < 1) {
    throw Error(Errc::invalid_input, "window size must be positive");
  }
  if (window_size > n) {
    throw Error(Errc::window_too_large,
                "window size " + std::to_string(window_size) +
                    " exceeds series length " + std::to_string(n));
  }
  return Eigen::Map<const Vector<Scalar>>(t.data() + (n - window_size),
                                          window_size);
}

inline Vector<double> last_window(const TimeSeries& t,
                                  Eigen::Index window_size) {
  return last_window<double>(t.values(), window_size);
}

/// Averages each anti-diagonal of X back into a series of length
/// rows + cols - 1. Exact inverse of build_trajectory on Hankel input.
template <typename Derived>
Vector<typename Derived::Scalar> hankel_average(
    const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index rows = X.rows();
  const Eigen::Index cols = X.cols();
  Vector<Scalar> sum = Vector<Scalar>::Zero(rows + cols - 1);
  Vector<Scalar> count = Vector<Scalar>::Zero(rows + cols - 1);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      sum(i + j) += X(i, j);
      count(i + j) += Scalar(1);
    }
  }
  return sum.cwiseQuotient(count);
}

}  // namespace rpe

#endif  // RPE_TRAJECTORY_HPP
