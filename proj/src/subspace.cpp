#include "rpe/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rpe/json.hpp"

namespace rpe {
namespace {

constexpr double kRadToDeg = 57.295779513082320876798154814105;

std::size_t ceil_count(double percent, std::size_t total) {
  if (percent <= 0.0) return 0;
  const double raw = percent / 100.0 * static_cast<double>(total);
  // Guard against 0.04 * 300 = 12.000000000000002 style round-up.
  const double rounded = std::round(raw);
  const double count = std::abs(raw - rounded) < 1e-9 ? rounded : std::ceil(raw);
  return std::min(total, static_cast<std::size_t>(count));
}

void require_length(std::span<const double> t, Eigen::Index window_size) {
  if (window_size < 1) throw Error(Errc::invalid_input, "window size must be positive");
  if (static_cast<Eigen::Index>(t.size()) < 2 * window_size) {
    throw Error(Errc::series_too_short,
                "need at least " + std::to_string(2 * window_size) +
                    " samples, got " + std::to_string(t.size()));
  }
}

std::vector<double> replace_largest_by_median(std::span<const double> t,
                                              double percent) {
  std::vector<double> cleaned(t.begin(), t.end());
  const std::size_t count = ceil_count(percent, t.size());
  if (count == 0) return cleaned;
  const double med = median(t);
  std::vector<std::size_t> order(t.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      const double fa = std::abs(t[a]);
                      const double fb = std::abs(t[b]);
                      return fa > fb || (fa == fb && a < b);
                    });
  for (std::size_t k = 0; k < count; ++k) cleaned[order[k]] = med;
  return cleaned;
}

SubspaceModel fit_truncated(const Matrix<double>& X, const RankRule& rule) {
  Eigen::BDCSVD<Matrix<double>> svd(X, Eigen::ComputeThinU);
  SubspaceModel model;
  model.singular_values = svd.singularValues();
  const int r = rank_from_singular_values(model.singular_values, rule);
  model.U = leading_left_singular_vectors(X, r);
  return model;
}

}  // namespace

const char* to_string(Estimator estimator) noexcept {
  switch (estimator) {
    case Estimator::simple: return "simple";
    case Estimator::elementwise: return "elementwise";
    case Estimator::columnwise: return "columnwise";
  }
  return "simple";
}

Estimator estimator_from_string(const std::string& name) {
  if (name == "simple") return Estimator::simple;
  if (name == "elementwise") return Estimator::elementwise;
  if (name == "columnwise") return Estimator::columnwise;
  throw Error(Errc::invalid_config, "unknown estimator '" + name + "'");
}

int select_rank(const Eigen::Ref<const Vector<double>>& spectrum, double ratio,
                int cap) {
  if (spectrum.size() == 0 || !(spectrum(0) > 0.0)) {
    throw Error(Errc::all_zero_spectrum, "leading spectrum value is zero");
  }
  const double threshold = ratio * spectrum(0);
  int count = 0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    if (spectrum(i) > threshold) ++count;
  }
  return std::clamp(count, 1, std::max(1, cap));
}

int rank_from_singular_values(const Eigen::Ref<const Vector<double>>& singular_values,
                              const RankRule& rule) {
  const Vector<double> eigenvalues = singular_values.cwiseAbs2();
  const int cap = std::min<int>(rule.cap, static_cast<int>(singular_values.size()));
  return select_rank(eigenvalues, rule.ratio, cap);
}

Matrix<double> leading_left_singular_vectors(const Eigen::Ref<const Matrix<double>>& X,
                                             Eigen::Index rank,
                                             Vector<double>* singular_values) {
  Eigen::BDCSVD<Matrix<double>> svd(X, Eigen::ComputeThinU);
  if (singular_values) *singular_values = svd.singularValues();
  Matrix<double> U = svd.matrixU().leftCols(rank);
  for (Eigen::Index j = 0; j < U.cols(); ++j) {
    Eigen::Index pivot = 0;
    U.col(j).cwiseAbs().maxCoeff(&pivot);
    if (U(pivot, j) < 0.0) U.col(j) = -U.col(j);
  }
  return U;
}

double median(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::invalid_input, "median of empty sample");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double result = v[mid];
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    result = 0.5 * (result + lower);
  }
  return result;
}

SubspaceModel estimate_simple(std::span<const double> t, Eigen::Index window_size,
                              double beta_percent, const RankRule& rule) {
  require_length(t, window_size);
  const auto cleaned = replace_largest_by_median(t, beta_percent);
  return fit_truncated(build_trajectory<double>(cleaned, window_size), rule);
}

SubspaceModel estimate_elementwise(std::span<const double> t,
                                   Eigen::Index window_size, double alpha_percent,
                                   const RankRule& rule) {
  require_length(t, window_size);
  Matrix<double> X = build_trajectory<double>(t, window_size);
  const auto cleaned = replace_largest_by_median(t, alpha_percent);
  const Matrix<double> Q = build_trajectory<double>(cleaned, window_size);

  Vector<double> q_spectrum;
  Eigen::BDCSVD<Matrix<double>> q_svd(Q, Eigen::ComputeThinU);
  q_spectrum = q_svd.singularValues();
  const int r = rank_from_singular_values(q_spectrum, rule);
  const Matrix<double> U0 = leading_left_singular_vectors(Q, r);

  const Matrix<double> E = (X - U0 * (U0.transpose() * X)).cwiseAbs();
  const std::size_t total = static_cast<std::size_t>(X.size());
  const std::size_t count = ceil_count(alpha_percent, total);
  if (count > 0) {
    const Matrix<double> fit = U0 * (U0.transpose() * Q);
    std::vector<Eigen::Index> order(total);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const double* e = E.data();
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count),
                      order.end(), [&](Eigen::Index a, Eigen::Index b) {
                        return e[a] > e[b] || (e[a] == e[b] && a < b);
                      });
    for (std::size_t k = 0; k < count; ++k) X.data()[order[k]] = fit.data()[order[k]];
  }

  SubspaceModel model;
  model.U = leading_left_singular_vectors(X, r, &model.singular_values);
  return model;
}

Vector<double> column_outlier_scores(const Eigen::Ref<const Matrix<double>>& X,
                                     const RankRule& rule) {
  Matrix<double> normalized = X;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double norm = X.col(j).norm();
    if (norm > 0.0) normalized.col(j) /= norm;
  }
  Vector<double> spectrum;
  Eigen::BDCSVD<Matrix<double>> svd(normalized, Eigen::ComputeThinU);
  spectrum = svd.singularValues();
  const int r = rank_from_singular_values(spectrum, rule);
  const Matrix<double> V = svd.matrixU().leftCols(r);
  Vector<double> scores(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double energy = normalized.col(j).squaredNorm();
    scores(j) = energy > 0.0
                    ? std::max(0.0, 1.0 - (V.transpose() * normalized.col(j)).squaredNorm())
                    : 0.0;
  }
  return scores;
}

SubspaceModel estimate_columnwise(std::span<const double> t,
                                  Eigen::Index window_size, double drop_percent,
                                  const RankRule& rule) {
  require_length(t, window_size);
  if (drop_percent >= 100.0) {
    throw Error(Errc::all_columns_dropped, "drop_percent must be below 100");
  }
  const Matrix<double> X = build_trajectory<double>(t, window_size);
  const std::size_t cols = static_cast<std::size_t>(X.cols());
  const std::size_t drop = ceil_count(drop_percent, cols);
  if (drop >= cols) throw Error(Errc::all_columns_dropped, "every column dropped");
  if (drop == 0) return fit_truncated(X, rule);

  const Vector<double> scores = column_outlier_scores(X, rule);
  std::vector<Eigen::Index> order(cols);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return scores(a) > scores(b);
  });
  std::vector<Eigen::Index> kept(order.begin() + static_cast<std::ptrdiff_t>(drop),
                                 order.end());
  std::sort(kept.begin(), kept.end());
  Matrix<double> retained(X.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    retained.col(static_cast<Eigen::Index>(k)) = X.col(kept[k]);
  }
  return fit_truncated(retained, rule);
}

SubspaceModel estimate(Estimator estimator, std::span<const double> t,
                       Eigen::Index window_size, const RankRule& rule) {
  switch (estimator) {
    case Estimator::simple: return estimate_simple(t, window_size, 1.0, rule);
    case Estimator::elementwise: return estimate_elementwise(t, window_size, 3.0, rule);
    case Estimator::columnwise: return estimate_columnwise(t, window_size, 5.0, rule);
  }
  return estimate_simple(t, window_size, 1.0, rule);
}

double max_principal_angle_deg(const Eigen::Ref<const Matrix<double>>& A,
                               const Eigen::Ref<const Matrix<double>>& B) {
  if (A.rows() != B.rows()) {
    throw Error(Errc::dimension_mismatch, "subspaces live in different ambient spaces");
  }
  const Matrix<double> C = A.transpose() * B;
  Eigen::JacobiSVD<Matrix<double>> svd(C);
  const Vector<double> cosines = svd.singularValues();
  const Eigen::Index k = std::min(A.cols(), B.cols());
  const double smallest = std::clamp(cosines(k - 1), -1.0, 1.0);
  return std::acos(smallest) * kRadToDeg;
}

std::string to_json(const SubspaceModel& model) {
  return nlohmann::json(model).dump();
}

SubspaceModel subspace_from_json(const std::string& text) {
  return nlohmann::json::parse(text).get<SubspaceModel>();
}

}  // namespace rpe
