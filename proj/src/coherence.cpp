#include "rpe/coherence.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace rpe {
namespace {

double l1_of_direction(const Eigen::Ref<const Matrix<double>>& U,
                       const Vector<double>& h) {
  return (U * h).lpNorm<1>() / h.norm();
}

// Direction orthogonal to the r - 1 rows of U where |U h| is smallest.
double polish_at_vertex(const Eigen::Ref<const Matrix<double>>& U,
                        const Vector<double>& h) {
  const Eigen::Index r = U.cols();
  if (r == 1) return l1_of_direction(U, h);
  const Vector<double> uh = (U * h).cwiseAbs();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(U.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::partial_sort(order.begin(), order.begin() + (r - 1), order.end(),
                    [&](Eigen::Index a, Eigen::Index b) {
                      return uh(a) < uh(b) || (uh(a) == uh(b) && a < b);
                    });
  Matrix<double> pinned(r - 1, r);
  for (Eigen::Index k = 0; k < r - 1; ++k) pinned.row(k) = U.row(order[k]);
  Eigen::JacobiSVD<Matrix<double>> svd(pinned, Eigen::ComputeFullV);
  const Vector<double> v = svd.matrixV().col(r - 1);
  return std::min(l1_of_direction(U, v), l1_of_direction(U, h));
}

}  // namespace

void require_orthonormal(const Eigen::Ref<const Matrix<double>>& U,
                         double tolerance) {
  if (U.cols() == 0 || U.rows() < U.cols()) {
    throw Error(Errc::not_orthonormal, "basis must be tall with r >= 1");
  }
  const Matrix<double> gram = U.transpose() * U;
  const double err =
      (gram - Matrix<double>::Identity(U.cols(), U.cols())).cwiseAbs().maxCoeff();
  if (!(err <= tolerance)) {
    throw Error(Errc::not_orthonormal,
                "max |U^T U - I| = " + std::to_string(err));
  }
}

double mu_squared(const Eigen::Ref<const Matrix<double>>& U) {
  require_orthonormal(U);
  return U.rowwise().squaredNorm().maxCoeff() / static_cast<double>(U.cols());
}

double gamma_estimate(const Eigen::Ref<const Matrix<double>>& U,
                      const GammaOptions& options) {
  require_orthonormal(U);
  const Eigen::Index r = U.cols();
  if (r == 1) return 1.0 / U.col(0).lpNorm<1>();

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double best = std::numeric_limits<double>::infinity();
  const int starts = std::max(1, options.n_starts);
  for (int s = 0; s < starts; ++s) {
    Vector<double> h(r);
    for (Eigen::Index k = 0; k < r; ++k) h(k) = normal(rng);
    h.normalize();
    Vector<double> best_h = h;
    double best_value = l1_of_direction(U, h);
    for (int it = 1; it <= options.iterations; ++it) {
      const Vector<double> sign = (U * h).unaryExpr(
          [](double v) { return static_cast<double>((v > 0) - (v < 0)); });
      Vector<double> g = U.transpose() * sign;
      g -= h.dot(g) * h;  // tangent component
      const double gnorm = g.norm();
      if (gnorm < 1e-14) break;
      h -= (0.5 / std::sqrt(static_cast<double>(it))) * g / gnorm;
      h.normalize();
      const double value = l1_of_direction(U, h);
      if (value < best_value) {
        best_value = value;
        best_h = h;
      }
    }
    best = std::min(best, polish_at_vertex(U, best_h));
  }
  return 1.0 / best;
}

double kappa_estimate(const Eigen::Ref<const Matrix<double>>& U,
                      const GammaOptions& options) {
  return std::sqrt(mu_squared(U)) * gamma_estimate(U, options);
}

CoherenceReport coherence_report(const Eigen::Ref<const Matrix<double>>& U,
                                 const GammaOptions& options) {
  CoherenceReport report;
  report.mu_squared = mu_squared(U);
  report.gamma_estimate = gamma_estimate(U, options);
  report.kappa_estimate = std::sqrt(report.mu_squared) * report.gamma_estimate;
  report.gamma_is_exact = U.cols() == 1;
  return report;
}

}  // namespace rpe
