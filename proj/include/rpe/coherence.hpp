#ifndef RPE_COHERENCE_HPP
#define RPE_COHERENCE_HPP

#include <cstdint>

#include "rpe/trajectory.hpp"

namespace rpe {

/// Incoherence of an orthonormal basis with respect to the standard basis.
/// Small values mean the span holds no sparse vectors.
struct CoherenceReport {
  double mu_squared = 0.0;      // max_i ||row_i(U)||^2 / r
  double gamma_estimate = 0.0;  // 1 / min_{||h||=1} ||U h||_1
  double kappa_estimate = 0.0;  // sqrt(mu_squared) * gamma_estimate
  bool gamma_is_exact = false;
};

struct GammaOptions {
  int n_starts = 64;
  int iterations = 400;
  std::uint64_t seed = 0;
};

/// Throws NotOrthonormal unless ||U^T U - I||_max <= tolerance.
void require_orthonormal(const Eigen::Ref<const Matrix<double>>& U,
                         double tolerance = 1e-8);

double mu_squared(const Eigen::Ref<const Matrix<double>>& U);

/// Multi-start projected subgradient descent of ||U h||_1 over the unit
/// sphere. Each start finishes with a vertex polish: the r - 1 smallest
/// entries of U h are pinned to zero and the remaining direction is
/// evaluated, since the minimum of a polyhedral norm on the sphere sits on
/// such a vertex. The result is deterministic for a given seed.
double gamma_estimate(const Eigen::Ref<const Matrix<double>>& U,
                      const GammaOptions& options = {});

double kappa_estimate(const Eigen::Ref<const Matrix<double>>& U,
                      const GammaOptions& options = {});

CoherenceReport coherence_report(const Eigen::Ref<const Matrix<double>>& U,
                                 const GammaOptions& options = {});

}  // namespace rpe

#endif  // RPE_COHERENCE_HPP
