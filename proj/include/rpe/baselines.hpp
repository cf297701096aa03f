#ifndef RPE_BASELINES_HPP
#define RPE_BASELINES_HPP

#include <deque>
#include <memory>
#include <span>
#include <string>

#include "rpe/detector.hpp"

namespace rpe {

enum class Method { rpe, spe, iid, ar };

const char* to_string(Method method) noexcept;
Method method_from_string(const std::string& name);

/// Common step-wise interface: train on a prefix, then return one anomaly
/// score per new sample, bigger meaning more anomalous.
class StreamingScorer {
 public:
  virtual ~StreamingScorer() = default;
  virtual void train(std::span<const double> t_train) = 0;
  virtual double score(double v) = 0;
  virtual Method method() const noexcept = 0;
};

/// RPE or SPE behind the scorer interface; the score is |residual|.
class ProjectionScorer final : public StreamingScorer {
 public:
  explicit ProjectionScorer(DetectorConfig config) : config_(std::move(config)) {}
  void train(std::span<const double> t_train) override;
  double score(double v) override { return detector_.step(v).abs_residual; }
  Method method() const noexcept override {
    return config_.projection == ProjectionMode::simple ? Method::spe : Method::rpe;
  }
  const Detector& detector() const noexcept { return detector_; }

 private:
  DetectorConfig config_;
  Detector detector_;
};

/// SPE: the RPE pipeline with the plain least-squares projection.
DetectorConfig spe_config(DetectorConfig config);
Detector spe_train(std::span<const double> t_train, const DetectorConfig& config);
ScoreRecord spe_step(Detector& state, double v);

/// Gaussian scorer over a ring buffer of the most recent observations.
class IidDetector final : public StreamingScorer {
 public:
  explicit IidDetector(std::size_t buffer_size = 100) : capacity_(buffer_size) {}

  /// Seeds the buffer with the last `buffer_size` training samples.
  void train(std::span<const double> t_train) override;

  /// 1 - two-sided Gaussian p-value of v under the buffer's mean and
  /// variance; v then enters the buffer. Zero variance scores 1 for any v
  /// different from the mean and 0 otherwise.
  double score(double v) override;
  Method method() const noexcept override { return Method::iid; }

  double mean() const noexcept;
  double variance() const noexcept;  // population variance of the buffer
  std::size_t size() const noexcept { return buffer_.size(); }

 private:
  std::size_t capacity_;
  std::deque<double> buffer_;
};

struct ArConfig {
  Eigen::Index order = 30;
  std::size_t retrain_every = 100;
  std::size_t t_max = 300;
  std::size_t retrain_stop_len = 300;
  double ridge = 1e-8;  // damping used only when the design is singular
};

/// Autoregressive forecaster without intercept: residual = v - w^T x where x
/// holds the previous `order` samples.
class ArDetector final : public StreamingScorer {
 public:
  explicit ArDetector(ArConfig config = {}) : config_(config) {}
  void train(std::span<const double> t_train) override;
  double score(double v) override { return std::abs(step(v)); }
  Method method() const noexcept override { return Method::ar; }

  /// Signed residual of v against the forecast from the stored history.
  double step(double v);

  const Vector<double>& weights() const noexcept { return weights_; }
  bool used_ridge() const noexcept { return used_ridge_; }

 private:
  void fit();

  ArConfig config_;
  Vector<double> weights_;
  std::vector<double> history_;
  std::size_t counter_ = 0;
  std::size_t stream_length_ = 0;
  bool used_ridge_ = false;
};

/// Least-squares AR weights predicting t(k) from t(k - order .. k - 1).
/// Falls back to ridge damping when the design matrix is rank deficient.
Vector<double> fit_ar_weights(std::span<const double> t, Eigen::Index order,
                              double ridge = 1e-8, bool* used_ridge = nullptr);

std::unique_ptr<StreamingScorer> make_scorer(Method method, const DetectorConfig& config);

}  // namespace rpe

#endif  // RPE_BASELINES_HPP
