#ifndef RPE_DETECTOR_HPP
#define RPE_DETECTOR_HPP

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "rpe/projection.hpp"
#include "rpe/subspace.hpp"

namespace rpe {

enum class ProjectionMode { robust, simple };

const char* to_string(ProjectionMode mode) noexcept;
ProjectionMode projection_mode_from_string(const std::string& name);

struct DetectorConfig {
  Eigen::Index window_size = 30;  // M1
  Eigen::Index n_s = 5;           // corrupted stamps tolerated per window
  double cdf_threshold = 0.95;
  std::size_t retrain_every = 100;
  std::size_t t_max = 300;
  // Retraining stops once the stream reaches this many samples; unset means
  // 10 * window_size.
  std::optional<std::size_t> retrain_stop_len;
  Estimator estimator = Estimator::simple;
  bool replace_anomalous_values = true;
  std::size_t memory_cap = 0;  // 0 keeps every residual
  int rank_cap = 10;
  double rank_ratio = 0.01;
  ProjectionMode projection = ProjectionMode::robust;

  std::size_t effective_retrain_stop_len() const noexcept {
    return retrain_stop_len.value_or(10 * static_cast<std::size_t>(window_size));
  }
  RankRule rank_rule() const noexcept { return {rank_ratio, rank_cap}; }

  /// Throws InvalidConfig on n_s + rank_cap > window_size, a threshold outside
  /// (0, 1), or a zero period.
  void validate() const;
};

/// Multiset of past |residual| values queried through its empirical CDF.
class ResidualMemory {
 public:
  explicit ResidualMemory(std::size_t capacity = 0) : capacity_(capacity) {}

  /// Fraction of stored values strictly below `value`; 0 when empty.
  double cdf(double value) const noexcept;
  void insert(double value);

  std::size_t size() const noexcept { return sorted_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  /// Values in insertion order (oldest first).
  const std::deque<double>& arrivals() const noexcept { return arrivals_; }

 private:
  std::size_t capacity_;
  std::vector<double> sorted_;
  std::deque<double> arrivals_;
};

struct ScoreRecord {
  std::size_t index = 0;  // ordinal of the step since training
  double value = 0.0;
  double residual = 0.0;
  double abs_residual = 0.0;
  double cdf_score = 0.0;
  bool flagged = false;
  std::optional<double> replaced_value;
};

/// Streaming detector over one series. A default-constructed detector is
/// untrained; use Detector::train. Not thread-safe: one stream per instance.
class Detector {
 public:
  Detector() = default;

  static Detector train(std::span<const double> t_train, const DetectorConfig& config);
  static Detector train(const TimeSeries& t_train, const DetectorConfig& config) {
    return train(t_train.values(), config);
  }

  /// Rebuilds a detector from persisted state without refitting.
  static Detector restore(const DetectorConfig& config, SubspaceModel model,
                          std::vector<double> history, ResidualMemory memory,
                          std::size_t counter, std::size_t stream_length);

  ScoreRecord step(double v);
  std::vector<ScoreRecord> score_series(std::span<const double> t);

  bool trained() const noexcept { return model_.has_value(); }
  const DetectorConfig& config() const noexcept { return config_; }
  const SubspaceModel& model() const;
  const ResidualMemory& memory() const noexcept { return memory_; }
  const std::vector<double>& history() const noexcept { return history_; }
  std::size_t counter() const noexcept { return counter_; }
  std::size_t stream_length() const noexcept { return stream_length_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t retrain_count() const noexcept { return retrains_; }

 private:
  struct Projected {
    Vector<double> a_hat;
  };
  Projected project(const Vector<double>& window) const;
  void refit();
  void trim_history();

  DetectorConfig config_;
  std::optional<SubspaceModel> model_;
  ResidualMemory memory_;
  std::vector<double> history_;
  std::size_t counter_ = 0;
  std::size_t stream_length_ = 0;
  std::size_t steps_ = 0;
  std::size_t retrains_ = 0;
};

}  // namespace rpe

#endif  // RPE_DETECTOR_HPP
