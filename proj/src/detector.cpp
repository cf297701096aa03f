#include "rpe/detector.hpp"

#include <algorithm>
#include <cmath>

namespace rpe {

const char* to_string(ProjectionMode mode) noexcept {
  return mode == ProjectionMode::simple ? "simple" : "robust";
}

ProjectionMode projection_mode_from_string(const std::string& name) {
  if (name == "robust") return ProjectionMode::robust;
  if (name == "simple") return ProjectionMode::simple;
  throw Error(Errc::invalid_config, "unknown projection '" + name + "'");
}

void DetectorConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::invalid_config, msg); };
  if (window_size < 2) fail("M1 must be at least 2");
  if (n_s < 0) fail("n_s must be non-negative");
  if (rank_cap < 1) fail("rank_cap must be positive");
  if (n_s + rank_cap > window_size) {
    fail("n_s + rank_cap = " + std::to_string(n_s + rank_cap) + " exceeds M1 = " +
         std::to_string(window_size));
  }
  if (!(cdf_threshold > 0.0 && cdf_threshold < 1.0)) fail("cdf_threshold must lie in (0, 1)");
  if (retrain_every == 0) fail("retrain_every must be positive");
  if (t_max < 2 * static_cast<std::size_t>(window_size)) fail("t_max must be at least 2 * M1");
  if (!(rank_ratio > 0.0 && rank_ratio < 1.0)) fail("rank_ratio must lie in (0, 1)");
}

double ResidualMemory::cdf(double value) const noexcept {
  if (sorted_.empty()) return 0.0;
  const auto below = std::lower_bound(sorted_.begin(), sorted_.end(), value) - sorted_.begin();
  return static_cast<double>(below) / static_cast<double>(sorted_.size());
}

void ResidualMemory::insert(double value) {
  sorted_.insert(std::upper_bound(sorted_.begin(), sorted_.end(), value), value);
  arrivals_.push_back(value);
  if (capacity_ > 0 && arrivals_.size() > capacity_) {
    const double oldest = arrivals_.front();
    arrivals_.pop_front();
    sorted_.erase(std::lower_bound(sorted_.begin(), sorted_.end(), oldest));
  }
}

Detector Detector::train(std::span<const double> t_train, const DetectorConfig& config) {
  config.validate();
  const auto m1 = static_cast<std::size_t>(config.window_size);
  if (t_train.size() < 2 * m1) {
    throw Error(Errc::series_too_short,
                "training needs at least " + std::to_string(2 * m1) + " samples, got " +
                    std::to_string(t_train.size()));
  }
  Detector d;
  d.config_ = config;
  d.memory_ = ResidualMemory(config.memory_cap);
  const std::size_t keep = std::min(t_train.size(), config.t_max);
  d.history_.assign(t_train.end() - static_cast<std::ptrdiff_t>(keep), t_train.end());
  d.stream_length_ = t_train.size();
  d.refit();

  // Seed the memory with the residual of every complete training window.
  const auto& U = d.model_->U;
  for (std::size_t end = m1; end <= t_train.size(); ++end) {
    const Vector<double> window =
        Eigen::Map<const Vector<double>>(t_train.data() + (end - m1), config.window_size);
    const auto projected = d.project(window);
    const double e = window(window.size() - 1) - U.row(U.rows() - 1).dot(projected.a_hat);
    d.memory_.insert(std::abs(e));
  }
  return d;
}

Detector Detector::restore(const DetectorConfig& config, SubspaceModel model,
                           std::vector<double> history, ResidualMemory memory,
                           std::size_t counter, std::size_t stream_length) {
  config.validate();
  if (model.window_size() != config.window_size) {
    throw Error(Errc::dimension_mismatch, "model M1 differs from config M1");
  }
  if (history.size() < static_cast<std::size_t>(config.window_size)) {
    throw Error(Errc::series_too_short, "stored history shorter than one window");
  }
  Detector d;
  d.config_ = config;
  d.model_ = std::move(model);
  d.history_ = std::move(history);
  d.memory_ = std::move(memory);
  d.counter_ = counter;
  d.stream_length_ = std::max(stream_length, d.history_.size());
  return d;
}

const SubspaceModel& Detector::model() const {
  if (!model_) throw Error(Errc::not_trained, "detector has no model");
  return *model_;
}

Detector::Projected Detector::project(const Vector<double>& window) const {
  const auto& U = model_->U;
  if (config_.projection == ProjectionMode::simple) {
    return {simple_projection(U, window).a_hat};
  }
  return {robust_projection(U, window, config_.n_s).a_hat};
}

void Detector::refit() {
  const std::size_t keep = std::min(history_.size(), config_.t_max);
  const std::span<const double> recent(history_.data() + (history_.size() - keep), keep);
  model_ = estimate(config_.estimator, recent, config_.window_size, config_.rank_rule());
  counter_ = 0;
}

void Detector::trim_history() {
  const std::size_t keep =
      std::max(config_.t_max, static_cast<std::size_t>(config_.window_size));
  if (history_.size() > 2 * keep) {
    history_.erase(history_.begin(),
                   history_.end() - static_cast<std::ptrdiff_t>(keep));
  }
}

ScoreRecord Detector::step(double v) {
  if (!model_) throw Error(Errc::not_trained, "call Detector::train first");
  if (!std::isfinite(v)) throw Error(Errc::invalid_input, "non-finite sample");

  history_.push_back(v);
  ++counter_;
  ++stream_length_;

  const Vector<double> window = last_window<double>(history_, config_.window_size);
  const auto projected = project(window);
  const auto& U = model_->U;
  const double fitted = U.row(U.rows() - 1).dot(projected.a_hat);

  ScoreRecord record;
  record.index = steps_++;
  record.value = v;
  record.residual = v - fitted;
  record.abs_residual = std::abs(record.residual);
  record.cdf_score = memory_.cdf(record.abs_residual);
  memory_.insert(record.abs_residual);
  record.flagged = record.cdf_score > config_.cdf_threshold;
  if (record.flagged && config_.replace_anomalous_values) {
    history_.back() = fitted;
    record.replaced_value = fitted;
  }

  if (counter_ % config_.retrain_every == 0 &&
      stream_length_ < config_.effective_retrain_stop_len()) {
    refit();
    ++retrains_;
  }
  trim_history();
  return record;
}

std::vector<ScoreRecord> Detector::score_series(std::span<const double> t) {
  std::vector<ScoreRecord> records;
  records.reserve(t.size());
  for (const double v : t) records.push_back(step(v));
  return records;
}

}  // namespace rpe
