#include "rpe/baselines.hpp"

#include <cmath>
#include <numeric>

namespace rpe {

const char* to_string(Method method) noexcept {
  switch (method) {
    case Method::rpe: return "rpe";
    case Method::spe: return "spe";
    case Method::iid: return "iid";
    case Method::ar: return "ar";
  }
  return "rpe";
}

Method method_from_string(const std::string& name) {
  if (name == "rpe") return Method::rpe;
  if (name == "spe") return Method::spe;
  if (name == "iid") return Method::iid;
  if (name == "ar") return Method::ar;
  throw Error(Errc::invalid_config, "unknown method '" + name + "'");
}

void ProjectionScorer::train(std::span<const double> t_train) {
  detector_ = Detector::train(t_train, config_);
}

DetectorConfig spe_config(DetectorConfig config) {
  config.projection = ProjectionMode::simple;
  return config;
}

Detector spe_train(std::span<const double> t_train, const DetectorConfig& config) {
  return Detector::train(t_train, spe_config(config));
}

ScoreRecord spe_step(Detector& state, double v) { return state.step(v); }

void IidDetector::train(std::span<const double> t_train) {
  buffer_.clear();
  const std::size_t keep = std::min(capacity_, t_train.size());
  buffer_.assign(t_train.end() - static_cast<std::ptrdiff_t>(keep), t_train.end());
}

double IidDetector::mean() const noexcept {
  if (buffer_.empty()) return 0.0;
  return std::accumulate(buffer_.begin(), buffer_.end(), 0.0) /
         static_cast<double>(buffer_.size());
}

double IidDetector::variance() const noexcept {
  if (buffer_.empty()) return 0.0;
  const double mu = mean();
  double acc = 0.0;
  for (const double v : buffer_) acc += (v - mu) * (v - mu);
  return acc / static_cast<double>(buffer_.size());
}

double IidDetector::score(double v) {
  if (buffer_.empty()) throw Error(Errc::not_trained, "IID buffer is empty");
  const double mu = mean();
  const double var = variance();
  double s = 0.0;
  if (var <= 0.0) {
    s = v != mu ? 1.0 : 0.0;
  } else {
    const double z = std::abs(v - mu) / std::sqrt(var);
    // 1 - p with p = 2 (1 - Phi(|z|)) reduces to erf(|z| / sqrt 2).
    s = std::erf(z / std::sqrt(2.0));
  }
  buffer_.push_back(v);
  if (buffer_.size() > capacity_) buffer_.pop_front();
  return s;
}

Vector<double> fit_ar_weights(std::span<const double> t, Eigen::Index order,
                              double ridge, bool* used_ridge) {
  const auto n = static_cast<Eigen::Index>(t.size());
  if (n < 2 * order) {
    throw Error(Errc::series_too_short, "AR training needs at least 2 * order samples");
  }
  const Eigen::Index rows = n - order;
  Matrix<double> A(rows, order);
  Vector<double> y(rows);
  for (Eigen::Index k = 0; k < rows; ++k) {
    A.row(k) = Eigen::Map<const Vector<double>>(t.data() + k, order).transpose();
    y(k) = t[static_cast<std::size_t>(k + order)];
  }
  Eigen::ColPivHouseholderQR<Matrix<double>> qr(A);
  if (qr.rank() == order) {
    if (used_ridge) *used_ridge = false;
    return qr.solve(y);
  }
  // Singular normal equations: solve the damped system as an augmented
  // least-squares problem [A; sqrt(ridge) I] w = [y; 0].
  Matrix<double> augmented(rows + order, order);
  augmented << A, std::sqrt(ridge) * Matrix<double>::Identity(order, order);
  Vector<double> rhs = Vector<double>::Zero(rows + order);
  rhs.head(rows) = y;
  if (used_ridge) *used_ridge = true;
  return augmented.householderQr().solve(rhs);
}

void ArDetector::train(std::span<const double> t_train) {
  history_.assign(t_train.begin(), t_train.end());
  stream_length_ = t_train.size();
  fit();
}

void ArDetector::fit() {
  const std::size_t keep = std::min(history_.size(), config_.t_max);
  weights_ = fit_ar_weights(
      std::span<const double>(history_.data() + (history_.size() - keep), keep),
      config_.order, config_.ridge, &used_ridge_);
  counter_ = 0;
}

double ArDetector::step(double v) {
  if (weights_.size() == 0) throw Error(Errc::not_trained, "call ArDetector::train first");
  const auto p = static_cast<std::size_t>(config_.order);
  const Vector<double> x =
      Eigen::Map<const Vector<double>>(history_.data() + (history_.size() - p), config_.order);
  const double residual = v - weights_.dot(x);
  history_.push_back(v);
  ++counter_;
  ++stream_length_;
  if (counter_ % config_.retrain_every == 0 && stream_length_ < config_.retrain_stop_len) {
    fit();
  }
  const std::size_t cap = std::max(config_.t_max, p);
  if (history_.size() > 2 * cap) {
    history_.erase(history_.begin(), history_.end() - static_cast<std::ptrdiff_t>(cap));
  }
  return residual;
}

std::unique_ptr<StreamingScorer> make_scorer(Method method, const DetectorConfig& config) {
  switch (method) {
    case Method::rpe: {
      DetectorConfig c = config;
      c.projection = ProjectionMode::robust;
      return std::make_unique<ProjectionScorer>(c);
    }
    case Method::spe: return std::make_unique<ProjectionScorer>(spe_config(config));
    case Method::iid: return std::make_unique<IidDetector>(100);
    case Method::ar: {
      ArConfig ar;
      ar.retrain_every = config.retrain_every;
      ar.t_max = config.t_max;
      ar.retrain_stop_len = config.effective_retrain_stop_len();
      return std::make_unique<ArDetector>(ar);
    }
  }
  return nullptr;
}

}  // namespace rpe
