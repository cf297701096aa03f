#include "rpe/trajectory.hpp"

#include <cmath>

namespace rpe {

TimeSeries::TimeSeries(std::vector<double> values,
                       std::optional<std::vector<bool>> labels,
                       std::vector<std::string> timestamps)
    : values_(std::move(values)),
      labels_(std::move(labels)),
      timestamps_(std::move(timestamps)) {
  if (values_.empty()) {
    throw Error(Errc::invalid_input, "time series must hold at least one sample");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(Errc::invalid_input,
                  "non-finite value at index " + std::to_string(i));
    }
  }
  if (labels_ && labels_->size() != values_.size()) {
    throw Error(Errc::invalid_input, "label count " +
                                         std::to_string(labels_->size()) +
                                         " does not match value count " +
                                         std::to_string(values_.size()));
  }
  if (!timestamps_.empty() && timestamps_.size() != values_.size()) {
    throw Error(Errc::invalid_input, "timestamp count does not match values");
  }
}

}  // namespace rpe
