#include "rpe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <random>

namespace rpe {

TimeSeries generate_clean(const SynthSpec& spec, SynthDraw* draw) {
  if (spec.length < 1) throw Error(Errc::invalid_input, "length must be positive");
  std::mt19937_64 rng(spec.seed);
  SynthDraw d;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto [lo, hi] = spec.period_ranges[k];
    d.periods[k] = std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  if (spec.fixed_periods) d.periods = *spec.fixed_periods;
  for (std::size_t k = 0; k < 4; ++k) {
    d.phases[k] = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
  }
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> values(spec.length);
  for (std::size_t j = 0; j < spec.length; ++j) {
    double v = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      v += spec.weights[k] *
           std::cos(2.0 * std::numbers::pi * static_cast<double>(j + 1) / d.periods[k] +
                    d.phases[k]);
    }
    const double n = noise(rng);
    values[j] = v + spec.noise_sigma * n;
  }
  if (draw) *draw = d;
  return TimeSeries(std::move(values), std::vector<bool>(spec.length, false));
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw Error(Errc::invalid_input, "quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw Error(Errc::invalid_input, "q must lie in [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double amplitude_scale(std::span<const double> values) {
  return quantile(values, 0.9) - quantile(values, 0.1);
}

TimeSeries inject_anomalies(const TimeSeries& t, const AnomalySpec& spec) {
  const std::size_t n = t.size();
  const auto count = static_cast<std::size_t>(std::llround(spec.fraction * static_cast<double>(n)));
  if (spec.run_length < 1) throw Error(Errc::invalid_input, "run_length must be >= 1");
  if (spec.fraction == 0.0) {
    std::vector<bool> labels(n, false);
    if (t.labels()) labels = *t.labels();
    return TimeSeries({t.values().begin(), t.values().end()}, std::move(labels), t.timestamps());
  }
  if (count < 1) throw Error(Errc::cannot_place, "fraction * n rounds to zero stamps");

  const std::size_t runs = (count + spec.run_length - 1) / spec.run_length;
  const std::size_t available = n > spec.exclude_prefix ? n - spec.exclude_prefix : 0;
  // Stars and bars: `runs` blocks of (length + 1 gap) placed in available + 1 slots.
  const std::size_t needed = count + (runs - 1);
  if (needed > available) {
    throw Error(Errc::cannot_place, std::to_string(runs) + " runs need " +
                                        std::to_string(needed) + " stamps, only " +
                                        std::to_string(available) + " available");
  }
  const std::size_t slack = available - needed;

  std::mt19937_64 rng(spec.seed);
  // Uniform combination of `runs` distinct positions out of slack + runs.
  std::vector<std::size_t> slots(slack + runs);
  std::iota(slots.begin(), slots.end(), std::size_t{0});
  for (std::size_t i = 0; i < runs; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, slots.size() - 1);
    std::swap(slots[i], slots[pick(rng)]);
  }
  std::vector<std::size_t> chosen(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(runs));
  std::sort(chosen.begin(), chosen.end());

  const double f = amplitude_scale(t.values());
  std::vector<double> values(t.values().begin(), t.values().end());
  std::vector<bool> labels = t.labels().value_or(std::vector<bool>(n, false));
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution contextual(std::clamp(spec.contextual_fraction, 0.0, 1.0));

  std::size_t placed = 0;
  for (std::size_t i = 0; i < runs; ++i) {
    // Block i sits after (chosen[i] - i) free stamps, i gap stamps and the
    // earlier blocks: start = prefix + chosen[i] + placed.
    const std::size_t length = std::min(spec.run_length, count - placed);
    const std::size_t start = spec.exclude_prefix + chosen[i] + placed;
    const double sign = coin(rng) ? 1.0 : -1.0;
    const double factor = contextual(rng) ? spec.amplitude_factor : spec.statistical_factor;
    for (std::size_t k = 0; k < length; ++k) {
      values[start + k] += sign * factor * f;
      labels[start + k] = true;
    }
    placed += length;
  }
  return TimeSeries(std::move(values), std::move(labels), t.timestamps());
}

}  // namespace rpe
