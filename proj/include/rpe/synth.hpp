#ifndef RPE_SYNTH_HPP
#define RPE_SYNTH_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "rpe/trajectory.hpp"

namespace rpe {

/// Four-cosine seasonal generator t(j) = sum_k z_k cos(2 pi j / P_k + psi_k) + noise.
struct SynthSpec {
  std::array<double, 4> weights{2.0, 1.6, 1.2, 0.8};
  std::array<std::pair<double, double>, 4> period_ranges{
      {{40.0, 70.0}, {20.0, 40.0}, {10.0, 20.0}, {2.0, 6.0}}};
  // When set, these periods are used instead of sampling from the ranges.
  std::optional<std::array<double, 4>> fixed_periods;
  double noise_sigma = 0.1;
  std::size_t length = 300;
  std::uint64_t seed = 0;
};

struct AnomalySpec {
  double fraction = 0.04;
  double amplitude_factor = 1.0;  // anomaly size is amplitude_factor * f
  std::size_t run_length = 1;
  std::size_t exclude_prefix = 100;  // stamps kept free of anomalies
  // Share of runs using amplitude_factor; the rest use statistical_factor.
  double contextual_fraction = 1.0;
  double statistical_factor = 3.0;
  std::uint64_t seed = 0;
};

/// Periods and phases actually drawn for a series (for diagnostics).
struct SynthDraw {
  std::array<double, 4> periods{};
  std::array<double, 4> phases{};
};

TimeSeries generate_clean(const SynthSpec& spec, SynthDraw* draw = nullptr);

/// Linear-interpolation quantile between order statistics (type 7).
double quantile(std::span<const double> values, double q);

/// f = q(0.9) - q(0.1), the amplitude scale of injected anomalies.
double amplitude_scale(std::span<const double> values);

/// Adds sign * c * f to each stamp of round(fraction * n) anomalous stamps,
/// grouped in non-overlapping runs of run_length separated by at least one
/// clean stamp. Run starts are drawn uniformly over all feasible layouts
/// after the excluded prefix. Labels mark exactly the modified stamps; any
/// labels already on the input are kept.
/// A zero fraction returns the input unchanged.
TimeSeries inject_anomalies(const TimeSeries& t, const AnomalySpec& spec);

}  // namespace rpe

#endif  // RPE_SYNTH_HPP
