#ifndef RPE_EVAL_HPP
#define RPE_EVAL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rpe/baselines.hpp"
#include "rpe/synth.hpp"

namespace rpe {

struct PrCurvePoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// One point per distinct score, predicting positive when score >= threshold,
/// ordered from the highest threshold down. With tolerance k > 0 a prediction
/// is a true positive when a labelled stamp lies within k stamps, and a label
/// is recalled when a prediction lies within k stamps.
std::vector<PrCurvePoint> pr_curve(std::span<const double> scores,
                                   const std::vector<bool>& labels,
                                   std::size_t tolerance = 0);

/// Best-F1 point of pr_curve; ties go to the higher precision, then to the
/// higher threshold. Throws NoPositives when no label is set.
PrCurvePoint max_f1(std::span<const double> scores, const std::vector<bool>& labels,
                    std::size_t tolerance = 0);

struct MethodSummary {
  Method method = Method::rpe;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::vector<PrCurvePoint> per_run;
};

struct BenchmarkReport {
  std::string scenario;
  std::size_t runs = 0;
  std::size_t train_len = 0;
  std::size_t total_len = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<MethodSummary> methods;

  const MethodSummary& at(Method method) const;
};

struct Scenario {
  std::string name = "custom";
  SynthSpec synth;
  AnomalySpec anomaly;
  std::vector<Method> methods{Method::rpe, Method::spe, Method::iid, Method::ar};
  std::size_t n_runs = 20;
  std::size_t train_len = 100;
  std::size_t total_len = 300;
  DetectorConfig config;
  std::uint64_t seed = 1;
  std::size_t tolerance = 0;
};

/// The synthetic benchmark presets: 1 (amplitude f), 2 (f/2), 3 (runs of 2,
/// f/1.5) and 4 (runs of 4, f/1.5).
Scenario table_scenario(int table);

/// Per-run scores kept for curve export.
struct RunTrace {
  std::uint64_t seed = 0;
  Method method = Method::rpe;
  std::vector<double> scores;
  std::vector<bool> labels;
};

/// Scores every method on one labelled series: train on the first
/// train_len stamps, score the rest, max-F1 over the scored region.
std::vector<PrCurvePoint> evaluate_series(const TimeSeries& series,
                                          const std::vector<Method>& methods,
                                          std::size_t train_len,
                                          const DetectorConfig& config,
                                          std::size_t tolerance = 0,
                                          std::vector<RunTrace>* traces = nullptr);

BenchmarkReport run_scenario(const Scenario& scenario,
                             std::vector<RunTrace>* traces = nullptr);

/// Generates run `run` of a scenario: clean synthetic series plus anomalies.
TimeSeries scenario_series(const Scenario& scenario, std::uint64_t run_seed);
std::uint64_t run_seed(const Scenario& scenario, std::size_t run);

/// Aggregates per-run curve points into means.
BenchmarkReport summarize(const std::string& name, const std::vector<Method>& methods,
                          const std::vector<std::vector<PrCurvePoint>>& per_run,
                          std::vector<std::uint64_t> seeds, std::size_t train_len,
                          std::size_t total_len);

}  // namespace rpe

#endif  // RPE_EVAL_HPP
