#include "rpe/eval.hpp"

#include <algorithm>
#include <numeric>

namespace rpe {
namespace {

constexpr double kTieEps = 1e-12;

double f1_of(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

PrCurvePoint point_with_tolerance(std::span<const double> scores,
                                  const std::vector<bool>& labels, double threshold,
                                  std::size_t k) {
  const std::size_t n = scores.size();
  std::size_t predicted = 0, tp = 0, recalled = 0, positives = 0;
  auto window = [&](std::size_t i) {
    const std::size_t lo = i >= k ? i - k : 0;
    const std::size_t hi = std::min(n - 1, i + k);
    return std::pair{lo, hi};
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (scores[i] >= threshold) {
      ++predicted;
      const auto [lo, hi] = window(i);
      for (std::size_t j = lo; j <= hi; ++j) {
        if (labels[j]) {
          ++tp;
          break;
        }
      }
    }
    if (labels[i]) {
      ++positives;
      const auto [lo, hi] = window(i);
      for (std::size_t j = lo; j <= hi; ++j) {
        if (scores[j] >= threshold) {
          ++recalled;
          break;
        }
      }
    }
  }
  PrCurvePoint p;
  p.threshold = threshold;
  p.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
  p.recall = positives ? static_cast<double>(recalled) / static_cast<double>(positives) : 0.0;
  p.f1 = f1_of(p.precision, p.recall);
  return p;
}

}  // namespace

std::vector<PrCurvePoint> pr_curve(std::span<const double> scores,
                                   const std::vector<bool>& labels, std::size_t tolerance) {
  if (scores.size() != labels.size()) {
    throw Error(Errc::dimension_mismatch, "scores and labels differ in length");
  }
  const auto positives =
      static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  if (positives == 0) throw Error(Errc::no_positives, "no positive labels");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<PrCurvePoint> curve;
  if (tolerance > 0) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i > 0 && scores[order[i]] == scores[order[i - 1]]) continue;
      curve.push_back(point_with_tolerance(scores, labels, scores[order[i]], tolerance));
    }
    return curve;
  }

  std::size_t tp = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (labels[order[i]]) ++tp;
    const bool group_end =
        i + 1 == order.size() || scores[order[i + 1]] != scores[order[i]];
    if (!group_end) continue;
    PrCurvePoint p;
    p.threshold = scores[order[i]];
    p.precision = static_cast<double>(tp) / static_cast<double>(i + 1);
    p.recall = static_cast<double>(tp) / static_cast<double>(positives);
    p.f1 = f1_of(p.precision, p.recall);
    curve.push_back(p);
  }
  return curve;
}

PrCurvePoint max_f1(std::span<const double> scores, const std::vector<bool>& labels,
                    std::size_t tolerance) {
  const auto curve = pr_curve(scores, labels, tolerance);
  PrCurvePoint best = curve.front();
  for (const auto& p : curve) {
    if (p.f1 > best.f1 + kTieEps ||
        (std::abs(p.f1 - best.f1) <= kTieEps && p.precision > best.precision + kTieEps)) {
      best = p;
    }
  }
  return best;
}

const MethodSummary& BenchmarkReport::at(Method method) const {
  for (const auto& m : methods)
    if (m.method == method) return m;
  throw Error(Errc::invalid_input, std::string("method not in report: ") + to_string(method));
}

Scenario table_scenario(int table) {
  Scenario s;
  s.synth.noise_sigma = 0.1;
  s.anomaly.fraction = 0.04;
  s.anomaly.exclude_prefix = s.train_len;
  switch (table) {
    case 1:
      s.name = "table1";
      s.anomaly.amplitude_factor = 1.0;
      s.anomaly.run_length = 1;
      break;
    case 2:
      s.name = "table2";
      s.anomaly.amplitude_factor = 0.5;
      s.anomaly.run_length = 1;
      break;
    case 3:
      s.name = "table3";
      s.anomaly.amplitude_factor = 1.0 / 1.5;
      s.anomaly.run_length = 2;
      break;
    case 4:
      s.name = "table4";
      s.anomaly.amplitude_factor = 1.0 / 1.5;
      s.anomaly.run_length = 4;
      break;
    default:
      throw Error(Errc::invalid_config, "unknown table " + std::to_string(table));
  }
  return s;
}

std::uint64_t run_seed(const Scenario& scenario, std::size_t run) {
  return splitmix64(scenario.seed * 0x100000001b3ULL + run);
}

TimeSeries scenario_series(const Scenario& scenario, std::uint64_t seed) {
  SynthSpec synth = scenario.synth;
  synth.length = scenario.total_len;
  synth.seed = seed;
  AnomalySpec anomaly = scenario.anomaly;
  anomaly.seed = splitmix64(seed ^ 0xa5a5a5a5a5a5a5a5ULL);
  return inject_anomalies(generate_clean(synth), anomaly);
}

std::vector<PrCurvePoint> evaluate_series(const TimeSeries& series,
                                          const std::vector<Method>& methods,
                                          std::size_t train_len,
                                          const DetectorConfig& config,
                                          std::size_t tolerance,
                                          std::vector<RunTrace>* traces) {
  if (!series.labels()) throw Error(Errc::invalid_input, "series carries no labels");
  if (train_len >= series.size()) {
    throw Error(Errc::series_too_short, "nothing left to score after training");
  }
  const auto values = series.values();
  const auto train = values.first(train_len);
  const auto test = values.subspan(train_len);
  const std::vector<bool> labels(series.labels()->begin() + static_cast<std::ptrdiff_t>(train_len),
                                 series.labels()->end());
  std::vector<PrCurvePoint> points;
  for (const Method method : methods) {
    auto scorer = make_scorer(method, config);
    scorer->train(train);
    std::vector<double> scores;
    scores.reserve(test.size());
    for (const double v : test) scores.push_back(scorer->score(v));
    points.push_back(max_f1(scores, labels, tolerance));
    if (traces) traces->push_back({0, method, std::move(scores), labels});
  }
  return points;
}

BenchmarkReport summarize(const std::string& name, const std::vector<Method>& methods,
                          const std::vector<std::vector<PrCurvePoint>>& per_run,
                          std::vector<std::uint64_t> seeds, std::size_t train_len,
                          std::size_t total_len) {
  BenchmarkReport report;
  report.scenario = name;
  report.runs = per_run.size();
  report.train_len = train_len;
  report.total_len = total_len;
  report.seeds = std::move(seeds);
  for (std::size_t m = 0; m < methods.size(); ++m) {
    MethodSummary summary;
    summary.method = methods[m];
    for (const auto& run : per_run) summary.per_run.push_back(run[m]);
    const double count = static_cast<double>(per_run.size());
    for (const auto& p : summary.per_run) {
      summary.f1 += p.f1;
      summary.precision += p.precision;
      summary.recall += p.recall;
    }
    if (count > 0) {
      summary.f1 /= count;
      summary.precision /= count;
      summary.recall /= count;
    }
    report.methods.push_back(std::move(summary));
  }
  return report;
}

BenchmarkReport run_scenario(const Scenario& scenario, std::vector<RunTrace>* traces) {
  if (scenario.total_len <= scenario.train_len + static_cast<std::size_t>(scenario.config.window_size)) {
    throw Error(Errc::invalid_config, "total_len must exceed train_len + M1");
  }
  std::vector<std::vector<PrCurvePoint>> per_run;
  std::vector<std::uint64_t> seeds;
  for (std::size_t run = 0; run < scenario.n_runs; ++run) {
    const std::uint64_t seed = run_seed(scenario, run);
    const TimeSeries series = scenario_series(scenario, seed);
    std::vector<RunTrace> run_traces;
    per_run.push_back(evaluate_series(series, scenario.methods, scenario.train_len,
                                      scenario.config, scenario.tolerance,
                                      traces ? &run_traces : nullptr));
    for (auto& t : run_traces) {
      t.seed = seed;
      traces->push_back(std::move(t));
    }
    seeds.push_back(seed);
  }
  return summarize(scenario.name, scenario.methods, per_run, std::move(seeds),
                   scenario.train_len, scenario.total_len);
}

}  // namespace rpe
