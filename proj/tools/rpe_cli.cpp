#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "rpe/coherence.hpp"
#include "rpe/csv.hpp"
#include "rpe/json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rpe::Error(rpe::Errc::invalid_input, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw rpe::Error(rpe::Errc::parse_error, path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw rpe::Error(rpe::Errc::invalid_input, "cannot write " + path);
  out << text << '\n';
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw rpe::Error(rpe::Errc::invalid_input, "cannot write " + path);
  out.precision(17);
  return out;
}

rpe::DetectorConfig load_config(const std::string& path) {
  rpe::DetectorConfig config;
  if (!path.empty()) read_json(path).get_to(config);
  config.validate();
  return config;
}

struct TrainArgs {
  std::string input, config, output;
};

struct DetectArgs {
  std::string model, train, config, input, output, method = "rpe";
};

struct CoherenceArgs {
  std::string input, model;
  long window = 30;
  int starts = 64;
};

struct SynthArgs {
  std::string spec, out;
};

struct BenchArgs {
  std::string scenario = "table1", input, out, curves;
  std::optional<std::size_t> runs;
};

int run_train(const TrainArgs& a, const rpe::CsvReadOptions& csv) {
  const auto series = rpe::read_series_csv_file(a.input, csv);
  const auto detector = rpe::Detector::train(series, load_config(a.config));
  write_text(a.output, rpe::detector_to_json(detector).dump(2));
  return 0;
}

// Every method writes index,value,residual,cdf_score,flagged. For iid the
// residual column carries the 1 - p score; for ar the cdf column ranks |residual|
// against the residuals seen so far in this run.
int run_detect(const DetectArgs& a, const rpe::CsvReadOptions& csv) {
  const auto method = rpe::method_from_string(a.method);
  rpe::Detector detector;
  if (!a.model.empty()) {
    detector = rpe::detector_from_json(read_json(a.model));
  } else {
    const auto train = rpe::read_series_csv_file(a.train, csv);
    detector = rpe::Detector::train(train, load_config(a.config));
  }
  const auto series = rpe::read_series_csv_file(a.input, csv);
  auto out = open_output(a.output);
  out << "index,value,residual,cdf_score,flagged\n";
  auto row = [&](std::size_t i, double v, double e, double cdf, bool flag) {
    out << i << ',' << v << ',' << e << ',' << cdf << ',' << (flag ? 1 : 0) << '\n';
  };

  const auto& config = detector.config();
  switch (method) {
    case rpe::Method::rpe:
    case rpe::Method::spe: {
      auto c = config;
      c.projection = method == rpe::Method::spe ? rpe::ProjectionMode::simple
                                                : rpe::ProjectionMode::robust;
      detector = rpe::Detector::restore(c, detector.model(), detector.history(), detector.memory(),
                                        detector.counter(), detector.stream_length());
      for (const auto& r : detector.score_series(series.values()))
        row(r.index, r.value, r.residual, r.cdf_score, r.flagged);
      break;
    }
    case rpe::Method::iid: {
      rpe::IidDetector iid;
      iid.train(detector.history());
      for (std::size_t i = 0; i < series.size(); ++i) {
        const double s = iid.score(series[i]);
        row(i, series[i], s, s, s > config.cdf_threshold);
      }
      break;
    }
    case rpe::Method::ar: {
      rpe::ArDetector ar;
      ar.train(detector.history());
      rpe::ResidualMemory memory(config.memory_cap);
      for (std::size_t i = 0; i < series.size(); ++i) {
        const double e = ar.step(series[i]);
        const double cdf = memory.cdf(std::abs(e));
        memory.insert(std::abs(e));
        row(i, series[i], e, cdf, cdf > config.cdf_threshold);
      }
      break;
    }
  }
  return 0;
}

int run_coherence(const CoherenceArgs& a, const rpe::CsvReadOptions& csv) {
  rpe::SubspaceModel model;
  if (!a.model.empty()) {
    model = read_json(a.model).get<rpe::SubspaceModel>();
  } else {
    const auto series = rpe::read_series_csv_file(a.input, csv);
    model = rpe::estimate_simple(series.values(), a.window);
  }
  rpe::GammaOptions options;
  options.n_starts = a.starts;
  json j = rpe::coherence_report(model.U, options);
  j["M1"] = model.window_size();
  j["r"] = model.rank();
  write_text("-", j.dump(2));
  return 0;
}

int run_synth(const SynthArgs& a) {
  const json spec = read_json(a.spec);
  for (const auto& [key, value] : spec.items()) {
    if (key != "synth" && key != "anomaly")
      throw rpe::Error(rpe::Errc::invalid_config, "unknown synth spec key '" + key + "'");
  }
  rpe::SynthSpec synth;
  if (spec.contains("synth")) spec.at("synth").get_to(synth);
  auto series = rpe::generate_clean(synth);
  if (spec.contains("anomaly")) series = rpe::inject_anomalies(series, spec.at("anomaly").get<rpe::AnomalySpec>());
  auto out = open_output(a.out);
  rpe::write_series_csv(out, series);
  return 0;
}

rpe::Scenario load_scenario(const std::string& name) {
  for (int t = 1; t <= 4; ++t)
    if (name == "table" + std::to_string(t)) return rpe::table_scenario(t);
  return read_json(name).get<rpe::Scenario>();
}

void emit_curves(const std::string& dir, const std::vector<rpe::RunTrace>& traces,
                 std::size_t tolerance) {
  fs::create_directories(dir);
  std::size_t run = 0;
  std::uint64_t last_seed = traces.empty() ? 0 : traces.front().seed;
  for (const auto& t : traces) {
    if (t.seed != last_seed) {
      ++run;
      last_seed = t.seed;
    }
    const fs::path path = fs::path(dir) / ("run" + std::to_string(run) + "_" + rpe::to_string(t.method) + ".csv");
    auto out = open_output(path.string());
    out << "threshold,precision,recall,f1\n";
    for (const auto& p : rpe::pr_curve(t.scores, t.labels, tolerance))
      out << p.threshold << ',' << p.precision << ',' << p.recall << ',' << p.f1 << '\n';
  }
}

int run_bench(const BenchArgs& a, const rpe::CsvReadOptions& csv) {
  rpe::Scenario scenario = load_scenario(a.scenario);
  if (a.runs) scenario.n_runs = *a.runs;
  std::vector<rpe::RunTrace> traces;
  auto* sink = a.curves.empty() ? nullptr : &traces;

  rpe::BenchmarkReport report;
  if (!a.input.empty()) {
    const auto series = rpe::read_series_csv_file(a.input, csv);
    const auto points = rpe::evaluate_series(series, scenario.methods, scenario.train_len,
                                             scenario.config, scenario.tolerance, sink);
    report = rpe::summarize(fs::path(a.input).filename().string(), scenario.methods, {points},
                            {0}, scenario.train_len, series.size());
  } else {
    report = rpe::run_scenario(scenario, sink);
  }
  if (sink) emit_curves(a.curves, traces, scenario.tolerance);
  write_text(a.out, json(report).dump(2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust-projection anomaly detection for univariate time series"};
  app.require_subcommand(1);
  rpe::CsvReadOptions csv;
  app.add_flag("--impute-median", csv.impute_median,
               "Replace missing CSV values by the series median instead of failing");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Fit a detector on a training series");
  t->add_option("--input", train.input, "Training CSV (timestamp,value[,label])")->required();
  t->add_option("--config", train.config, "Detector config JSON");
  t->add_option("--output", train.output, "Model JSON to write")->required();

  DetectArgs detect;
  auto* d = app.add_subcommand("detect", "Score a series sample by sample");
  auto* model_opt = d->add_option("--model", detect.model, "Model JSON written by train");
  auto* train_opt = d->add_option("--train", detect.train, "Training CSV to fit on the fly");
  model_opt->excludes(train_opt);
  d->add_option("--config", detect.config, "Detector config JSON (with --train)");
  d->add_option("--input", detect.input, "CSV to score")->required();
  d->add_option("--output", detect.output, "Scores CSV to write")->required();
  d->add_option("--method", detect.method, "rpe, spe, iid or ar")
      ->check(CLI::IsMember({"rpe", "spe", "iid", "ar"}));

  CoherenceArgs coh;
  auto* c = app.add_subcommand("coherence", "Report incoherence of a learned subspace");
  auto* coh_in = c->add_option("--input", coh.input, "Series CSV; the subspace is estimated from it");
  auto* coh_model = c->add_option("--model", coh.model, "Model JSON");
  coh_in->excludes(coh_model);
  c->add_option("--window", coh.window, "Window size used with --input");
  c->add_option("--starts", coh.starts, "Random starts of the gamma search");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a labelled synthetic series");
  s->add_option("--spec", synth.spec, "JSON with optional synth and anomaly objects")->required();
  s->add_option("--out", synth.out, "CSV to write")->required();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Max-F1 benchmark of every method");
  b->add_option("--scenario", bench.scenario, "table1..table4 or a scenario JSON file");
  b->add_option("--input", bench.input, "Labelled CSV to evaluate instead of synthetic runs");
  b->add_option("--out", bench.out, "Report JSON to write ('-' for stdout)")->required();
  b->add_option("--emit-curves", bench.curves, "Directory for per-run PR curves");
  b->add_option("--runs", bench.runs, "Override the number of seeded runs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*t) return run_train(train, csv);
    if (*d) {
      if (detect.model.empty() && detect.train.empty())
        throw rpe::Error(rpe::Errc::invalid_input, "detect needs --model or --train");
      return run_detect(detect, csv);
    }
    if (*c) {
      if (coh.model.empty() && coh.input.empty())
        throw rpe::Error(rpe::Errc::invalid_input, "coherence needs --input or --model");
      return run_coherence(coh, csv);
    }
    if (*s) return run_synth(synth);
    if (*b) return run_bench(bench, csv);
  } catch (const rpe::Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", rpe::to_string(e.code()), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
