#include "rpe/json.hpp"

#include <set>

namespace rpe {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const char* what) {
  if (!j.is_object()) throw Error(Errc::invalid_config, std::string(what) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) {
      throw Error(Errc::invalid_config, std::string("unknown ") + what + " key '" + key + "'");
    }
  }
}

template <typename T>
void maybe_get(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace

void to_json(json& j, const SubspaceModel& model) {
  std::vector<double> u;
  u.reserve(static_cast<std::size_t>(model.U.size()));
  for (Eigen::Index i = 0; i < model.U.rows(); ++i)
    for (Eigen::Index k = 0; k < model.U.cols(); ++k) u.push_back(model.U(i, k));
  j = json{{"version", kModelFormatVersion},
           {"M1", model.U.rows()},
           {"r", model.U.cols()},
           {"U", u},
           {"singular_values", std::vector<double>(model.singular_values.data(),
                                                   model.singular_values.data() +
                                                       model.singular_values.size())}};
}

void from_json(const json& j, SubspaceModel& model) {
  try {
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw Error(Errc::parse_error, "unsupported model version " + std::to_string(version));
    }
    const auto m1 = j.at("M1").get<Eigen::Index>();
    const auto r = j.at("r").get<Eigen::Index>();
    const auto u = j.at("U").get<std::vector<double>>();
    if (m1 < 1 || r < 1 || static_cast<Eigen::Index>(u.size()) != m1 * r) {
      throw Error(Errc::parse_error, "U has " + std::to_string(u.size()) +
                                         " entries, expected M1 * r");
    }
    model.U.resize(m1, r);
    for (Eigen::Index i = 0; i < m1; ++i)
      for (Eigen::Index k = 0; k < r; ++k)
        model.U(i, k) = u[static_cast<std::size_t>(i * r + k)];
    const auto sv = j.at("singular_values").get<std::vector<double>>();
    model.singular_values = Eigen::Map<const Vector<double>>(sv.data(), static_cast<Eigen::Index>(sv.size()));
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, e.what());
  }
}

void to_json(json& j, const DetectorConfig& c) {
  j = json{{"M1", c.window_size},
           {"n_s", c.n_s},
           {"cdf_threshold", c.cdf_threshold},
           {"retrain_every", c.retrain_every},
           {"t_max", c.t_max},
           {"retrain_stop_len", c.effective_retrain_stop_len()},
           {"estimator", to_string(c.estimator)},
           {"replace_anomalous_values", c.replace_anomalous_values},
           {"memory_cap", c.memory_cap},
           {"rank_cap", c.rank_cap},
           {"rank_ratio", c.rank_ratio},
           {"projection", to_string(c.projection)}};
}

void from_json(const json& j, DetectorConfig& c) {
  reject_unknown(j,
                 {"M1", "n_s", "cdf_threshold", "retrain_every", "t_max",
                  "retrain_stop_len", "estimator", "replace_anomalous_values", "memory_cap",
                  "rank_cap", "rank_ratio", "projection"},
                 "config");
  try {
    maybe_get(j, "M1", c.window_size);
    maybe_get(j, "n_s", c.n_s);
    maybe_get(j, "cdf_threshold", c.cdf_threshold);
    maybe_get(j, "retrain_every", c.retrain_every);
    maybe_get(j, "t_max", c.t_max);
    if (j.contains("retrain_stop_len") && !j.at("retrain_stop_len").is_null()) {
      c.retrain_stop_len = j.at("retrain_stop_len").get<std::size_t>();
    }
    if (j.contains("estimator")) c.estimator = estimator_from_string(j.at("estimator").get<std::string>());
    maybe_get(j, "replace_anomalous_values", c.replace_anomalous_values);
    maybe_get(j, "memory_cap", c.memory_cap);
    maybe_get(j, "rank_cap", c.rank_cap);
    maybe_get(j, "rank_ratio", c.rank_ratio);
    if (j.contains("projection")) {
      c.projection = projection_mode_from_string(j.at("projection").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_config, e.what());
  }
}

void to_json(json& j, const CoherenceReport& r) {
  j = json{{"mu_squared", r.mu_squared},
           {"gamma_estimate", r.gamma_estimate},
           {"kappa_estimate", r.kappa_estimate},
           {"gamma_is_exact", r.gamma_is_exact}};
}

void to_json(json& j, const PrCurvePoint& p) {
  j = json{{"threshold", p.threshold}, {"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

void to_json(json& j, const BenchmarkReport& r) {
  json methods = json::object();
  for (const auto& m : r.methods) {
    methods[to_string(m.method)] = json{{"f1", m.f1},
                                        {"precision", m.precision},
                                        {"recall", m.recall},
                                        {"per_run", m.per_run}};
  }
  j = json{{"scenario", r.scenario}, {"runs", r.runs},         {"train_len", r.train_len},
           {"total_len", r.total_len}, {"seeds", r.seeds},     {"methods", methods}};
}

void to_json(json& j, const SynthSpec& s) {
  json ranges = json::array();
  for (const auto& [lo, hi] : s.period_ranges) ranges.push_back({lo, hi});
  j = json{{"weights", s.weights},
           {"period_ranges", ranges},
           {"noise_sigma", s.noise_sigma},
           {"length", s.length},
           {"seed", s.seed}};
  if (s.fixed_periods) j["fixed_periods"] = *s.fixed_periods;
}

void from_json(const json& j, SynthSpec& s) {
  reject_unknown(j, {"weights", "period_ranges", "fixed_periods", "noise_sigma", "length", "seed"},
                 "synth");
  try {
    maybe_get(j, "weights", s.weights);
    if (j.contains("period_ranges")) {
      const auto ranges = j.at("period_ranges").get<std::vector<std::vector<double>>>();
      if (ranges.size() != 4) throw Error(Errc::invalid_config, "period_ranges needs 4 pairs");
      for (std::size_t k = 0; k < 4; ++k) {
        if (ranges[k].size() != 2 || !(ranges[k][0] < ranges[k][1])) {
          throw Error(Errc::invalid_config, "period range must be [lo, hi] with lo < hi");
        }
        s.period_ranges[k] = {ranges[k][0], ranges[k][1]};
      }
    }
    if (j.contains("fixed_periods")) s.fixed_periods = j.at("fixed_periods").get<std::array<double, 4>>();
    maybe_get(j, "noise_sigma", s.noise_sigma);
    maybe_get(j, "length", s.length);
    maybe_get(j, "seed", s.seed);
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_config, e.what());
  }
}

void to_json(json& j, const AnomalySpec& a) {
  j = json{{"fraction", a.fraction},
           {"amplitude_factor", a.amplitude_factor},
           {"run_length", a.run_length},
           {"exclude_prefix", a.exclude_prefix},
           {"contextual_fraction", a.contextual_fraction},
           {"statistical_factor", a.statistical_factor},
           {"seed", a.seed}};
}

void from_json(const json& j, AnomalySpec& a) {
  reject_unknown(j,
                 {"fraction", "amplitude_factor", "run_length", "exclude_prefix",
                  "contextual_fraction", "statistical_factor", "seed"},
                 "anomaly");
  try {
    maybe_get(j, "fraction", a.fraction);
    maybe_get(j, "amplitude_factor", a.amplitude_factor);
    maybe_get(j, "run_length", a.run_length);
    maybe_get(j, "exclude_prefix", a.exclude_prefix);
    maybe_get(j, "contextual_fraction", a.contextual_fraction);
    maybe_get(j, "statistical_factor", a.statistical_factor);
    maybe_get(j, "seed", a.seed);
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_config, e.what());
  }
}

void from_json(const json& j, Scenario& s) {
  reject_unknown(j,
                 {"name", "synth", "anomaly", "methods", "n_runs", "train_len", "total_len",
                  "config", "seed", "tolerance"},
                 "scenario");
  try {
    maybe_get(j, "name", s.name);
    maybe_get(j, "n_runs", s.n_runs);
    maybe_get(j, "train_len", s.train_len);
    maybe_get(j, "total_len", s.total_len);
    maybe_get(j, "seed", s.seed);
    maybe_get(j, "tolerance", s.tolerance);
    s.anomaly.exclude_prefix = s.train_len;
    if (j.contains("synth")) j.at("synth").get_to(s.synth);
    if (j.contains("anomaly")) j.at("anomaly").get_to(s.anomaly);
    if (j.contains("config")) j.at("config").get_to(s.config);
    if (j.contains("methods")) {
      s.methods.clear();
      for (const auto& m : j.at("methods")) s.methods.push_back(method_from_string(m.get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_config, e.what());
  }
}

json detector_to_json(const Detector& detector) {
  json j = detector.model();
  j["config"] = detector.config();
  j["history"] = detector.history();
  j["memory"] = std::vector<double>(detector.memory().arrivals().begin(),
                                    detector.memory().arrivals().end());
  j["counter"] = detector.counter();
  j["stream_length"] = detector.stream_length();
  return j;
}

Detector detector_from_json(const json& j) {
  SubspaceModel model = j.get<SubspaceModel>();
  DetectorConfig config;
  if (j.contains("config")) j.at("config").get_to(config);
  config.window_size = model.window_size();
  if (!j.contains("history")) {
    throw Error(Errc::parse_error, "model file carries no history; re-run train");
  }
  try {
    auto history = j.at("history").get<std::vector<double>>();
    ResidualMemory memory(config.memory_cap);
    if (j.contains("memory"))
      for (const double v : j.at("memory").get<std::vector<double>>()) memory.insert(v);
    const auto counter = j.value("counter", std::size_t{0});
    const auto stream_length = j.value("stream_length", history.size());
    return Detector::restore(config, std::move(model), std::move(history), std::move(memory),
                             counter, stream_length);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, e.what());
  }
}

}  // namespace rpe
