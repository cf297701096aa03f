#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "rpe/detector.hpp"
#include "rpe/synth.hpp"

using namespace rpe;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

std::vector<double> synth_series(std::size_t n, std::uint64_t seed, double noise = 0.1) {
  SynthSpec spec;
  spec.length = n;
  spec.seed = seed;
  spec.noise_sigma = noise;
  return to_vector(generate_clean(spec).values());
}

// A detector whose model is the 3-column DCT frame and whose history ends
// with the first 29 entries of a window lying exactly in that span.
struct DctFixture {
  MatrixXd U = oracle::dct_frame(30, 3);
  VectorXd window;
  Detector detector;

  explicit DctFixture(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    VectorXd a(3);
    for (int i = 0; i < 3; ++i) a(i) = normal(rng);
    window = U * a;

    DetectorConfig config;
    SubspaceModel model{U, VectorXd::Ones(3)};
    std::vector<double> history{0.0};
    history.insert(history.end(), window.data(), window.data() + 29);
    ResidualMemory memory;
    for (int i = 1; i <= 100; ++i) memory.insert(1e-3 * i);
    detector = Detector::restore(config, model, history, memory, 0, 1'000'000);
  }
};

}  // namespace

TEST_CASE("training seeds one residual per complete window") {
  const auto t = synth_series(100, 7);
  const auto d = Detector::train(t, DetectorConfig{});
  CHECK(d.trained());
  CHECK(d.memory().size() == 71);
  CHECK(d.model().window_size() == 30);
  CHECK(d.model().rank() >= 1);
  CHECK(d.model().rank() <= 10);
  CHECK(d.counter() == 0);
  CHECK(d.history().size() == 100);
}

TEST_CASE("training keeps at most t_max samples") {
  const auto t = synth_series(500, 8);
  const auto d = Detector::train(t, DetectorConfig{});
  REQUIRE(d.history().size() == 300);
  CHECK(std::equal(d.history().begin(), d.history().end(), t.end() - 300));
  CHECK(d.memory().size() == 471);
}

TEST_CASE("constant training series seeds zero residuals") {
  const std::vector<double> t(120, 4.25);
  const auto d = Detector::train(t, DetectorConfig{});
  for (double m : d.memory().arrivals()) CHECK(m <= 1e-10);
}

TEST_CASE("training errors") {
  CHECK_THROWS_AS(Detector::train(std::vector<double>(59, 1.0), DetectorConfig{}), Error);
  try {
    (void)Detector::train(std::vector<double>(59, 1.0), DetectorConfig{});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::series_too_short);
  }
  DetectorConfig bad;
  bad.n_s = 25;
  try {
    (void)Detector::train(std::vector<double>(100, 1.0), bad);
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_config);
  }
}

TEST_CASE("config validation") {
  DetectorConfig c;
  CHECK_NOTHROW(c.validate());
  c.cdf_threshold = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.retrain_every = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.window_size = 10;
  CHECK_THROWS_AS(c.validate(), Error);
  c.rank_cap = 5;
  CHECK_NOTHROW(c.validate());
  CHECK(c.effective_retrain_stop_len() == 100);
}

TEST_CASE("untrained detector") {
  Detector d;
  CHECK_FALSE(d.trained());
  try {
    (void)d.step(1.0);
    FAIL("expected NotTrained");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_trained);
  }
  CHECK_THROWS_AS((void)d.model(), Error);
}

TEST_CASE("step on a clean continuation") {
  DctFixture fx(12);
  const auto rec = fx.detector.step(fx.window(29));
  CHECK(std::abs(rec.residual) < 1e-10);
  CHECK(rec.cdf_score == 0.0);
  CHECK_FALSE(rec.flagged);
  CHECK_FALSE(rec.replaced_value.has_value());
  CHECK(rec.index == 0);
}

TEST_CASE("step on a large last-stamp anomaly") {
  DctFixture fx(13);
  const double f = 1.0;
  const double clean = fx.window(29);
  const auto rec = fx.detector.step(clean + 10.0 * f);
  CHECK(rec.residual == doctest::Approx(10.0 * f).epsilon(1e-9));
  CHECK(rec.cdf_score == 1.0);
  CHECK(rec.flagged);
  REQUIRE(rec.replaced_value.has_value());
  CHECK(*rec.replaced_value == doctest::Approx(clean).epsilon(1e-9));
  CHECK(fx.detector.history().back() == *rec.replaced_value);
}

TEST_CASE("replacement can be disabled") {
  DctFixture fx(14);
  DetectorConfig config;
  config.replace_anomalous_values = false;
  auto d = Detector::restore(config, fx.detector.model(), fx.detector.history(),
                             fx.detector.memory(), 0, 1'000'000);
  const double v = fx.window(29) + 10.0;
  const auto rec = d.step(v);
  CHECK(rec.flagged);
  CHECK_FALSE(rec.replaced_value.has_value());
  CHECK(d.history().back() == v);
}

TEST_CASE("two nearby anomalies are isolated") {
  // Series of 300 stamps, trained on the first 100, anomalies at 151 and 156.
  SynthSpec spec;
  spec.seed = 2020;
  const auto clean = generate_clean(spec);
  const auto values = clean.values();
  const double f = amplitude_scale(values);
  auto t = to_vector(values);
  t[151] += f;
  t[156] -= f;

  auto d = Detector::train(std::span<const double>(t).first(100), DetectorConfig{});
  const auto records = d.score_series(std::span<const double>(t).subspan(100));
  auto at = [&](std::size_t stamp) { return records[stamp - 100]; };

  CHECK(at(151).flagged);
  CHECK(at(156).flagged);
  for (std::size_t s = 152; s <= 155; ++s) CHECK_FALSE(at(s).flagged);

  for (std::size_t anomaly : {151u, 156u}) {
    const double big = at(anomaly).abs_residual;
    for (std::size_t s = anomaly + 1; s <= anomaly + 30 && s < t.size(); ++s) {
      if (s == 156) continue;
      CAPTURE(s);
      CHECK(at(s).abs_residual <= 0.1 * big);
    }
  }
}

TEST_CASE("clean stream raises no flags at a strict threshold") {
  const auto t = synth_series(300, 77);
  DetectorConfig config;
  config.cdf_threshold = 0.999;
  auto d = Detector::train(std::span<const double>(t).first(100), config);
  const auto records = d.score_series(std::span<const double>(t).subspan(100));
  REQUIRE(records.size() == 200);
  const auto flags = std::count_if(records.begin(), records.end(),
                                   [](const ScoreRecord& r) { return r.flagged; });
  CHECK(flags == 0);
}

TEST_CASE("score_series on empty input leaves the state alone") {
  const auto t = synth_series(120, 3);
  auto d = Detector::train(t, DetectorConfig{});
  const auto history = d.history();
  const auto memory_size = d.memory().size();
  const auto records = d.score_series({});
  CHECK(records.empty());
  CHECK(d.history() == history);
  CHECK(d.memory().size() == memory_size);
  CHECK(d.counter() == 0);
  CHECK(d.steps() == 0);
}

TEST_CASE("records satisfy their invariants and the stream retrains on schedule") {
  const auto t = synth_series(300, 5);
  auto d = Detector::train(std::span<const double>(t).first(100), DetectorConfig{});
  const auto records = d.score_series(std::span<const double>(t).subspan(100));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    CHECK(r.index == i);
    CHECK(r.cdf_score >= 0.0);
    CHECK(r.cdf_score <= 1.0);
    CHECK(r.flagged == (r.cdf_score > 0.95));
    CHECK(r.abs_residual == std::abs(r.residual));
    if (r.replaced_value) CHECK(r.flagged);
  }
  // Retrain at step 100 (stream length 200); the stop length 300 blocks step 200.
  CHECK(d.retrain_count() == 1);
  CHECK(d.memory().size() == 71 + 200);
}

TEST_CASE("replacement hygiene") {
  auto t = synth_series(300, 31);
  const double f = amplitude_scale(t);
  const std::vector<std::size_t> stamps{120, 160, 185};
  for (auto s : stamps) t[s] += 4.0 * f;

  auto d = Detector::train(std::span<const double>(t).first(100), DetectorConfig{});
  std::vector<std::size_t> replaced;
  for (std::size_t s = 100; s < 200; ++s) {
    const auto rec = d.step(t[s]);
    if (rec.replaced_value) {
      CHECK(d.history().back() == *rec.replaced_value);
      replaced.push_back(s);
    }
  }
  for (auto s : stamps) CHECK(std::find(replaced.begin(), replaced.end(), s) != replaced.end());
  // The retrain at step 100 saw the cleaned history.
  CHECK(d.retrain_count() == 1);
  for (auto s : stamps) {
    CHECK(std::find(d.history().begin(), d.history().end(), t[s]) == d.history().end());
  }
}

TEST_CASE("empirical CDF") {
  ResidualMemory m;
  CHECK(m.cdf(1.0) == 0.0);
  for (double v : {0.5, 0.1, 0.3, 0.3}) m.insert(v);
  CHECK(m.cdf(0.1) == 0.0);
  CHECK(m.cdf(0.3) == 0.25);
  CHECK(m.cdf(0.31) == 0.75);
  CHECK(m.cdf(9.0) == 1.0);
  m.insert(0.4);
  CHECK(m.cdf(0.4) == doctest::Approx(3.0 / 5.0));

  std::mt19937_64 rng(1);
  std::exponential_distribution<double> exp;
  ResidualMemory big;
  for (int i = 0; i < 500; ++i) big.insert(exp(rng));
  double previous = 0.0;
  for (double q = 0.0; q < 8.0; q += 0.01) {
    const double c = big.cdf(q);
    CHECK(c >= previous);
    previous = c;
  }
}

TEST_CASE("memory cap evicts the oldest residual") {
  ResidualMemory m(3);
  for (double v : {4.0, 1.0, 2.0, 3.0}) m.insert(v);
  CHECK(m.size() == 3);
  CHECK(m.arrivals() == std::deque<double>{1.0, 2.0, 3.0});
  CHECK(m.cdf(3.5) == 1.0);
  CHECK(m.cdf(2.5) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("scoring is deterministic") {
  const auto t = synth_series(300, 19);
  for (auto estimator : {Estimator::simple, Estimator::elementwise, Estimator::columnwise}) {
    DetectorConfig config;
    config.estimator = estimator;
    auto a = Detector::train(std::span<const double>(t).first(100), config);
    auto b = Detector::train(std::span<const double>(t).first(100), config);
    const auto ra = a.score_series(std::span<const double>(t).subspan(100));
    const auto rb = b.score_series(std::span<const double>(t).subspan(100));
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
      CHECK(ra[i].residual == rb[i].residual);
      CHECK(ra[i].cdf_score == rb[i].cdf_score);
      CHECK(ra[i].flagged == rb[i].flagged);
    }
  }
}
