#ifndef RPE_JSON_HPP
#define RPE_JSON_HPP

#include <json.hpp>

#include "rpe/coherence.hpp"
#include "rpe/detector.hpp"
#include "rpe/eval.hpp"
#include "rpe/subspace.hpp"
#include "rpe/synth.hpp"

namespace rpe {

inline constexpr int kModelFormatVersion = 1;

// SubspaceModel: {version, M1, r, U (row-major, flat), singular_values}.
void to_json(nlohmann::json& j, const SubspaceModel& model);
void from_json(const nlohmann::json& j, SubspaceModel& model);

// DetectorConfig fields keep their C++ names except window_size, stored as M1.
// Missing keys keep their defaults; unknown keys are rejected.
void to_json(nlohmann::json& j, const DetectorConfig& config);
void from_json(const nlohmann::json& j, DetectorConfig& config);

void to_json(nlohmann::json& j, const CoherenceReport& report);
void to_json(nlohmann::json& j, const PrCurvePoint& point);
void to_json(nlohmann::json& j, const BenchmarkReport& report);

void from_json(const nlohmann::json& j, SynthSpec& spec);
void to_json(nlohmann::json& j, const SynthSpec& spec);
void from_json(const nlohmann::json& j, AnomalySpec& spec);
void to_json(nlohmann::json& j, const AnomalySpec& spec);
void from_json(const nlohmann::json& j, Scenario& scenario);

/// Full detector state: the subspace document extended with config,
/// history, memory and retrain counter so `detect` can resume the stream.
nlohmann::json detector_to_json(const Detector& detector);
Detector detector_from_json(const nlohmann::json& j);

}  // namespace rpe

#endif  // RPE_JSON_HPP
