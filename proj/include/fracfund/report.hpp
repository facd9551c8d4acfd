#pragma once

#include <string>

#include <json.hpp>

#include "fracfund/config.hpp"
#include "fracfund/fundamental.hpp"
#include "fracfund/solver.hpp"

namespace fracfund {

/// Version stamped into every emitted JSON document.
inline constexpr const char* kSchemaVersion = "1.0.0";

/// The only block that varies between identical reruns.
nlohmann::json metadata_block(const std::string& kind);

nlohmann::json to_json(const NormReport& r);
nlohmann::json to_json(const DecayFit& f);
nlohmann::json to_json(const StageReport& s);
nlohmann::json to_json(const DiagnosticTable& t);
nlohmann::json to_json(const FundamentalReport& r);
/// Kernel, potential, grid and solver sections as parsed.
nlohmann::json config_json(const ExperimentConfig& c);

/// Writes `text` to `path` through a temporary file and rename.
void write_atomic(const std::string& path, const std::string& text);
/// Sorted keys, two-space indentation, trailing newline.
std::string dump(const nlohmann::json& j);

std::string field_csv(const DiscreteField& field);
std::string residual_history_csv(const std::vector<double>& history);
std::string radial_profile_csv(const std::vector<Shell>& shells, const FractionalOrder& order);
std::string diagnostics_csv(const DiagnosticTable& t, int n);

}  // namespace fracfund
