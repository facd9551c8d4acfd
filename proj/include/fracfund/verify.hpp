#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracfund/config.hpp"

namespace fracfund {

/// One measured property with its threshold.
struct CheckResult {
    std::string suite;
    std::string name;
    /// The statement the check exercises, in words.
    std::string anchor;
    double measured = 0.0;
    double threshold = 0.0;
    /// "<=" or ">=": passed iff measured <comparator> threshold.
    std::string comparator = "<=";
    bool passed = false;
    double seconds = 0.0;
};

struct VerifySummary {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;

    bool passed() const;
    std::size_t failures() const;
};

/// multiplier, embedding, maxprinciple, comparison, plancherel, minimizer, decay.
const std::vector<std::string>& verify_suite_names();

/// Runs one suite, or every suite for "all", from the config's seed. Throws
/// ConfigError for an unknown name; the message lists the valid ones.
VerifySummary run_verify(const std::string& suite, const ExperimentConfig& cfg);

nlohmann::json to_json(const CheckResult& c);
nlohmann::json to_json(const VerifySummary& s);
/// JUnit XML, one testcase per check.
std::string junit_xml(const VerifySummary& s);

}  // namespace fracfund
