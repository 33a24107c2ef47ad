#ifndef SYNTAXPROBE_RESULTS_HPP
#define SYNTAXPROBE_RESULTS_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "syntaxprobe/probe.hpp"

namespace syntaxprobe {

// Everything that affects probe output, in a fixed key order. `jobs` is
// left out: it never changes results.
nlohmann::ordered_json config_to_json(const ProbeConfig& config);
ProbeConfig config_from_json(const nlohmann::json& j);

// SHA-256 of the compact config JSON.
std::string config_fingerprint(const ProbeConfig& config);

nlohmann::ordered_json result_to_json(const ProbeResult& result);
ProbeResult result_from_json(const nlohmann::json& j);

void write_results_jsonl(const std::string& path,
                         const std::vector<ProbeResult>& results);
std::vector<ProbeResult> read_results_jsonl(const std::string& path);

/// Wide table for plotting: one row per layer (ascending), one test-R²
/// column per feature set, columns in alphabetical order. Missing cells are
/// left empty.
std::string wide_csv(const std::vector<ProbeResult>& results);
void write_wide_csv(const std::string& path,
                    const std::vector<ProbeResult>& results);

}  // namespace syntaxprobe

#endif
