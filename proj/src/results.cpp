#include "syntaxprobe/results.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "syntaxprobe/error.hpp"
#include "syntaxprobe/hash.hpp"

namespace syntaxprobe {

nlohmann::ordered_json config_to_json(const ProbeConfig& config) {
  nlohmann::ordered_json j;
  j["alpha_grid"] = config.alpha_grid;
  j["folds"] = config.folds;
  j["train_fraction"] = config.train_fraction;
  j["seed"] = config.seed;
  j["feature_set"] = to_string(config.feature_set);
  j["standardize"] = config.standardize;
  j["n_anchors"] = config.n_anchors;
  j["lambda"] = config.lambda;
  return j;
}

ProbeConfig config_from_json(const nlohmann::json& j) {
  ProbeConfig c;
  try {
    c.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
    c.folds = j.at("folds").get<std::size_t>();
    c.train_fraction = j.at("train_fraction").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.feature_set = parse_feature_set(j.at("feature_set").get<std::string>());
    c.standardize = j.at("standardize").get<bool>();
    c.n_anchors = j.at("n_anchors").get<std::size_t>();
    c.lambda = j.at("lambda").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadFormat, std::string("probe config: ") + e.what());
  }
  return c;
}

std::string config_fingerprint(const ProbeConfig& config) {
  return sha256_hex(config_to_json(config).dump());
}

nlohmann::ordered_json result_to_json(const ProbeResult& r) {
  nlohmann::ordered_json j;
  j["probe"] = to_string(r.kind);
  j["layer_id"] = r.layer_id;
  j["feature_set"] = to_string(r.feature_set);
  j["chosen_alpha"] = r.chosen_alpha;
  j["cv_score"] = r.cv_score;
  j["test_r2"] = r.test_r2;
  j["n_train"] = r.n_train;
  j["n_test"] = r.n_test;
  j["n_anchors"] = r.n_anchors;
  j["seed"] = r.seed;
  j["standardized"] = r.standardized;
  j["zero_variance_columns"] = r.zero_variance_columns;
  j["config_fingerprint"] = r.config_fingerprint;
  return j;
}

ProbeResult result_from_json(const nlohmann::json& j) {
  ProbeResult r;
  try {
    r.kind = parse_probe_kind(j.at("probe").get<std::string>());
    r.layer_id = j.at("layer_id").get<std::uint32_t>();
    r.feature_set = parse_feature_set(j.at("feature_set").get<std::string>());
    r.chosen_alpha = j.at("chosen_alpha").get<double>();
    r.cv_score = j.at("cv_score").get<double>();
    r.test_r2 = j.at("test_r2").get<double>();
    r.n_train = j.at("n_train").get<std::size_t>();
    r.n_test = j.at("n_test").get<std::size_t>();
    r.n_anchors = j.value("n_anchors", std::size_t{0});
    r.seed = j.at("seed").get<std::uint64_t>();
    r.standardized = j.value("standardized", false);
    r.zero_variance_columns = j.value("zero_variance_columns", std::size_t{0});
    r.config_fingerprint = j.value("config_fingerprint", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadFormat, std::string("probe result: ") + e.what());
  }
  return r;
}

void write_results_jsonl(const std::string& path,
                         const std::vector<ProbeResult>& results) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  for (const ProbeResult& r : results) out << result_to_json(r).dump() << '\n';
}

std::vector<ProbeResult> read_results_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  std::vector<ProbeResult> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(result_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::BadFormat,
                  path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string wide_csv(const std::vector<ProbeResult>& results) {
  std::set<std::string> columns;
  std::map<std::uint32_t, std::map<std::string, double>> cells;
  for (const ProbeResult& r : results) {
    const std::string fs = to_string(r.feature_set);
    columns.insert(fs);
    cells[r.layer_id][fs] = r.test_r2;
  }
  std::string out = "layer";
  for (const std::string& c : columns) out += "," + c;
  out += '\n';
  char buf[64];
  for (const auto& [layer, row] : cells) {
    out += std::to_string(layer);
    for (const std::string& c : columns) {
      out += ',';
      const auto it = row.find(c);
      if (it == row.end()) continue;
      std::snprintf(buf, sizeof buf, "%.10f", it->second);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_wide_csv(const std::string& path,
                    const std::vector<ProbeResult>& results) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  out << wide_csv(results);
}

}  // namespace syntaxprobe
