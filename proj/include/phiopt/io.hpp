#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "phiopt/network.hpp"
#include "phiopt/search.hpp"
#include "phiopt/stats.hpp"
#include "phiopt/system.hpp"

namespace phiopt::io {

using json = nlohmann::ordered_json;

// Readers throw FormatError on unparsable input and ShapeError / RangeError
// on a matrix that parses but is not a TPM.

/// JSON {"nodes": D, "tpm": [[...], ...]} or headerless CSV, chosen by the
/// first non-blank character.
Tpm parse_tpm(const std::string& text);
Tpm read_tpm(const std::filesystem::path& path);

/// JSON array of 0/1 integers.
SystemState parse_state(const std::string& text);
SystemState read_state(const std::filesystem::path& path);

json to_json(const Tpm& tpm);
json to_json(const ConnectivityMatrix& cm);
json to_json(const SystemState& state);
json to_json(const SystemCut& cut);
json to_json(const Concept& c);
json to_json(const PhiResult& result);
json to_json(const EvalRecord& record);
json to_json(const DimensionPrior& prior);
json to_json(const Interval& interval);
json to_json(const PopulationStats& stats);
json to_json(const TestReport& report, double alpha = 0.01);
json to_json(const InferenceReport& report, double alpha = 0.01);

/// One EvalRecord per line. Wall-clock times are left out so reruns match.
std::string trajectory_jsonl(const SearchResult& result);

/// Array of theta vectors.
json prior_history_json(const SearchResult& result);

struct TrajectorySeries {
  std::string method;
  std::vector<double> mean_best_phi;
};

/// Rows (iteration, mean_best_phi, method).
std::string mean_trajectory_csv(const std::vector<TrajectorySeries>& series);

/// Element-wise mean of best_so_far over repetitions.
std::vector<double> mean_best_so_far(const std::vector<SearchResult>& runs);

/// Rows (group, phi) for feasible draws.
std::string raw_values_csv(const std::vector<PopulationStats>& groups);

struct RunManifest {
  std::string command;
  json config;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string started;
  std::string finished;
};

json to_json(const RunManifest& manifest);

/// Current UTC time as ISO-8601.
std::string utc_timestamp();

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& value);

}  // namespace phiopt::io
