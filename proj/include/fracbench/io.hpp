/**
 * @file io.hpp
 * @brief JSON (de)serialization of configs and results plus deterministic
 *        CSV emission (shortest round-trip floats, LF line endings).
 */
#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracbench/controllers.hpp"
#include "fracbench/factorial.hpp"
#include "fracbench/reference_data.hpp"
#include "fracbench/simloop.hpp"
#include "fracbench/tuning.hpp"

namespace fracbench {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// RFC-4180 quoting, applied only when the field needs it.
std::string csv_field(const std::string& s);

nlohmann::json controller_to_json(const ControllerParams& p, const std::string& name);
ControllerParams controller_from_json(const nlohmann::json& j);

nlohmann::json spec_to_json(const FrequencySpec& s);
FrequencySpec spec_from_json(const nlohmann::json& j);

nlohmann::json sim_config_to_json(const SimConfig& c);
SimConfig sim_config_from_json(const nlohmann::json& j);

nlohmann::json metrics_to_json(const ResponseMetrics& m);
nlohmann::json tuning_result_to_json(const TuningResult& r);

struct RunManifest {
    std::string command;
    std::string config_path;
    std::string output_dir;
    std::uint64_t seed = 0;
    std::string timestamp;
    std::string version;
};
nlohmann::json manifest_to_json(const RunManifest& m);

std::string trace_csv(const SimTrace& t);
std::string factorial_csv(const FactorialTable& t);
std::string influence_csv(const InfluenceEntry& e);

/// metric,effect,sum_of_squares,percentage,f_statistic,p_value rows for all
/// four response metrics.
std::string anova_csv(const std::array<InfluenceEntry, 4>& entries);

/// Measurement-factor matrix: one row per (metric, cell, effect).
std::string mf_csv(const std::array<ResponseMetrics, 8>& cells,
                   const std::array<InfluenceEntry, 4>& entries);

/// Side-by-side computed vs bundled influence percentages.
std::string replay_csv(const std::vector<ReplayEntry>& entries);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace fracbench
