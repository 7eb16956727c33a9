#include "fracbench/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fracbench {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

nlohmann::json controller_to_json(const ControllerParams& p, const std::string& name) {
    return nlohmann::json{{"name", name},     {"k", p.k},
                          {"tau_i", p.tau_i}, {"tau_d", p.tau_d},
                          {"lambda", p.lambda}, {"mu", p.mu},
                          {"saturation", {0.0, 10.0}}};
}

ControllerParams controller_from_json(const nlohmann::json& j) {
    ControllerParams p;
    p.k = j.at("k").get<double>();
    p.tau_i = j.at("tau_i").get<double>();
    p.tau_d = j.at("tau_d").get<double>();
    p.lambda = j.value("lambda", 1.0);
    p.mu = j.value("mu", 1.0);
    p.validate();
    return p;
}

nlohmann::json spec_to_json(const FrequencySpec& s) {
    return nlohmann::json{{"phase_margin_deg", s.phase_margin_deg},
                          {"gain_crossover_rad_s", s.gain_crossover},
                          {"gain_margin_db", s.gain_margin_db},
                          {"noise_band_level_db", s.noise_band_level_db},
                          {"noise_band_freq_rad_s", s.noise_freq()},
                          {"disturbance_level_db", s.disturbance_level_db},
                          {"disturbance_freq_rad_s", s.dist_freq()},
                          {"flat_phase_tolerance_deg_per_rad_s", s.flat_phase_tolerance}};
}

FrequencySpec spec_from_json(const nlohmann::json& j) {
    FrequencySpec s;
    s.phase_margin_deg = j.at("phase_margin_deg").get<double>();
    s.gain_crossover = j.at("gain_crossover_rad_s").get<double>();
    s.gain_margin_db = j.value("gain_margin_db", 10.0);
    s.noise_band_level_db = j.value("noise_band_level_db", -20.0);
    s.noise_band_freq = j.value("noise_band_freq_rad_s", 0.0);
    s.disturbance_level_db = j.value("disturbance_level_db", -20.0);
    s.disturbance_freq = j.value("disturbance_freq_rad_s", 0.0);
    s.flat_phase_tolerance = j.value("flat_phase_tolerance_deg_per_rad_s", 25.0);
    s.validate();
    return s;
}

nlohmann::json sim_config_to_json(const SimConfig& c) {
    return nlohmann::json{
        {"step", c.step},
        {"horizon", c.horizon},
        {"setpoint", c.setpoint},
        {"plant_mode",
         c.plant_mode == PlantMode::LinearDesignModel ? "linear" : "nonlinear"},
        {"seed", c.seed},
        {"factors",
         {{"a_gain_uncertainty", c.factors.a_gain_uncertainty},
          {"b_noise", c.factors.b_noise},
          {"c_disturbance", c.factors.c_disturbance}}},
        {"disturbance_time", c.disturbance_time},
        {"anti_windup", c.anti_windup}};
}

SimConfig sim_config_from_json(const nlohmann::json& j) {
    SimConfig c;
    c.step = j.value("step", 0.01);
    c.horizon = j.value("horizon", 30.0);
    c.setpoint = j.value("setpoint", 1.0);
    const std::string mode = j.value("plant_mode", std::string("linear"));
    if (mode == "linear") c.plant_mode = PlantMode::LinearDesignModel;
    else if (mode == "nonlinear") c.plant_mode = PlantMode::NonlinearWithLinearization;
    else throw std::invalid_argument("SimConfig: plant_mode must be linear or nonlinear");
    c.seed = j.value("seed", std::uint64_t{42});
    if (j.contains("factors")) {
        const auto& f = j.at("factors");
        c.factors.a_gain_uncertainty = f.value("a_gain_uncertainty", 0);
        c.factors.b_noise = f.value("b_noise", 0);
        c.factors.c_disturbance = f.value("c_disturbance", 0);
    }
    c.disturbance_time = j.value("disturbance_time", 15.0);
    c.anti_windup = j.value("anti_windup", false);
    c.validate();
    return c;
}

nlohmann::json metrics_to_json(const ResponseMetrics& m) {
    return nlohmann::json{{"ise", m.ise},
                          {"step_std", m.step_std},
                          {"control_mean", m.control_mean},
                          {"control_std", m.control_std}};
}

nlohmann::json tuning_result_to_json(const TuningResult& r) {
    return nlohmann::json{
        {"params", controller_to_json(r.params, "tuned")},
        {"achieved",
         {{"phase_margin_deg", r.achieved.phase_margin_deg},
          {"crossover_residual_db", r.achieved.crossover_residual_db},
          {"phase_slope_deg_per_rad_s", r.achieved.phase_slope_deg_per_rad_s},
          {"noise_band_db", r.achieved.noise_band_db},
          {"disturbance_db", r.achieved.disturbance_db},
          {"gain_margin_db", r.achieved.gain_margin_db},
          {"control_raw_min", r.achieved.control_raw_min},
          {"control_raw_max", r.achieved.control_raw_max}}},
        {"feasible", r.feasible},
        {"core_feasible", r.core_feasible},
        {"ise", r.ise}};
}

nlohmann::json manifest_to_json(const RunManifest& m) {
    return nlohmann::json{{"command", m.command},   {"config", m.config_path},
                          {"output_dir", m.output_dir}, {"seed", m.seed},
                          {"timestamp", m.timestamp},   {"version", m.version}};
}

std::string trace_csv(const SimTrace& t) {
    std::string out = "t,r,y,y_meas,e,u_raw,u_applied\n";
    for (std::size_t k = 0; k < t.time.size(); ++k) {
        out += format_double(t.time[k]);
        out += ',';
        out += format_double(t.reference[k]);
        out += ',';
        out += format_double(t.output[k]);
        out += ',';
        out += format_double(t.measured[k]);
        out += ',';
        out += format_double(t.error[k]);
        out += ',';
        out += format_double(t.control_raw[k]);
        out += ',';
        out += format_double(t.control_applied[k]);
        out += '\n';
    }
    return out;
}

std::string factorial_csv(const FactorialTable& t) {
    std::string out = "C,B,A,replicate,ise,step_std,u_mean,u_std\n";
    for (const auto& row : t.rows) {
        out += std::to_string(row.levels.c_disturbance) + ',' +
               std::to_string(row.levels.b_noise) + ',' +
               std::to_string(row.levels.a_gain_uncertainty) + ',' +
               std::to_string(row.replicate) + ',' + format_double(row.metrics.ise) +
               ',' + format_double(row.metrics.step_std) + ',' +
               format_double(row.metrics.control_mean) + ',' +
               format_double(row.metrics.control_std) + '\n';
    }
    return out;
}

std::string influence_csv(const InfluenceEntry& e) {
    std::string out = "effect,percentage\n";
    for (int i = 0; i < 7; ++i) {
        out += std::string(kEffectNames[i]) + ',' +
               format_double(e.effects[i].percentage) + '\n';
    }
    return out;
}

std::string anova_csv(const std::array<InfluenceEntry, 4>& entries) {
    std::string out = "metric,effect,sum_of_squares,percentage,f_statistic,p_value\n";
    for (std::size_t m = 0; m < entries.size(); ++m) {
        for (int i = 0; i < 7; ++i) {
            const auto& eff = entries[m].effects[i];
            out += std::string(metric_name(kAllMetrics[m])) + ',' + kEffectNames[i] +
                   ',' + format_double(eff.sum_of_squares) + ',' +
                   format_double(eff.percentage) + ',' +
                   format_double(eff.f_statistic) + ',' + format_double(eff.p_value) +
                   '\n';
        }
    }
    return out;
}

std::string mf_csv(const std::array<ResponseMetrics, 8>& cells,
                   const std::array<InfluenceEntry, 4>& entries) {
    std::string out = "metric,C,B,A,cell_mean,effect,influence_pct,mf\n";
    for (std::size_t m = 0; m < entries.size(); ++m) {
        for (int code = 0; code < 8; ++code) {
            const double data = metric_value(cells[code], kAllMetrics[m]);
            for (int e = 0; e < 7; ++e) {
                const double pct = entries[m].effects[e].percentage;
                out += std::string(metric_name(kAllMetrics[m])) + ',' +
                       std::to_string((code >> 2) & 1) + ',' +
                       std::to_string((code >> 1) & 1) + ',' +
                       std::to_string(code & 1) + ',' + format_double(data) + ',' +
                       kEffectNames[e] + ',' + format_double(pct) + ',' +
                       format_double(measurement_factor(data, pct)) + '\n';
            }
        }
    }
    return out;
}

std::string replay_csv(const std::vector<ReplayEntry>& entries) {
    std::string out = "controller,metric,effect,computed_pct,reference_pct,difference\n";
    for (const auto& entry : entries) {
        for (int e = 0; e < 7; ++e) {
            out += csv_field(entry.controller) + ',' + metric_name(entry.metric) + ',' +
                   kEffectNames[e] + ',' + format_double(entry.computed[e]) + ',' +
                   format_double(entry.reference[e]) + ',' +
                   format_double(entry.computed[e] - entry.reference[e]) + '\n';
        }
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

} // namespace fracbench
