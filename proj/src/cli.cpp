#include "fracbench/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "fracbench/io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fracbench {

namespace fs = std::filesystem;

namespace {

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string default_outdir() {
    if (const char* env = std::getenv("FRACBENCH_OUTDIR")) return env;
    return "out";
}

void write_manifest(const std::string& dir, const std::string& command,
                    const std::string& config_path, std::uint64_t seed) {
    RunManifest m;
    m.command = command;
    m.config_path = config_path;
    m.output_dir = dir;
    m.seed = seed;
    m.timestamp = iso_timestamp();
    m.version = kVersion;
    write_text_file(dir + "/manifest.json", manifest_to_json(m).dump(2) + "\n");
}

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

struct ControllerSource {
    std::string preset;
    std::string file;

    std::pair<ControllerParams, std::string> resolve() const {
        if (!preset.empty()) {
            const PresetEntry* entry = find_preset(preset);
            if (!entry) throw std::runtime_error("unknown preset: " + preset);
            std::string canonical = preset;
            for (const char* name : kPresetOrder) {
                if (find_preset(name) == entry || &table1_presets().at(name) == entry)
                    canonical = name;
            }
            return {entry->params, canonical};
        }
        const auto j = nlohmann::json::parse(read_text_file(file));
        return {controller_from_json(j), j.value("name", std::string("custom"))};
    }
};

std::array<InfluenceEntry, 4> influence_all(const FactorialTable& table) {
    std::array<InfluenceEntry, 4> out;
    for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
        out[m] = influence(table, kAllMetrics[m]);
    }
    return out;
}

int cmd_tune(const std::string& spec_file, const std::string& family_name,
             const std::string& outdir, std::uint64_t seed, int starts, int threads) {
    apply_threads(threads);
    const FrequencySpec spec = spec_from_json(nlohmann::json::parse(read_text_file(spec_file)));
    const ControllerFamily family =
        family_name == "iopid" ? ControllerFamily::Iopid : ControllerFamily::Fopid;

    TuneOptions opts;
    opts.seed = seed;
    opts.random_starts = starts;
    const TransferFunction plant = design_plant();
    const TuningResult result = tune(plant, spec, family, opts);

    fs::create_directories(outdir);
    write_text_file(outdir + "/tuning_result.json", tuning_result_to_json(result).dump(2) + "\n");

    std::string report;
    char line[160];
    std::snprintf(line, sizeof(line), "family: %s\n", family_name.c_str());
    report += line;
    std::snprintf(line, sizeof(line),
                  "target:   pm %.2f deg at %.4g rad/s, |T| <= %.1f dB at %.4g, |S| <= %.1f dB at %.4g\n",
                  spec.phase_margin_deg, spec.gain_crossover, spec.noise_band_level_db,
                  spec.noise_freq(), spec.disturbance_level_db, spec.dist_freq());
    report += line;
    std::snprintf(line, sizeof(line),
                  "achieved: pm %.3f deg, crossover %.4f dB, slope %.4f deg/(rad/s)\n",
                  result.achieved.phase_margin_deg, result.achieved.crossover_residual_db,
                  result.achieved.phase_slope_deg_per_rad_s);
    report += line;
    std::snprintf(line, sizeof(line), "          |T| %.2f dB, |S| %.2f dB, gain margin %.2f dB\n",
                  result.achieved.noise_band_db, result.achieved.disturbance_db,
                  result.achieved.gain_margin_db);
    report += line;
    std::snprintf(line, sizeof(line), "          raw control in [%.3f, %.3f], nominal ISE %.4f\n",
                  result.achieved.control_raw_min, result.achieved.control_raw_max,
                  result.ise);
    report += line;
    std::snprintf(line, sizeof(line),
                  "params:   k=%.5g tau_i=%.5g tau_d=%.5g lambda=%.4g mu=%.4g\n",
                  result.params.k, result.params.tau_i, result.params.tau_d,
                  result.params.lambda, result.params.mu);
    report += line;
    report += result.feasible ? "feasible: yes\n"
              : result.core_feasible
                  ? "feasible: no (crossover conditions met; a band/actuator bound failed)\n"
                  : "feasible: no\n";
    write_text_file(outdir + "/margins.txt", report);
    write_manifest(outdir, "tune", spec_file, seed);
    std::cout << report;
    return result.feasible ? 0 : 2;
}

int cmd_simulate(const ControllerSource& source, const std::string& config_file,
                 bool fa, bool fb, bool fc, const std::string& outdir,
                 std::optional<std::uint64_t> seed) {
    auto [params, name] = source.resolve();
    SimConfig cfg;
    if (!config_file.empty()) {
        cfg = sim_config_from_json(nlohmann::json::parse(read_text_file(config_file)));
    }
    if (fa) cfg.factors.a_gain_uncertainty = 1;
    if (fb) cfg.factors.b_noise = 1;
    if (fc) cfg.factors.c_disturbance = 1;
    if (seed) cfg.seed = *seed;

    const SimTrace trace = simulate(params, cfg);
    const ResponseMetrics m = metrics(trace);

    fs::create_directories(outdir);
    write_text_file(outdir + "/trace.csv", trace_csv(trace));
    write_text_file(outdir + "/metrics.json", metrics_to_json(m).dump(2) + "\n");
    write_text_file(outdir + "/controller.json", controller_to_json(params, name).dump(2) + "\n");
    write_text_file(outdir + "/sim_config.json", sim_config_to_json(cfg).dump(2) + "\n");
    write_manifest(outdir, "simulate", config_file, cfg.seed);

    std::printf("%s: ise=%.4f step_std=%.4f u_mean=%.4f u_std=%.4f\n", name.c_str(),
                m.ise, m.step_std, m.control_mean, m.control_std);
    return 0;
}

int cmd_doe(const ControllerSource& source, int replicates, const std::string& config_file,
            const std::string& outdir, std::optional<std::uint64_t> seed, bool replay,
            int threads) {
    apply_threads(threads);
    fs::create_directories(outdir);

    if (replay) {
        const auto entries = reproduce_reference_tables();
        write_text_file(outdir + "/replay.csv", replay_csv(entries));
        std::printf("%-10s %-9s %-5s %10s %10s %9s\n", "controller", "metric", "effect",
                    "computed", "reference", "diff");
        for (const auto& e : entries) {
            for (int i = 0; i < 7; ++i) {
                std::printf("%-10s %-9s %-5s %10.3f %10.3f %9.3f\n", e.controller.c_str(),
                            metric_name(e.metric), kEffectNames[i], e.computed[i],
                            e.reference[i], e.computed[i] - e.reference[i]);
            }
        }
        write_manifest(outdir, "doe --replay-paper", "", seed.value_or(42));
        return 0;
    }

    if (replicates < 1) throw std::runtime_error("--replicates must be >= 1");
    auto [params, name] = source.resolve();
    SimConfig base;
    if (!config_file.empty()) {
        base = sim_config_from_json(nlohmann::json::parse(read_text_file(config_file)));
    }
    if (seed) base.seed = *seed;

    const FactorialTable table = run_design(params, base, replicates);
    const auto entries = influence_all(table);
    const auto cells = cell_means(table);

    write_text_file(outdir + "/factorial_table.csv", factorial_csv(table));
    for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
        write_text_file(outdir + "/influence_" + metric_name(kAllMetrics[m]) + ".csv",
                        influence_csv(entries[m]));
    }
    write_text_file(outdir + "/anova.csv", anova_csv(entries));
    write_text_file(outdir + "/mf.csv", mf_csv(cells, entries));
    write_text_file(outdir + "/controller.json", controller_to_json(params, name).dump(2) + "\n");
    write_manifest(outdir, "doe", config_file, base.seed);

    std::printf("%s: %zu runs, influence (%% of effect SS):\n", name.c_str(),
                table.rows.size());
    std::printf("%-9s", "metric");
    for (const char* e : kEffectNames) std::printf("%9s", e);
    std::printf("\n");
    for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
        std::printf("%-9s", metric_name(kAllMetrics[m]));
        for (int e = 0; e < 7; ++e) std::printf("%9.3f", entries[m].effects[e].percentage);
        std::printf("\n");
    }
    return 0;
}

int cmd_report(const std::string& results_dir, const std::string& outdir) {
    struct Entry {
        std::string name;
        ControllerParams params;
        ResponseMetrics metrics;
        bool has_influence = false;
        std::array<std::array<double, 7>, 4> influence{};
    };
    std::vector<Entry> entries;

    if (!fs::is_directory(results_dir)) {
        throw std::runtime_error("not a directory: " + results_dir);
    }
    std::vector<fs::path> dirs;
    for (const auto& de : fs::directory_iterator(results_dir)) {
        if (de.is_directory()) dirs.push_back(de.path());
    }
    dirs.push_back(results_dir);
    std::sort(dirs.begin(), dirs.end());

    for (const auto& dir : dirs) {
        const auto metrics_path = dir / "metrics.json";
        const auto controller_path = dir / "controller.json";
        if (!fs::exists(metrics_path) || !fs::exists(controller_path)) continue;
        Entry e;
        try {
            const auto cj = nlohmann::json::parse(read_text_file(controller_path.string()));
            e.name = cj.value("name", dir.filename().string());
            e.params = controller_from_json(cj);
            const auto mj = nlohmann::json::parse(read_text_file(metrics_path.string()));
            e.metrics.ise = mj.at("ise").get<double>();
            e.metrics.step_std = mj.at("step_std").get<double>();
            e.metrics.control_mean = mj.at("control_mean").get<double>();
            e.metrics.control_std = mj.at("control_std").get<double>();
        } catch (const std::exception& ex) {
            throw std::runtime_error("bad result file in " + dir.string() + ": " + ex.what());
        }
        const auto anova_path = dir / "anova.csv";
        if (fs::exists(anova_path)) {
            const std::string text = read_text_file(anova_path.string());
            std::map<std::string, int> metric_idx = {
                {"ise", 0}, {"step_std", 1}, {"u_mean", 2}, {"u_std", 3}};
            std::map<std::string, int> effect_idx;
            for (int i = 0; i < 7; ++i) effect_idx[kEffectNames[i]] = i;
            std::istringstream in(text);
            std::string line;
            std::getline(in, line); // header
            while (std::getline(in, line)) {
                std::istringstream ls(line);
                std::string metric, effect, ss, pct;
                std::getline(ls, metric, ',');
                std::getline(ls, effect, ',');
                std::getline(ls, ss, ',');
                std::getline(ls, pct, ',');
                if (metric_idx.count(metric) && effect_idx.count(effect)) {
                    e.influence[metric_idx[metric]][effect_idx[effect]] = std::stod(pct);
                    e.has_influence = true;
                }
            }
        }
        entries.push_back(std::move(e));
    }
    if (entries.empty()) {
        throw std::runtime_error("no results (metrics.json + controller.json) under " +
                                 results_dir);
    }

    // Preset ordering first, then everything else by name.
    const auto rank = [](const std::string& n) {
        for (std::size_t i = 0; i < kPresetOrder.size(); ++i) {
            if (n == kPresetOrder[i]) return static_cast<int>(i);
        }
        return static_cast<int>(kPresetOrder.size());
    };
    std::stable_sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
        const int ra = rank(a.name), rb = rank(b.name);
        return ra != rb ? ra < rb : a.name < b.name;
    });

    std::string csv = "controller,k,tau_i,tau_d,lambda,mu,ise,control_mean\n";
    std::printf("%-10s %8s %8s %8s %7s %6s %9s %9s\n", "controller", "k", "tau_i",
                "tau_d", "lambda", "mu", "ise", "u_mean");
    for (const auto& e : entries) {
        csv += csv_field(e.name) + ',' + format_double(e.params.k) + ',' +
               format_double(e.params.tau_i) + ',' + format_double(e.params.tau_d) + ',' +
               format_double(e.params.lambda) + ',' + format_double(e.params.mu) + ',' +
               format_double(e.metrics.ise) + ',' + format_double(e.metrics.control_mean) +
               '\n';
        std::printf("%-10s %8.4g %8.4g %8.4g %7.3g %6.3g %9.4f %9.4f\n", e.name.c_str(),
                    e.params.k, e.params.tau_i, e.params.tau_d, e.params.lambda,
                    e.params.mu, e.metrics.ise, e.metrics.control_mean);
    }

    std::string inf_csv = "controller,metric,effect,percentage\n";
    bool any_influence = false;
    for (const auto& e : entries) {
        if (!e.has_influence) continue;
        any_influence = true;
        for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
            for (int i = 0; i < 7; ++i) {
                inf_csv += csv_field(e.name) + ',' + metric_name(kAllMetrics[m]) + ',' +
                           kEffectNames[i] + ',' + format_double(e.influence[m][i]) + '\n';
            }
        }
    }

    fs::create_directories(outdir);
    write_text_file(outdir + "/summary.csv", csv);
    if (any_influence) write_text_file(outdir + "/influence_matrix.csv", inf_csv);
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"fractional/integer PID robustness laboratory"};
    app.require_subcommand(1);

    std::string spec_file, family = "fopid", outdir;
    std::uint64_t seed = 42;
    bool seed_given = false;
    int starts = 16, threads = 0, replicates = 2;
    ControllerSource source;
    std::string config_file, results_dir;
    bool fa = false, fb = false, fc = false, replay = false;

    app.add_flag("--version", "print version and exit");
    app.add_option("--seed", seed, "global RNG seed (recorded in manifests)")
        ->each([&](const std::string&) { seed_given = true; });

    app.fallthrough(); // global --seed may appear after the subcommand
    auto* tune_cmd = app.add_subcommand("tune", "frequency-domain controller tuning");
    tune_cmd->fallthrough();
    tune_cmd->add_option("--spec", spec_file, "FrequencySpec JSON file")->required();
    tune_cmd->add_option("--family", family, "fopid | iopid")
        ->check(CLI::IsMember({"fopid", "iopid"}));
    tune_cmd->add_option("--outdir", outdir, "output directory");
    tune_cmd->add_option("--starts", starts, "random multi-start count");
    tune_cmd->add_option("--threads", threads, "OpenMP thread cap (0 = default)");

    auto* sim_cmd = app.add_subcommand("simulate", "one closed-loop run");
    sim_cmd->fallthrough();
    sim_cmd->add_option("--preset", source.preset, "fopid | simc | iopid");
    sim_cmd->add_option("--controller", source.file, "controller JSON file");
    sim_cmd->add_option("--config", config_file, "SimConfig JSON file");
    sim_cmd->add_flag("--factor-a", fa, "double the plant gain");
    sim_cmd->add_flag("--factor-b", fb, "+-10% measurement noise");
    sim_cmd->add_flag("--factor-c", fc, "+20% load step at t = 15 s");
    sim_cmd->add_option("--outdir", outdir, "output directory");

    auto* doe_cmd = app.add_subcommand("doe", "2^3 factorial campaign + ANOVA");
    doe_cmd->fallthrough();
    doe_cmd->add_option("--preset", source.preset, "fopid | simc | iopid");
    doe_cmd->add_option("--controller", source.file, "controller JSON file");
    doe_cmd->add_option("--replicates", replicates, "replicates per cell");
    doe_cmd->add_option("--config", config_file, "base SimConfig JSON file");
    doe_cmd->add_option("--outdir", outdir, "output directory");
    doe_cmd->add_flag("--replay-paper", replay,
                      "recompute influence from the bundled reference tables");
    doe_cmd->add_option("--threads", threads, "OpenMP thread cap (0 = default)");

    auto* report_cmd = app.add_subcommand("report", "consolidated comparison tables");
    report_cmd->fallthrough();
    report_cmd->add_option("dir", results_dir, "directory of run outputs")->required();
    report_cmd->add_option("--outdir", outdir, "output directory");

    std::vector<const char*> argv;
    argv.push_back("fracbench");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (app.count("--version")) {
        std::printf("fracbench %s\n", kVersion);
        return 0;
    }

    if (outdir.empty()) outdir = default_outdir();
    try {
        if (tune_cmd->parsed()) {
            return cmd_tune(spec_file, family, outdir, seed, starts, threads);
        }
        if (sim_cmd->parsed()) {
            if (source.preset.empty() == source.file.empty()) {
                std::fprintf(stderr, "simulate: give exactly one of --preset/--controller\n");
                return 1;
            }
            return cmd_simulate(source, config_file, fa, fb, fc, outdir,
                                seed_given ? std::optional<std::uint64_t>(seed)
                                           : std::nullopt);
        }
        if (doe_cmd->parsed()) {
            if (!replay && source.preset.empty() == source.file.empty()) {
                std::fprintf(stderr, "doe: give exactly one of --preset/--controller\n");
                return 1;
            }
            return cmd_doe(source, replicates, config_file, outdir,
                           seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt,
                           replay, threads);
        }
        if (report_cmd->parsed()) {
            return cmd_report(results_dir, outdir);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

} // namespace fracbench
