#include "fracbench/factorial.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/fisher_f.hpp>

namespace fracbench {

namespace {

constexpr int kCells = 8;

inline int cell_code(const FactorLevels& l) {
    return (l.c_disturbance << 2) | (l.b_noise << 1) | l.a_gain_uncertainty;
}

inline FactorLevels cell_levels(int code) {
    return {code & 1, (code >> 1) & 1, (code >> 2) & 1};
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace

int FactorialTable::replicates() const {
    if (rows.size() % kCells != 0) return 0;
    return static_cast<int>(rows.size()) / kCells;
}

void FactorialTable::validate() const {
    const int r = replicates();
    if (r < 1) throw std::invalid_argument("FactorialTable: incomplete design");
    std::array<int, kCells> counts{};
    for (const auto& row : rows) counts[cell_code(row.levels)]++;
    for (int c : counts) {
        if (c != r) throw std::invalid_argument("FactorialTable: unbalanced design");
    }
}

const char* metric_name(Metric m) {
    switch (m) {
        case Metric::Ise: return "ise";
        case Metric::StepStd: return "step_std";
        case Metric::ControlMean: return "u_mean";
        case Metric::ControlStd: return "u_std";
    }
    return "?";
}

double metric_value(const ResponseMetrics& m, Metric metric) {
    switch (metric) {
        case Metric::Ise: return m.ise;
        case Metric::StepStd: return m.step_std;
        case Metric::ControlMean: return m.control_mean;
        case Metric::ControlStd: return m.control_std;
    }
    return 0.0;
}

std::uint64_t replicate_seed(std::uint64_t base_seed, const FactorLevels& levels,
                             int replicate) {
    const auto code = static_cast<std::uint64_t>(cell_code(levels));
    return base_seed ^ splitmix64((code << 32) + static_cast<std::uint64_t>(replicate) + 1);
}

FactorialTable run_design(const ControllerParams& controller, const SimConfig& base,
                          int replicates, const TransferFunction& plant, bool parallel) {
    if (replicates < 1) throw std::invalid_argument("run_design: replicates must be >= 1");
    base.validate();
    controller.validate();

    FactorialTable table;
    table.rows.resize(static_cast<std::size_t>(kCells) * replicates);

    std::string failure;
    #pragma omp parallel for schedule(dynamic) collapse(2) if (parallel)
    for (int code = 0; code < kCells; ++code) {
        for (int r = 0; r < replicates; ++r) {
            const FactorLevels levels = cell_levels(code);
            FactorialRow row;
            row.levels = levels;
            row.replicate = r;
            try {
                SimConfig cfg = base;
                cfg.factors = levels;
                cfg.seed = replicate_seed(base.seed, levels, r);
                row.metrics = metrics(simulate(controller, cfg, plant));
            } catch (const std::exception& e) {
                #pragma omp critical
                if (failure.empty()) {
                    failure = "run_design: cell C=" + std::to_string(levels.c_disturbance) +
                              " B=" + std::to_string(levels.b_noise) +
                              " A=" + std::to_string(levels.a_gain_uncertainty) +
                              " replicate " + std::to_string(r) + ": " + e.what();
                }
            }
            table.rows[static_cast<std::size_t>(code) * replicates + r] = row;
        }
    }
    if (!failure.empty()) throw std::runtime_error(failure);
    return table;
}

InfluenceEntry influence(const FactorialTable& table, Metric metric) {
    table.validate();
    const int reps = table.replicates();
    const double n_runs = static_cast<double>(kCells * reps);

    std::array<double, 7> contrast{};
    for (const auto& row : table.rows) {
        const double a = row.levels.a_gain_uncertainty ? 1.0 : -1.0;
        const double b = row.levels.b_noise ? 1.0 : -1.0;
        const double c = row.levels.c_disturbance ? 1.0 : -1.0;
        const double y = metric_value(row.metrics, metric);
        const std::array<double, 7> coded = {a, b, a * b, c, a * c, b * c, a * b * c};
        for (int e = 0; e < 7; ++e) contrast[e] += coded[e] * y;
    }

    InfluenceEntry out;
    double total = 0.0;
    for (int e = 0; e < 7; ++e) {
        out.effects[e].sum_of_squares = contrast[e] * contrast[e] / n_runs;
        total += out.effects[e].sum_of_squares;
    }
    if (total == 0.0) {
        out.degenerate = true;
        for (auto& eff : out.effects) {
            eff.percentage = 0.0;
            eff.f_statistic = std::numeric_limits<double>::quiet_NaN();
            eff.p_value = std::numeric_limits<double>::quiet_NaN();
        }
        return out;
    }
    for (auto& eff : out.effects) eff.percentage = 100.0 * eff.sum_of_squares / total;

    // Pure-error F test, reported only (needs replication).
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (reps < 2) {
        for (auto& eff : out.effects) eff.f_statistic = eff.p_value = nan;
        return out;
    }
    std::array<double, kCells> mean{};
    std::array<int, kCells> count{};
    for (const auto& row : table.rows) {
        mean[cell_code(row.levels)] += metric_value(row.metrics, metric);
        count[cell_code(row.levels)]++;
    }
    for (int c = 0; c < kCells; ++c) mean[c] /= count[c];
    double ss_err = 0.0;
    for (const auto& row : table.rows) {
        const double d = metric_value(row.metrics, metric) - mean[cell_code(row.levels)];
        ss_err += d * d;
    }
    const double df_err = static_cast<double>(kCells * (reps - 1));
    const boost::math::fisher_f_distribution<double> fdist(1.0, df_err);
    for (auto& eff : out.effects) {
        if (ss_err == 0.0) {
            eff.f_statistic = std::numeric_limits<double>::infinity();
            eff.p_value = eff.sum_of_squares > 0.0 ? 0.0 : nan;
            continue;
        }
        eff.f_statistic = eff.sum_of_squares / (ss_err / df_err);
        eff.p_value = boost::math::cdf(boost::math::complement(fdist, eff.f_statistic));
    }
    return out;
}

double measurement_factor(double data, double influence_pct) {
    if (!(influence_pct >= 0.0 && influence_pct <= 100.0)) {
        throw std::invalid_argument("measurement_factor: influence must be in [0, 100]");
    }
    return data * influence_pct / 100.0;
}

std::array<ResponseMetrics, 8> cell_means(const FactorialTable& table) {
    table.validate();
    std::array<ResponseMetrics, 8> out{};
    std::array<int, 8> counts{};
    for (const auto& row : table.rows) {
        auto& acc = out[cell_code(row.levels)];
        acc.ise += row.metrics.ise;
        acc.step_std += row.metrics.step_std;
        acc.control_mean += row.metrics.control_mean;
        acc.control_std += row.metrics.control_std;
        counts[cell_code(row.levels)]++;
    }
    for (int c = 0; c < 8; ++c) {
        out[c].ise /= counts[c];
        out[c].step_std /= counts[c];
        out[c].control_mean /= counts[c];
        out[c].control_std /= counts[c];
    }
    return out;
}

} // namespace fracbench
