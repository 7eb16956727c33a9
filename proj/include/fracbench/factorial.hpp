/**
 * @file factorial.hpp
 * @brief 2^3 full-factorial campaign execution with replication and
 *        ANOVA-style effect/influence analysis.
 *
 * Effects are estimated by orthogonal contrasts over +-1 coded levels.
 * Influence percentages normalize each effect's sum of squares by the sum
 * over the seven effects, so every column sums to 100. F statistics
 * against pure error are reported when replicates allow.
 */
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fracbench/simloop.hpp"

namespace fracbench {

struct FactorialRow {
    FactorLevels levels;
    int replicate = 0;
    ResponseMetrics metrics;
};

/// Complete 2^3 design: all 8 level combinations, equal replicate counts.
struct FactorialTable {
    std::vector<FactorialRow> rows;

    int replicates() const;
    void validate() const;
};

enum class Metric { Ise, StepStd, ControlMean, ControlStd };
inline constexpr std::array<Metric, 4> kAllMetrics = {
    Metric::Ise, Metric::StepStd, Metric::ControlMean, Metric::ControlStd};

const char* metric_name(Metric m);
double metric_value(const ResponseMetrics& m, Metric metric);

inline constexpr std::array<const char*, 7> kEffectNames = {"A", "B",  "AB", "C",
                                                            "AC", "BC", "ABC"};

struct EffectEntry {
    double sum_of_squares = 0.0;
    double percentage = 0.0;
    double f_statistic = 0.0; // NaN without replication
    double p_value = 0.0;     // NaN without replication
};

struct InfluenceEntry {
    std::array<EffectEntry, 7> effects; // order matches kEffectNames
    bool degenerate = false;            // all responses equal
};

/// Deterministic seed for one cell/replicate of a campaign.
std::uint64_t replicate_seed(std::uint64_t base_seed, const FactorLevels& levels,
                             int replicate);

/// Runs all 8 level combinations x replicates; cells are independent and
/// dispatched in parallel, assembled in fixed (C, B, A, replicate) order.
FactorialTable run_design(const ControllerParams& controller, const SimConfig& base,
                          int replicates,
                          const TransferFunction& plant = design_plant(),
                          bool parallel = true);

InfluenceEntry influence(const FactorialTable& table, Metric metric);

/// MF = data * influence% / 100.
double measurement_factor(double data, double influence_pct);

/// Per-cell replicate means in table order, for the MF matrix.
std::array<ResponseMetrics, 8> cell_means(const FactorialTable& table);

} // namespace fracbench
