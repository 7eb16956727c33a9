/**
 * @file reference_data.hpp
 * @brief Bundled reference campaign results and influence percentages for
 *        the three preset controllers, used by the replay/diff mode.
 */
#pragma once

#include <array>
#include <string>
#include <vector>

#include "fracbench/factorial.hpp"

namespace fracbench {

inline constexpr std::array<const char*, 3> kPresetOrder = {"FOPID", "SIMC PID", "IOPID"};

/// Reference per-cell responses, one row per (C, B, A) combination in table
/// order, columns (ise, step_std, u_mean, u_std).
const std::array<std::array<double, 4>, 8>& reference_cells(const std::string& controller);

/// Reference influence percentages, 7 effects in kEffectNames order.
const std::array<double, 7>& reference_influence(const std::string& controller,
                                                 Metric metric);

/// Reference cells wrapped as a single-replicate FactorialTable.
FactorialTable reference_table(const std::string& controller);

struct ReplayEntry {
    std::string controller;
    Metric metric = Metric::Ise;
    std::array<double, 7> computed{};  // influence() on the bundled cells
    std::array<double, 7> reference{}; // bundled influence values
};

/// Recomputes the influence decomposition from the bundled cell data and
/// pairs it with the bundled percentages for side-by-side comparison.
/// Agreement is not asserted anywhere; the bundled tables contain repeated
/// rows that make an exact regeneration impossible.
std::vector<ReplayEntry> reproduce_reference_tables();

} // namespace fracbench
