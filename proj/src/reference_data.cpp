#include "fracbench/reference_data.hpp"

#include <map>
#include <stdexcept>

namespace fracbench {

namespace {

// Rows in (C, B, A) order: 000, 001, 010, 011, 100, 101, 110, 111
// (C slowest, A fastest); columns ise, step_std, u_mean, u_std.
const std::array<std::array<double, 4>, 8> kFopidCells = {{
    {0.49, 0.13, 0.11, 0.208},
    {0.49, 0.13, 0.11, 0.208},
    {0.73, 0.15, 0.292, 0.21},
    {0.81, 0.163, 0.323, 0.29},
    {0.77, 0.161, 0.252, 0.219},
    {0.76, 0.158, 0.366, 0.293},
    {0.81, 0.163, 0.323, 0.294},
    {0.59, 0.141, 0.169, 0.263},
}};

const std::array<std::array<double, 4>, 8> kIopidCells = {{
    {0.867, 0.172, 0.296, 0.438},
    {0.866, 0.170, 0.720, 0.743},
    {0.536, 0.137, 0.155, 0.437},
    {0.826, 0.168, 0.337, 0.433},
    {0.867, 0.172, 0.296, 0.438},
    {0.913, 0.175, 0.667, 0.739},
    {0.913, 0.175, 0.667, 0.739},
    {0.826, 0.168, 0.337, 0.433},
}};

const std::array<std::array<double, 4>, 8> kSimcCells = {{
    {3.67, 0.352, 0.403, 0.555},
    {1.562, 0.230, 0.762, 0.620},
    {1.597, 0.232, 0.733, 0.629},
    {1.976, 0.257, 1.699, 1.148},
    {1.976, 0.257, 1.699, 1.148},
    {4.639, 0.393, 1.136, 1.041},
    {1.976, 0.257, 1.699, 1.148},
    {1.944, 0.256, 1.816, 1.173},
}};

// Influence percentages, effects in {A, B, AB, C, AC, BC, ABC} order,
// per metric (ise, step_std, u_mean, u_std).
using InfluenceBlock = std::array<std::array<double, 7>, 4>;

const InfluenceBlock kFopidInfluence = {{
    {45.761, 22.089, 12.026, 10.141, 3.099, 3.572, 3.312},
    {46.368, 18.641, 14.654, 11.215, 2.845, 3.130, 3.147},
    {47.567, 30.478, 0.660, 2.732, 9.099, 4.501, 4.962},
    {1.592, 93.456, 2.084, 0.485, 0.626, 0.396, 1.362},
}};

const InfluenceBlock kSimcInfluence = {{
    {60.561, 0.006, 8.513, 2.730, 9.419, 9.401, 9.370},
    {62.801, 0.000, 7.547, 4.629, 8.523, 8.356, 8.143},
    {9.505, 83.708, 0.865, 0.000, 2.529, 1.183, 2.209},
    {1.562, 97.416, 0.182, 0.001, 0.332, 0.103, 0.404},
}};

const InfluenceBlock kIopidInfluence = {{
    {39.534, 32.512, 7.134, 17.213, 1.173, 1.320, 1.115},
    {40.994, 29.110, 7.487, 19.482, 1.103, 0.942, 0.881},
    {10.329, 84.623, 0.177, 0.341, 2.238, 1.007, 1.286},
    {0.011, 99.904, 0.013, 0.030, 0.012, 0.000, 0.029},
}};

const std::array<std::array<double, 4>, 8>& cells_for(const std::string& name) {
    if (name == "FOPID") return kFopidCells;
    if (name == "SIMC PID") return kSimcCells;
    if (name == "IOPID") return kIopidCells;
    throw std::invalid_argument("reference_cells: unknown controller " + name);
}

const InfluenceBlock& influence_for(const std::string& name) {
    if (name == "FOPID") return kFopidInfluence;
    if (name == "SIMC PID") return kSimcInfluence;
    if (name == "IOPID") return kIopidInfluence;
    throw std::invalid_argument("reference_influence: unknown controller " + name);
}

} // namespace

const std::array<std::array<double, 4>, 8>& reference_cells(const std::string& controller) {
    return cells_for(controller);
}

const std::array<double, 7>& reference_influence(const std::string& controller,
                                                 Metric metric) {
    return influence_for(controller)[static_cast<std::size_t>(metric)];
}

FactorialTable reference_table(const std::string& controller) {
    const auto& cells = cells_for(controller);
    FactorialTable table;
    for (int code = 0; code < 8; ++code) {
        FactorialRow row;
        row.levels = {code & 1, (code >> 1) & 1, (code >> 2) & 1};
        row.replicate = 0;
        row.metrics.ise = cells[code][0];
        row.metrics.step_std = cells[code][1];
        row.metrics.control_mean = cells[code][2];
        row.metrics.control_std = cells[code][3];
        table.rows.push_back(row);
    }
    return table;
}

std::vector<ReplayEntry> reproduce_reference_tables() {
    std::vector<ReplayEntry> out;
    for (const char* name : kPresetOrder) {
        const FactorialTable table = reference_table(name);
        for (Metric metric : kAllMetrics) {
            ReplayEntry entry;
            entry.controller = name;
            entry.metric = metric;
            const InfluenceEntry inf = influence(table, metric);
            for (int e = 0; e < 7; ++e) entry.computed[e] = inf.effects[e].percentage;
            entry.reference = reference_influence(name, metric);
            out.push_back(entry);
        }
    }
    return out;
}

} // namespace fracbench
