#pragma once

#include "ballast/simulator.hpp"

#include <span>
#include <string>
#include <vector>

namespace ballast {

/// Hyperparameter grid: horizons x sampling times x log-spaced omegas.
struct SweepSpec {
    std::vector<int> horizons_hours{12, 18, 24, 48};
    std::vector<int> steps_minutes{30, 60, 120, 180, 240};
    int omega_count = 16;
    double omega_lo = 1.0;
    double omega_hi = 1e15;
    double comfort_bound_k = 1.5;  // max daily |dT| a cell may reach

    void validate() const;
};

struct SweepCell {
    int horizon_hours = 0;
    int step_minutes = 0;
    double omega = 0.0;
    double emissions_reduction_percent = 0.0;
    double avg_daily_saving_g = 0.0;
    double avg_daily_delta_t_k = 0.0;
    double max_daily_delta_t_k = 0.0;
};

struct SweepResult {
    std::vector<SweepCell> cells;
    std::vector<std::string> skipped;  // one message per unusable (m, ts, omega) cell
};

std::vector<double> log_spaced(int count, double lo, double hi);

/// Simulates every usable cell of the grid. Cells whose horizon is not a
/// whole number of steps, or whose step the surrogate cannot be converted
/// to, are skipped and reported instead of aborting the sweep. Cells run in
/// parallel (capped by max_threads, or by THERMAL_BALLAST_THREADS when
/// max_threads is 0); the result order is deterministic.
SweepResult sweep(const ScenarioConfig& scenario, const SweepSpec& spec, int max_threads = 0);

/// Non-dominated cells (maximize reduction, minimize max daily |dT|),
/// ties kept, sorted by deviation ascending.
std::vector<SweepCell> pareto_front(std::span<const SweepCell> cells);

/// Highest-reduction cell whose deviation stays within the bound. Ties break
/// toward smaller deviation, then smaller horizon, then larger step. Throws
/// NoFeasibleCell when nothing qualifies.
SweepCell select_optimum(std::span<const SweepCell> front, double comfort_bound_k);

void write_cells_csv(std::ostream& os, std::span<const SweepCell> cells);
std::string cell_to_json(const SweepCell& cell);

/// Matrix data behind the (ts x m) heat-map panels: for each grid position
/// the best-reduction omega within the comfort bound.
void write_heatmap_csv(std::ostream& os, const SweepSpec& spec, std::span<const SweepCell> cells);

}  // namespace ballast
