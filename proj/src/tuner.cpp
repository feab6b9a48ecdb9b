#include "ballast/tuner.hpp"

#include "ballast/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <thread>

#include <json.hpp>

namespace ballast {

void SweepSpec::validate() const {
    if (horizons_hours.empty() || steps_minutes.empty()) throw Error("sweep lists must be non-empty");
    if (omega_count < 1) throw Error("omega count must be at least 1");
    if (!(omega_lo > 0.0) || !(omega_lo < omega_hi) ) throw Error("omega range must satisfy 0 < lo < hi");
    if (!(comfort_bound_k > 0.0)) throw Error("comfort bound must be positive");
}

std::vector<double> log_spaced(int count, double lo, double hi) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        out.push_back(lo);
        return out;
    }
    const double log_lo = std::log10(lo);
    const double log_hi = std::log10(hi);
    for (int i = 0; i < count; ++i)
        out.push_back(std::pow(10.0, log_lo + (log_hi - log_lo) * i / (count - 1)));
    return out;
}

namespace {

int thread_cap_from_env() {
    const char* env = std::getenv("THERMAL_BALLAST_THREADS");
    if (env == nullptr) return 0;
    const int v = std::atoi(env);
    return v > 0 ? v : 1;
}

struct CellTask {
    int horizon_hours;
    int step_minutes;
    double omega;
};

}  // namespace

SweepResult sweep(const ScenarioConfig& scenario, const SweepSpec& spec, int max_threads) {
    spec.validate();
    const std::vector<double> omegas = log_spaced(spec.omega_count, spec.omega_lo, spec.omega_hi);

    SweepResult result;
    std::vector<CellTask> tasks;
    for (int m_hours : spec.horizons_hours)
        for (int ts : spec.steps_minutes) {
            if (ts <= 0 || (m_hours * 60) % ts != 0) {
                result.skipped.push_back("m=" + std::to_string(m_hours) + "h ts=" +
                                         std::to_string(ts) +
                                         "min: horizon is not a whole number of steps");
                continue;
            }
            for (double omega : omegas) tasks.push_back({m_hours, ts, omega});
        }

    std::vector<SweepCell> cells(tasks.size());
    std::vector<std::string> errors(tasks.size());

    auto run_task = [&](std::size_t idx) {
        const CellTask& task = tasks[idx];
        try {
            ScenarioConfig cell_scenario = scenario;
            cell_scenario.controller.omega = task.omega;
            cell_scenario.controller.step = Minutes{task.step_minutes};
            cell_scenario.controller.horizon_steps =
                static_cast<std::size_t>(task.horizon_hours * 60 / task.step_minutes);
            if (cell_scenario.winter_model.has_value())
                cell_scenario.winter_model =
                    downsample_model(*cell_scenario.winter_model, Minutes{task.step_minutes});
            if (cell_scenario.summer_model.has_value())
                cell_scenario.summer_model =
                    downsample_model(*cell_scenario.summer_model, Minutes{task.step_minutes});

            const SimulationResult sim = run(cell_scenario, /*controlled=*/true);
            SweepCell& cell = cells[idx];
            cell.horizon_hours = task.horizon_hours;
            cell.step_minutes = task.step_minutes;
            cell.omega = task.omega;
            cell.emissions_reduction_percent = sim.totals.emissions_reduction_percent;
            cell.avg_daily_saving_g = sim.totals.avg_daily_saving_g;
            cell.avg_daily_delta_t_k = sim.totals.avg_daily_delta_t_k;
            cell.max_daily_delta_t_k = sim.totals.max_daily_delta_t_k;
        } catch (const Error& e) {
            errors[idx] = e.what();
        }
    };

    int threads = max_threads > 0 ? max_threads : thread_cap_from_env();
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp<int>(threads, 1, static_cast<int>(tasks.size() ? tasks.size() : 1));

    if (threads <= 1 || tasks.size() <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
                    run_task(i);
            });
        for (auto& th : pool) th.join();
    }

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!errors[i].empty()) {
            result.skipped.push_back("m=" + std::to_string(tasks[i].horizon_hours) + "h ts=" +
                                     std::to_string(tasks[i].step_minutes) + "min omega=" +
                                     std::to_string(tasks[i].omega) + ": " + errors[i]);
            continue;
        }
        result.cells.push_back(cells[i]);
    }
    return result;
}

namespace {

// a dominates b: no worse on both objectives, strictly better on one
bool dominates(const SweepCell& a, const SweepCell& b) {
    const bool no_worse = a.emissions_reduction_percent >= b.emissions_reduction_percent &&
                          a.max_daily_delta_t_k <= b.max_daily_delta_t_k;
    const bool better = a.emissions_reduction_percent > b.emissions_reduction_percent ||
                        a.max_daily_delta_t_k < b.max_daily_delta_t_k;
    return no_worse && better;
}

}  // namespace

std::vector<SweepCell> pareto_front(std::span<const SweepCell> cells) {
    std::vector<SweepCell> front;
    for (const auto& candidate : cells) {
        bool dominated = false;
        for (const auto& other : cells) {
            if (&other == &candidate) continue;
            if (dominates(other, candidate)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) front.push_back(candidate);
    }
    std::stable_sort(front.begin(), front.end(), [](const SweepCell& a, const SweepCell& b) {
        if (a.max_daily_delta_t_k != b.max_daily_delta_t_k)
            return a.max_daily_delta_t_k < b.max_daily_delta_t_k;
        return a.emissions_reduction_percent < b.emissions_reduction_percent;
    });
    return front;
}

SweepCell select_optimum(std::span<const SweepCell> front, double comfort_bound_k) {
    const SweepCell* best = nullptr;
    for (const auto& cell : front) {
        if (cell.max_daily_delta_t_k > comfort_bound_k) continue;
        if (best == nullptr) {
            best = &cell;
            continue;
        }
        if (cell.emissions_reduction_percent != best->emissions_reduction_percent) {
            if (cell.emissions_reduction_percent > best->emissions_reduction_percent) best = &cell;
            continue;
        }
        if (cell.max_daily_delta_t_k != best->max_daily_delta_t_k) {
            if (cell.max_daily_delta_t_k < best->max_daily_delta_t_k) best = &cell;
            continue;
        }
        if (cell.horizon_hours != best->horizon_hours) {
            if (cell.horizon_hours < best->horizon_hours) best = &cell;
            continue;
        }
        if (cell.step_minutes > best->step_minutes) best = &cell;
    }
    if (best == nullptr)
        throw NoFeasibleCell("no cell keeps max daily |dT| within " +
                             std::to_string(comfort_bound_k) + " K");
    return *best;
}

void write_cells_csv(std::ostream& os, std::span<const SweepCell> cells) {
    os << "m_hours,ts_minutes,omega,reduction_percent,avg_daily_saving_g,avg_daily_delta_t,"
          "max_daily_delta_t\n";
    char line[224];
    for (const auto& c : cells) {
        std::snprintf(line, sizeof(line), "%d,%d,%.17g,%.6f,%.6f,%.6f,%.6f\n", c.horizon_hours,
                      c.step_minutes, c.omega, c.emissions_reduction_percent,
                      c.avg_daily_saving_g, c.avg_daily_delta_t_k, c.max_daily_delta_t_k);
        os << line;
    }
}

std::string cell_to_json(const SweepCell& cell) {
    nlohmann::json j;
    j["m_hours"] = cell.horizon_hours;
    j["ts_minutes"] = cell.step_minutes;
    j["omega"] = cell.omega;
    j["emissions_reduction_percent"] = cell.emissions_reduction_percent;
    j["avg_daily_saving_g"] = cell.avg_daily_saving_g;
    j["avg_daily_delta_t_k"] = cell.avg_daily_delta_t_k;
    j["max_daily_delta_t_k"] = cell.max_daily_delta_t_k;
    return j.dump(2);
}

void write_heatmap_csv(std::ostream& os, const SweepSpec& spec, std::span<const SweepCell> cells) {
    os << "ts_minutes,m_hours,best_reduction_percent,best_max_daily_delta_t,best_omega\n";
    char line[160];
    for (int ts : spec.steps_minutes)
        for (int m_hours : spec.horizons_hours) {
            const SweepCell* best = nullptr;
            for (const auto& c : cells) {
                if (c.step_minutes != ts || c.horizon_hours != m_hours) continue;
                if (c.max_daily_delta_t_k > spec.comfort_bound_k) continue;
                if (best == nullptr ||
                    c.emissions_reduction_percent > best->emissions_reduction_percent)
                    best = &c;
            }
            if (best == nullptr) continue;
            std::snprintf(line, sizeof(line), "%d,%d,%.6f,%.6f,%.17g\n", ts, m_hours,
                          best->emissions_reduction_percent, best->max_daily_delta_t_k,
                          best->omega);
            os << line;
        }
}

}  // namespace ballast
