#pragma once

#include "ballast/controller.hpp"
#include "ballast/thermal_model.hpp"
#include "ballast/timeseries.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ballast {

/// Heating-season window in local calendar dates, [start, end) and possibly
/// wrapping the year end.
struct SeasonWindow {
    int start_month = 10;
    int start_day = 15;
    int end_month = 4;
    int end_day = 15;
};

bool in_heating_season(TimePoint t, Minutes tz_offset, const SeasonWindow& season);

/// Full description of a simulation run. Signals may come at any resolution
/// that resamples cleanly to the controller step over [start, end).
struct ScenarioConfig {
    TimePoint start;
    TimePoint end;  // exclusive
    Minutes tz_offset{60};
    SeasonWindow heating_season;
    Schedule setpoint_winter;
    Schedule setpoint_summer;
    Schedule occupancy;
    TimeSeries ci;     // gCO2/kWh
    TimeSeries pv;     // kWh per source step
    TimeSeries t_ext;  // degC
    std::optional<StateSpaceModel> winter_model;
    std::optional<StateSpaceModel> summer_model;
    ControllerConfig controller;
};

struct StepRecord {
    TimePoint timestamp;
    Mode mode;
    double t_ref_user_c;
    double t_ref_applied_c;
    double alpha;
    double e_pred_kwh;
    double e_solar_kwh;
    double surplus_kwh;
    double grid_import_kwh;
    double ci_g_kwh;
    double emissions_g;
    double delta_co2_g;
    double delta_t_k;
};

struct SimulationTotals {
    double baseline_emissions_kg = 0.0;
    double controlled_emissions_kg = 0.0;
    double baseline_energy_kwh = 0.0;
    double controlled_energy_kwh = 0.0;
    double emissions_reduction_percent = 0.0;
    double avg_daily_saving_g = 0.0;
    double avg_daily_delta_t_k = 0.0;
    double max_daily_delta_t_k = 0.0;
    std::size_t n_days = 0;
};

struct SimulationResult {
    std::vector<StepRecord> records;
    SimulationTotals totals;
};

/// Runs the scenario. The demand trajectory always follows the user
/// schedules; the controlled run layers the receding-horizon decisions and
/// the stored-energy offset accounting on top, so its emissions can never
/// exceed the baseline's (the offset only shrinks clipped imports).
/// Offsets scheduled by overlapping horizons add up but releases are capped
/// by the energy physically deposited (gamma alpha(k) surplus(k) per step),
/// so a surplus kWh is never credited more than once.
SimulationResult run(const ScenarioConfig& scenario, bool controlled);

/// Emission saving the decision alpha produces at window position k:
/// baseline step emissions minus offset-reduced step emissions (>= 0).
double delta_co2_step(const ForecastWindow& fw, double alpha, std::size_t k);

/// Totals and per-local-calendar-day statistics over a ledger.
SimulationTotals aggregate(std::span<const StepRecord> records, Minutes tz_offset);

/// Ledger CSV: timestamp,mode,alpha,delta_T,e_pred,e_solar,grid_import,emissions,delta_co2
void write_ledger_csv(std::ostream& os, std::span<const StepRecord> records);

/// Summary JSON; reduction fields are null for a baseline-only run.
std::string summary_to_json(const SimulationResult& result, bool include_reduction);

}  // namespace ballast
