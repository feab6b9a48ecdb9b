#include "ballast/simulator.hpp"

#include "ballast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include <json.hpp>

namespace ballast {

bool in_heating_season(TimePoint t, Minutes tz_offset, const SeasonWindow& season) {
    const auto local_days = std::chrono::floor<std::chrono::days>(t + tz_offset);
    const std::chrono::year_month_day ymd{local_days};
    const int md = static_cast<int>(static_cast<unsigned>(ymd.month())) * 100 +
                   static_cast<int>(static_cast<unsigned>(ymd.day()));
    const int begin = season.start_month * 100 + season.start_day;
    const int finish = season.end_month * 100 + season.end_day;
    if (begin <= finish) return md >= begin && md < finish;
    return md >= begin || md < finish;  // wraps the year end
}

namespace {

// Cuts [start, end) out of a source series and brings it to the controller
// step. Gaps, misalignment and partial coverage all surface as SignalGap.
TimeSeries align_signal(const TimeSeries& source, TimePoint start, TimePoint end, Minutes step,
                        const char* name) {
    const auto duration = std::chrono::seconds(end - start).count();
    const auto source_step = std::chrono::seconds(source.step()).count();
    if (duration <= 0) throw SignalGap(std::string(name) + ": empty scenario range");
    if (duration % source_step != 0)
        throw SignalGap(std::string(name) + ": scenario range is not a whole number of samples");
    std::size_t first;
    try {
        first = source.index_of(start);
    } catch (const SignalGap&) {
        throw SignalGap(std::string(name) + ": series does not cover the scenario start");
    }
    const auto count = static_cast<std::size_t>(duration / source_step);
    if (first + count > source.size())
        throw SignalGap(std::string(name) + ": series ends before the scenario end");
    TimeSeries cut(start, source.step(),
                   std::vector<double>(source.values().begin() + static_cast<std::ptrdiff_t>(first),
                                       source.values().begin() +
                                           static_cast<std::ptrdiff_t>(first + count)),
                   source.unit());
    return resample(cut, step);
}

const StateSpaceModel& season_model(const ScenarioConfig& sc, bool heating) {
    const auto& slot = heating ? sc.winter_model : sc.summer_model;
    if (!slot.has_value())
        throw ModelMissing(std::string("no ") + (heating ? "winter" : "summer") +
                           " surrogate model configured");
    return *slot;
}

std::chrono::sys_days local_day(TimePoint t, Minutes tz_offset) {
    return std::chrono::floor<std::chrono::days>(t + tz_offset);
}

}  // namespace

SimulationResult run(const ScenarioConfig& scenario, bool controlled) {
    scenario.controller.validate();
    const Minutes step = scenario.controller.step;
    const auto duration = std::chrono::seconds(scenario.end - scenario.start).count();
    const auto step_s = std::chrono::seconds(step).count();
    if (duration <= 0 || duration % step_s != 0)
        throw SignalGap("scenario range is not a whole number of controller steps");
    const auto n_steps = static_cast<std::size_t>(duration / step_s);
    const double step_hours = static_cast<double>(step.count()) / 60.0;

    const TimeSeries ci = align_signal(scenario.ci, scenario.start, scenario.end, step, "ci");
    const TimeSeries pv = align_signal(scenario.pv, scenario.start, scenario.end, step, "pv");
    const TimeSeries t_ext =
        align_signal(scenario.t_ext, scenario.start, scenario.end, step, "t_ext");
    if (ci.unit() != Unit::grams_co2_per_kwh) throw UnitMismatch("ci series must be gCO2/kWh");
    if (pv.unit() != Unit::kilowatt_hour) throw UnitMismatch("pv series must be kWh");
    if (t_ext.unit() != Unit::celsius) throw UnitMismatch("t_ext series must be degC");

    // per-step season flags and user-scheduled inputs
    std::vector<bool> heating(n_steps);
    std::vector<double> t_ref_values(n_steps), occ_values(n_steps);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const TimePoint t = scenario.start + k * step;
        heating[k] = in_heating_season(t, scenario.tz_offset, scenario.heating_season);
        const Schedule& setpoints =
            heating[k] ? scenario.setpoint_winter : scenario.setpoint_summer;
        t_ref_values[k] = setpoints.sample(t, scenario.tz_offset);
        occ_values[k] = scenario.occupancy.sample(t, scenario.tz_offset);
    }
    const SignalSet signals{
        TimeSeries(scenario.start, step, std::move(t_ref_values), Unit::celsius),
        TimeSeries(scenario.start, step, std::move(occ_values), Unit::persons),
        t_ext,
        pv,
        ci,
    };

    // make sure every season that actually occurs has a model at this step
    for (bool h : {true, false}) {
        if (std::find(heating.begin(), heating.end(), h) == heating.end()) continue;
        const StateSpaceModel& model = season_model(scenario, h);
        if (model.step() != step)
            throw StepMismatch("surrogate model step does not match the controller step");
    }

    SimulationResult result;
    result.records.reserve(n_steps);

    StateVector x_winter{}, x_summer{};
    std::optional<bool> previous_season;
    std::vector<double> scheduled_offset(n_steps, 0.0);
    double stored_balance_kwh = 0.0;

    for (std::size_t k = 0; k < n_steps; ++k) {
        const TimePoint t = scenario.start + k * step;
        const bool is_heating = heating[k];
        const StateSpaceModel& model = season_model(scenario, is_heating);
        StateVector& x = is_heating ? x_winter : x_summer;
        if (previous_season.has_value() && *previous_season != is_heating)
            x = StateVector{};  // season switch: restart the incoming surrogate from rest
        previous_season = is_heating;

        ControllerConfig cfg = scenario.controller;
        cfg.mode_sign = is_heating ? +1 : -1;

        const InputVector u{signals.t_ref.values()[k], signals.n_occ.values()[k],
                            signals.t_ext.values()[k]};
        const double e_pred = std::max(model.output(x, u), 0.0) * step_hours;

        ControlDecision decision;
        if (controlled && n_steps - k >= 2) {
            const ForecastWindow fw = build_window(cfg, model, signals, k, x);
            decision = alpha_star(cfg, fw);
            if (decision.alpha > 0.0) {
                // what physically enters the mass now is this step's own
                // surplus share (delta_q); the planned uniform release spans
                // the whole window. Overlapping horizons re-plan the same
                // future surplus, so releases are capped by the deposits --
                // each surplus kWh can be stored at most once.
                stored_balance_kwh += decision.delta_q_kwh;
                double surplus = 0.0;
                for (std::size_t i = 0; i < fw.size(); ++i)
                    surplus += std::max(fw.e_solar_kwh[i] - fw.e_pred_kwh[i], 0.0);
                const double per_step =
                    decision.alpha / static_cast<double>(fw.size()) * surplus;
                for (std::size_t i = k; i < k + fw.size(); ++i) scheduled_offset[i] += per_step;
            }
        }

        const double e_solar = signals.e_solar.values()[k];
        const double baseline_import = std::max(e_pred - e_solar, 0.0);
        // the scheduled offset is a potential reduction; it only consumes
        // stored energy when it actually displaces an import
        const double credit =
            std::min({scheduled_offset[k], stored_balance_kwh, baseline_import});
        stored_balance_kwh -= credit;
        const double grid_import = baseline_import - credit;
        const double ci_k = signals.ci.values()[k];

        StepRecord record;
        record.timestamp = t;
        record.mode = is_heating ? Mode::heating : Mode::cooling;
        record.t_ref_user_c = u[0];
        record.t_ref_applied_c = u[0] + decision.delta_t_k;
        record.alpha = decision.alpha;
        record.e_pred_kwh = e_pred;
        record.e_solar_kwh = e_solar;
        record.surplus_kwh = std::max(e_solar - e_pred, 0.0);
        record.grid_import_kwh = grid_import;
        record.ci_g_kwh = ci_k;
        record.emissions_g = grid_import * ci_k;
        record.delta_co2_g = credit * ci_k;
        record.delta_t_k = decision.delta_t_k;
        result.records.push_back(record);

        model.advance(x, u);
    }

    result.totals = aggregate(result.records, scenario.tz_offset);
    return result;
}

double delta_co2_step(const ForecastWindow& fw, double alpha, std::size_t k) {
    if (k >= fw.size()) throw OutOfRange("window position out of range");
    double surplus = 0.0;
    for (std::size_t i = 0; i < fw.size(); ++i)
        surplus += std::max(fw.e_solar_kwh[i] - fw.e_pred_kwh[i], 0.0);
    const double offset = alpha / static_cast<double>(fw.size()) * surplus;
    const double import = std::max(fw.e_pred_kwh[k] - fw.e_solar_kwh[k], 0.0);
    return std::min(offset, import) * fw.ci_g_kwh[k];
}

SimulationTotals aggregate(std::span<const StepRecord> records, Minutes tz_offset) {
    if (records.empty()) throw EmptyLedger("cannot aggregate an empty ledger");

    SimulationTotals totals;
    double baseline_g = 0.0, controlled_g = 0.0, saved_g = 0.0;
    std::map<std::chrono::sys_days, std::pair<double, double>> day_sum_count;  // sum|dT|, count
    std::map<std::chrono::sys_days, double> day_max;

    for (const auto& r : records) {
        controlled_g += r.emissions_g;
        baseline_g += r.emissions_g + r.delta_co2_g;
        saved_g += r.delta_co2_g;
        totals.controlled_energy_kwh += r.grid_import_kwh;
        totals.baseline_energy_kwh += std::max(r.e_pred_kwh - r.e_solar_kwh, 0.0);

        const auto day = local_day(r.timestamp, tz_offset);
        auto& [sum, count] = day_sum_count[day];
        sum += std::abs(r.delta_t_k);
        count += 1.0;
        day_max[day] = std::max(day_max[day], std::abs(r.delta_t_k));
    }

    totals.baseline_emissions_kg = baseline_g / 1000.0;
    totals.controlled_emissions_kg = controlled_g / 1000.0;
    totals.emissions_reduction_percent = baseline_g > 0.0 ? 100.0 * saved_g / baseline_g : 0.0;
    totals.n_days = day_sum_count.size();
    totals.avg_daily_saving_g = saved_g / static_cast<double>(totals.n_days);

    double mean_acc = 0.0;
    for (const auto& [day, sc] : day_sum_count) mean_acc += sc.first / sc.second;
    totals.avg_daily_delta_t_k = mean_acc / static_cast<double>(totals.n_days);
    for (const auto& [day, mx] : day_max)
        totals.max_daily_delta_t_k = std::max(totals.max_daily_delta_t_k, mx);
    return totals;
}

void write_ledger_csv(std::ostream& os, std::span<const StepRecord> records) {
    os << "timestamp,mode,alpha,delta_T,e_pred,e_solar,grid_import,emissions,delta_co2\n";
    char line[256];
    for (const auto& r : records) {
        std::snprintf(line, sizeof(line), ",%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                      r.mode == Mode::heating ? "heating" : "cooling", r.alpha, r.delta_t_k,
                      r.e_pred_kwh, r.e_solar_kwh, r.grid_import_kwh, r.emissions_g,
                      r.delta_co2_g);
        os << format_timestamp(r.timestamp) << line;
    }
}

std::string summary_to_json(const SimulationResult& result, bool include_reduction) {
    const SimulationTotals& t = result.totals;
    nlohmann::json j;
    j["steps"] = result.records.size();
    j["days"] = t.n_days;
    j["baseline_emissions_kg"] = t.baseline_emissions_kg;
    j["controlled_emissions_kg"] = t.controlled_emissions_kg;
    j["baseline_energy_kwh"] = t.baseline_energy_kwh;
    j["controlled_energy_kwh"] = t.controlled_energy_kwh;
    if (include_reduction) {
        j["emissions_reduction_percent"] = t.emissions_reduction_percent;
        j["avg_daily_saving_g"] = t.avg_daily_saving_g;
        j["avg_daily_delta_t_k"] = t.avg_daily_delta_t_k;
        j["max_daily_delta_t_k"] = t.max_daily_delta_t_k;
    } else {
        j["emissions_reduction_percent"] = nullptr;
        j["avg_daily_saving_g"] = nullptr;
        j["avg_daily_delta_t_k"] = nullptr;
        j["max_daily_delta_t_k"] = nullptr;
    }
    return j.dump(2);
}

}  // namespace ballast
