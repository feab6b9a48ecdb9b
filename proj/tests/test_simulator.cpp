#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ballast/errors.hpp"
#include "ballast/simulator.hpp"

#include "support/synthetic.hpp"

#include <cmath>
#include <sstream>

using namespace ballast;
using testsupport::desk_scenario;
using testsupport::make_time;

TEST_CASE("season window wraps the year end") {
    const SeasonWindow season{};
    const Minutes tz{60};
    CHECK(in_heating_season(make_time(2024, 1, 10), tz, season));
    CHECK(in_heating_season(make_time(2024, 10, 15), tz, season));
    CHECK(in_heating_season(make_time(2024, 12, 31), tz, season));
    CHECK(in_heating_season(make_time(2024, 4, 14), tz, season));
    CHECK_FALSE(in_heating_season(make_time(2024, 4, 15), tz, season));
    CHECK_FALSE(in_heating_season(make_time(2024, 7, 1), tz, season));
    CHECK_FALSE(in_heating_season(make_time(2024, 10, 14), tz, season));
}

TEST_CASE("baseline ledgers carry no control action") {
    const SimulationResult r = run(desk_scenario(make_time(2024, 1, 1), 7, Minutes{30}), false);
    REQUIRE(r.records.size() == 7 * 48);
    for (const auto& rec : r.records) {
        CHECK(rec.alpha == 0.0);
        CHECK(rec.delta_t_k == 0.0);
        CHECK(rec.delta_co2_g == 0.0);
        CHECK(rec.t_ref_applied_c == rec.t_ref_user_c);
        CHECK(rec.grid_import_kwh >= 0.0);
        CHECK(rec.emissions_g == doctest::Approx(rec.grid_import_kwh * rec.ci_g_kwh));
    }
    CHECK(r.totals.emissions_reduction_percent == 0.0);
}

TEST_CASE("no surplus means the controlled run equals the baseline exactly") {
    ScenarioConfig scenario = desk_scenario(make_time(2024, 1, 1), 5, Minutes{30});
    std::vector<double> zeros(scenario.pv.size(), 0.0);
    scenario.pv = TimeSeries(scenario.pv.start_time(), scenario.pv.step(), std::move(zeros),
                             Unit::kilowatt_hour);
    const SimulationResult base = run(scenario, false);
    const SimulationResult ctrl = run(scenario, true);
    REQUIRE(base.records.size() == ctrl.records.size());
    for (std::size_t i = 0; i < base.records.size(); ++i) {
        CHECK(ctrl.records[i].alpha == 0.0);
        CHECK(ctrl.records[i].grid_import_kwh == base.records[i].grid_import_kwh);
        CHECK(ctrl.records[i].emissions_g == base.records[i].emissions_g);
    }
}

TEST_CASE("controlled emissions close against the baseline") {
    const ScenarioConfig scenario = desk_scenario(make_time(2024, 1, 1), 14, Minutes{30});
    const SimulationResult base = run(scenario, false);
    const SimulationResult ctrl = run(scenario, true);

    // the policy actually fires on this scenario
    double alpha_total = 0.0;
    for (const auto& rec : ctrl.records) alpha_total += rec.alpha;
    CHECK(alpha_total > 0.0);

    for (const auto& rec : ctrl.records)
        CHECK(rec.t_ref_applied_c - rec.t_ref_user_c == doctest::Approx(rec.delta_t_k));

    // a surplus kWh can be credited against imports at most once
    double total_surplus = 0.0, total_credit = 0.0;
    for (const auto& rec : ctrl.records) {
        total_surplus += rec.surplus_kwh;
        total_credit += std::max(rec.e_pred_kwh - rec.e_solar_kwh, 0.0) - rec.grid_import_kwh;
    }
    CHECK(total_credit <= total_surplus + 1e-9);
    CHECK(total_credit > 0.0);

    CHECK(ctrl.totals.controlled_emissions_kg <= base.totals.baseline_emissions_kg);
    CHECK(ctrl.totals.baseline_emissions_kg ==
          doctest::Approx(base.totals.baseline_emissions_kg).epsilon(1e-12));

    // sum of per-step savings equals the total difference
    double saved = 0.0;
    for (const auto& rec : ctrl.records) saved += rec.delta_co2_g;
    const double diff =
        (ctrl.totals.baseline_emissions_kg - ctrl.totals.controlled_emissions_kg) * 1000.0;
    CHECK(saved == doctest::Approx(diff).epsilon(1e-6));
    CHECK(ctrl.totals.controlled_emissions_kg < ctrl.totals.baseline_emissions_kg);
}

TEST_CASE("a huge omega collapses the controlled run onto the baseline") {
    // alpha itself scales as 1/surplus, so near-zero-surplus windows keep a
    // visible fraction; the stored energy alpha * surplus is what omega
    // crushes, and with it every physical ledger column
    const ScenarioConfig scenario =
        desk_scenario(make_time(2024, 1, 1), 7, Minutes{30}, 6531.77, 1e15);
    const SimulationResult base = run(scenario, false);
    const SimulationResult ctrl = run(scenario, true);
    REQUIRE(base.records.size() == ctrl.records.size());
    for (std::size_t i = 0; i < base.records.size(); ++i) {
        CHECK(std::abs(ctrl.records[i].alpha) < 1e-3);
        CHECK(std::abs(ctrl.records[i].delta_t_k) < 1e-5);
        CHECK(std::abs(ctrl.records[i].grid_import_kwh - base.records[i].grid_import_kwh) < 1e-4);
        CHECK(std::abs(ctrl.records[i].emissions_g - base.records[i].emissions_g) < 1e-2);
        CHECK(std::abs(ctrl.records[i].delta_co2_g) < 1e-2);
    }

    // and alpha converges to zero pointwise as omega grows
    ScenarioConfig milder = scenario;
    milder.controller.omega = 1e9;
    const SimulationResult mid = run(milder, true);
    double max_hi = 0.0, max_mid = 0.0;
    for (std::size_t i = 0; i < ctrl.records.size(); ++i) {
        max_hi = std::max(max_hi, ctrl.records[i].alpha);
        max_mid = std::max(max_mid, mid.records[i].alpha);
    }
    CHECK(max_hi <= max_mid);
}

TEST_CASE("records carry the right season mode") {
    const ScenarioConfig scenario = desk_scenario(make_time(2024, 4, 10), 10, Minutes{60});
    const SimulationResult r = run(scenario, true);
    for (const auto& rec : r.records) {
        const bool heating = in_heating_season(rec.timestamp, scenario.tz_offset,
                                               scenario.heating_season);
        CHECK((rec.mode == Mode::heating) == heating);
        if (rec.mode == Mode::cooling && rec.alpha > 0.0) CHECK(rec.delta_t_k <= 0.0);
        if (rec.mode == Mode::heating && rec.alpha > 0.0) CHECK(rec.delta_t_k >= 0.0);
    }
}

TEST_CASE("delta co2 step accounting") {
    const ForecastWindow fw({2.0, 2.0}, {3.0, 0.0}, {300.0, 300.0});
    CHECK(delta_co2_step(fw, 0.0, 0) == 0.0);
    // import at position 1 is 2 kWh, offset = 0.5 -> 150 g saved
    CHECK(delta_co2_step(fw, 1.0, 1) == doctest::Approx(150.0));

    const ForecastWindow no_import({1.0}, {2.0}, {300.0});
    CHECK(delta_co2_step(no_import, 1.0, 0) == 0.0);
    CHECK_THROWS_AS(delta_co2_step(fw, 0.5, 2), OutOfRange);
}

TEST_CASE("aggregate examples") {
    const TimePoint day = make_time(2024, 3, 4);
    auto record = [&](int step, double emissions, double saved, double dt) {
        StepRecord r{};
        r.timestamp = day + Minutes{30 * step};
        r.mode = Mode::heating;
        r.emissions_g = emissions;
        r.delta_co2_g = saved;
        r.delta_t_k = dt;
        return r;
    };
    const std::vector<StepRecord> one_day{record(0, 30.0, 10.0, 0.0), record(1, 30.0, 0.0, 0.2),
                                          record(2, 30.0, 0.0, -0.5)};
    const SimulationTotals t = aggregate(one_day, Minutes{60});
    CHECK(t.n_days == 1);
    CHECK(t.baseline_emissions_kg == doctest::Approx(0.100));
    CHECK(t.controlled_emissions_kg == doctest::Approx(0.090));
    CHECK(t.emissions_reduction_percent == doctest::Approx(10.0));
    CHECK(t.avg_daily_saving_g == doctest::Approx(10.0));
    CHECK(t.max_daily_delta_t_k == doctest::Approx(0.5));
    CHECK(t.avg_daily_delta_t_k == doctest::Approx(0.7 / 3.0));

    CHECK_THROWS_AS(aggregate(std::vector<StepRecord>{}, Minutes{60}), EmptyLedger);
}

TEST_CASE("percentages stay consistent with totals") {
    const SimulationResult ctrl =
        run(desk_scenario(make_time(2024, 1, 1), 14, Minutes{30}), true);
    const SimulationTotals& t = ctrl.totals;
    const double recomputed =
        100.0 * (t.baseline_emissions_kg - t.controlled_emissions_kg) / t.baseline_emissions_kg;
    CHECK(t.emissions_reduction_percent == doctest::Approx(recomputed).epsilon(1e-9));
}

TEST_CASE("identical scenarios produce byte-identical ledgers") {
    const ScenarioConfig scenario = desk_scenario(make_time(2024, 1, 1), 7, Minutes{30});
    const SimulationResult a = run(scenario, true);
    const SimulationResult b = run(scenario, true);
    std::ostringstream csv_a, csv_b;
    write_ledger_csv(csv_a, a.records);
    write_ledger_csv(csv_b, b.records);
    CHECK(csv_a.str() == csv_b.str());
    CHECK(summary_to_json(a, true) == summary_to_json(b, true));
}

TEST_CASE("scenario validation errors") {
    ScenarioConfig scenario = desk_scenario(make_time(2024, 1, 1), 5, Minutes{30});
    scenario.winter_model.reset();
    CHECK_THROWS_AS(run(scenario, true), ModelMissing);

    ScenarioConfig misaligned = desk_scenario(make_time(2024, 1, 1), 5, Minutes{30});
    misaligned.start += Minutes{7};
    misaligned.end += Minutes{7};
    CHECK_THROWS_AS(run(misaligned, false), SignalGap);

    ScenarioConfig short_series = desk_scenario(make_time(2024, 1, 1), 5, Minutes{30});
    short_series.end += std::chrono::days{2};
    CHECK_THROWS_AS(run(short_series, false), SignalGap);

    ScenarioConfig wrong_step = desk_scenario(make_time(2024, 1, 1), 5, Minutes{30});
    wrong_step.controller.step = Minutes{60};
    CHECK_THROWS_AS(run(wrong_step, false), StepMismatch);
}

TEST_CASE("ledger csv has the documented shape") {
    const SimulationResult r = run(desk_scenario(make_time(2024, 1, 1), 1, Minutes{60}), true);
    std::ostringstream os;
    write_ledger_csv(os, r.records);
    const std::string text = os.str();
    CHECK(text.rfind("timestamp,mode,alpha,delta_T,e_pred,e_solar,grid_import,emissions,delta_co2\n",
                     0) == 0);
    CHECK(text.find("2024-01-01T00:00:00Z,heating,") != std::string::npos);
}
