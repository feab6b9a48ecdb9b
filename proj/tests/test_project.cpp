#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ballast/errors.hpp"
#include "ballast/project.hpp"
#include "ballast/thermal_model.hpp"

#include "support/synthetic.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

using namespace ballast;
namespace fs = std::filesystem;
using nlohmann::json;
using testsupport::make_time;

namespace {

// Writes a complete runnable project (CSV datasets, models, config) into dir.
fs::path write_fixture_project(const fs::path& dir, int days = 5,
                               json mutate = json::object()) {
    fs::create_directories(dir);
    const TimePoint start = make_time(2024, 1, 1);

    auto dump_series = [&](const TimeSeries& s, const fs::path& path) {
        std::ostringstream os;
        os << "timestamp,value\n";
        char buf[48];
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::snprintf(buf, sizeof(buf), ",%.6f\n", s.values()[i]);
            os << format_timestamp(s.time_at(i)) << buf;
        }
        write_file(path, os.str());
    };
    dump_series(testsupport::synthetic_ci(start, days), dir / "ci.csv");
    dump_series(testsupport::synthetic_pv(start, days), dir / "pv.csv");
    dump_series(testsupport::synthetic_t_ext(start, days), dir / "t_ext.csv");

    write_file(dir / "winter.json",
               model_to_json(testsupport::synthetic_heating_model(Minutes{30})));
    write_file(dir / "summer.json",
               model_to_json(testsupport::synthetic_cooling_model(Minutes{30})));

    json cfg;
    cfg["schema_version"] = 1;
    cfg["datasets"]["carbon_intensity"] = {{"path", "ci.csv"}, {"unit", "gCO2/kWh"}};
    cfg["datasets"]["pv_energy"] = {{"path", "pv.csv"}, {"unit", "kWh"}};
    cfg["datasets"]["external_temperature"] = {{"path", "t_ext.csv"}, {"unit", "degC"}};
    cfg["models"]["winter"] = "winter.json";
    cfg["models"]["summer"] = "summer.json";
    cfg["scenario"]["start"] = "2024-01-01T00:00:00Z";
    cfg["scenario"]["end"] = format_timestamp(start + std::chrono::days{days});
    cfg["scenario"]["timezone_offset_minutes"] = 60;
    cfg["controller"] = {{"omega", 1e6}, {"horizon_hours", 12.0}, {"step_minutes", 30},
                         {"gamma", 1.0}, {"c_th_kj_per_k", 6531.77}};
    cfg["output_dir"] = "out";
    cfg.merge_patch(mutate);
    write_file(dir / "project.json", cfg.dump(2));
    return dir / "project.json";
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("tb_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("csv series load with inferred step") {
    const fs::path dir = temp_dir("csv");
    write_file(dir / "ok.csv",
               "timestamp,value\n"
               "2024-01-01T00:00:00Z,1.0\n"
               "2024-01-01T01:00:00Z,2.5\n"
               "2024-01-01T02:00:00Z,3.5\n");
    const TimeSeries s = load_series_csv(dir / "ok.csv", Unit::kilowatt_hour);
    CHECK(s.step() == Minutes{60});
    CHECK(s.size() == 3);
    CHECK(s.values()[1] == 2.5);
    CHECK(s.unit() == Unit::kilowatt_hour);
}

TEST_CASE("csv gaps and damage are rejected") {
    const fs::path dir = temp_dir("csv_bad");
    write_file(dir / "gap.csv",
               "timestamp,value\n"
               "2024-01-01T00:00:00Z,1.0\n"
               "2024-01-01T01:00:00Z,2.0\n"
               "2024-01-01T03:00:00Z,3.0\n");
    CHECK_THROWS_AS(load_series_csv(dir / "gap.csv", Unit::celsius), SignalGap);

    write_file(dir / "bad_value.csv",
               "timestamp,value\n"
               "2024-01-01T00:00:00Z,1.0\n"
               "2024-01-01T01:00:00Z,oops\n");
    CHECK_THROWS_AS(load_series_csv(dir / "bad_value.csv", Unit::celsius), ParseError);

    write_file(dir / "missing.csv",
               "timestamp,value\n"
               "2024-01-01T00:00:00Z,\n");
    CHECK_THROWS_AS(load_series_csv(dir / "missing.csv", Unit::celsius), ParseError);

    write_file(dir / "header.csv", "time,reading\n2024-01-01T00:00:00Z,1\n");
    CHECK_THROWS_AS(load_series_csv(dir / "header.csv", Unit::celsius), ParseError);

    CHECK_THROWS_AS(load_series_csv(dir / "nope.csv", Unit::celsius), PathNotFound);
}

TEST_CASE("minimal project loads with documented defaults") {
    const fs::path dir = temp_dir("proj_ok");
    const ProjectConfig project = load_project(write_fixture_project(dir));
    CHECK(project.controller.horizon_steps == 24);
    CHECK(project.controller.step == Minutes{30});
    CHECK(project.tz_offset == Minutes{60});
    CHECK(project.heating_season.start_month == 10);
    // default schedules follow the paper-style office profile
    CHECK(project.setpoint_winter.sample(make_time(2024, 1, 2, 11, 0), project.tz_offset) == 20.0);
    CHECK(project.setpoint_winter.sample(make_time(2024, 1, 7, 11, 0), project.tz_offset) == 18.0);
    CHECK(project.occupancy.sample(make_time(2024, 1, 2, 11, 0), project.tz_offset) == 2.0);
    CHECK(project.output_dir.filename() == "out");

    const ScenarioConfig scenario = build_scenario(project);
    const SimulationResult result = run(scenario, true);
    CHECK(result.records.size() == 5 * 48);
}

TEST_CASE("wrong unit is rejected naming the key") {
    const fs::path dir = temp_dir("proj_unit");
    const fs::path cfg = write_fixture_project(
        dir, 5, json::parse(R"({"datasets":{"carbon_intensity":{"unit":"kWh"}}})"));
    try {
        load_project(cfg);
        FAIL("expected UnitMismatch");
    } catch (const UnitMismatch& e) {
        CHECK(std::string(e.what()).find("datasets.carbon_intensity") != std::string::npos);
    }
}

TEST_CASE("unknown unit names fail to parse") {
    const fs::path dir = temp_dir("proj_kg");
    const fs::path cfg = write_fixture_project(
        dir, 5, json::parse(R"({"datasets":{"carbon_intensity":{"unit":"kgCO2/kWh"}}})"));
    CHECK_THROWS_AS(load_project(cfg), ParseError);
}

TEST_CASE("missing dataset path is a PathNotFound naming the key") {
    const fs::path dir = temp_dir("proj_path");
    const fs::path cfg = write_fixture_project(
        dir, 5, json::parse(R"({"datasets":{"pv_energy":{"path":"nope.csv"}}})"));
    try {
        load_project(cfg);
        FAIL("expected PathNotFound");
    } catch (const PathNotFound& e) {
        CHECK(std::string(e.what()).find("datasets.pv_energy") != std::string::npos);
    }
}

TEST_CASE("missing keys are named") {
    const fs::path dir = temp_dir("proj_keys");
    write_fixture_project(dir);
    json cfg = json::parse(read_file(dir / "project.json"));
    cfg.erase("controller");
    write_file(dir / "broken.json", cfg.dump());
    try {
        load_project(dir / "broken.json");
        FAIL("expected MissingKey");
    } catch (const MissingKey& e) {
        CHECK(std::string(e.what()).find("controller") != std::string::npos);
    }
}

TEST_CASE("horizon must divide into whole steps") {
    const fs::path dir = temp_dir("proj_horizon");
    const fs::path cfg = write_fixture_project(
        dir, 5, json::parse(R"({"controller":{"horizon_hours":0.25,"step_minutes":30}})"));
    CHECK_THROWS_AS(load_project(cfg), ParseError);
}

TEST_CASE("c_th can come from an envelope file") {
    const fs::path dir = temp_dir("proj_env");
    write_file(dir / "envelope.json", R"({
      "components": [
        {"name": "slab", "area": 10.0, "layers": [[0.2, 1.7, 2300, 920]]}
      ]
    })");
    // merge_patch: null removes c_th so the envelope has to supply it
    const json mutate =
        json::parse(R"({"envelope":"envelope.json","controller":{"c_th_kj_per_k":null}})");
    const ProjectConfig project = load_project(write_fixture_project(dir, 5, mutate));
    CHECK(project.controller.c_th_kj_k > 100.0);  // ten square metres of concrete
}

TEST_CASE("report bundle is complete and reproducible") {
    const fs::path dir = temp_dir("proj_report");
    ProjectConfig project = load_project(write_fixture_project(dir));
    project.output_dir = dir / "out1";
    write_report(project, ReportOptions{true});

    for (const char* name :
         {"summary.json", "ledger_baseline.csv", "ledger_controlled.csv",
          "figure_alpha_winter.csv", "figure_delta_co2_winter.csv", "figure_delta_t_winter.csv"})
        CHECK(fs::exists(project.output_dir / name));

    const json summary = json::parse(read_file(project.output_dir / "summary.json"));
    const double baseline = summary["controlled"]["baseline_emissions_kg"].get<double>();
    const double controlled = summary["controlled"]["controlled_emissions_kg"].get<double>();
    const double percent = summary["controlled"]["emissions_reduction_percent"].get<double>();
    CHECK(percent == doctest::Approx(100.0 * (baseline - controlled) / baseline).epsilon(1e-9));
    CHECK(summary["baseline"]["emissions_reduction_percent"].is_null());
    CHECK(summary["comfort"]["winter"]["baseline"]["pmv"].get<double>() ==
          doctest::Approx(-0.31).epsilon(0.2));

    project.output_dir = dir / "out2";
    write_report(project, ReportOptions{true});
    CHECK(read_file(dir / "out1" / "summary.json") == read_file(dir / "out2" / "summary.json"));
    CHECK(read_file(dir / "out1" / "ledger_controlled.csv") ==
          read_file(dir / "out2" / "ledger_controlled.csv"));
}
