#pragma once

#include "ballast/comfort.hpp"
#include "ballast/simulator.hpp"
#include "ballast/timeseries.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace ballast {

/// Comfort evaluation parameters per season (paper-style defaults).
struct SeasonComfort {
    double air_speed_m_s;
    double relative_humidity_pct;
    double metabolic_rate_met;
    double clothing_clo;
};

struct DatasetRef {
    std::filesystem::path path;
    Unit unit;
};

/// Identification signals for one season (setpoint, occupancy, outdoor
/// temperature, measured power).
struct TrainingSet {
    std::filesystem::path t_ref;
    std::filesystem::path n_occ;
    std::filesystem::path t_ext;
    std::filesystem::path power;
};

/// Everything a pipeline run needs, loaded from one JSON file. Every
/// validation failure names the offending key.
struct ProjectConfig {
    int schema_version = 1;
    DatasetRef ci;
    DatasetRef pv;
    DatasetRef t_ext;
    std::filesystem::path winter_model_path;
    std::filesystem::path summer_model_path;
    std::optional<std::filesystem::path> envelope_path;
    std::optional<TrainingSet> winter_training;
    std::optional<TrainingSet> summer_training;

    TimePoint start;
    TimePoint end;
    Minutes tz_offset{60};
    SeasonWindow heating_season;
    // office defaults: 20/18 degC heating, 26/28 degC cooling, two occupants
    // during working hours
    Schedule setpoint_winter{{{0, 8, 18}, {8, 19, 20}, {19, 24, 18}}, {{0, 24, 18}}};
    Schedule setpoint_summer{{{0, 8, 28}, {8, 19, 26}, {19, 24, 28}}, {{0, 24, 28}}};
    Schedule occupancy{{{0, 8, 0}, {8, 19, 2}, {19, 24, 0}}, {{0, 24, 0}}};
    ControllerConfig controller;

    SeasonComfort winter_comfort{0.10, 50.0, 1.2, 1.1};
    SeasonComfort summer_comfort{0.15, 50.0, 1.2, 0.6};

    std::filesystem::path output_dir;
};

ProjectConfig load_project(const std::filesystem::path& path);

/// Reads a `timestamp,value` CSV (ISO-8601, uniform spacing). Missing values
/// and gaps are rejected, never interpolated.
TimeSeries load_series_csv(const std::filesystem::path& path, Unit unit);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Loads datasets and models referenced by the project into a runnable
/// scenario.
ScenarioConfig build_scenario(const ProjectConfig& project);

struct ReportOptions {
    bool figure_data = false;  // also emit the per-window plot-data CSVs
};

/// Runs baseline and controlled, then writes summary.json, both ledgers and
/// (optionally) the figure-data CSVs into the output directory. The summary
/// includes the PMV classification of the worst-case setpoint shift.
void write_report(const ProjectConfig& project, const ReportOptions& options);

}  // namespace ballast
