#include "ballast/project.hpp"

#include "ballast/errors.hpp"
#include "ballast/thermal_model.hpp"
#include "ballast/envelope.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ballast {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PathNotFound("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

TimeSeries load_series_csv(const std::filesystem::path& path, Unit unit) {
    std::ifstream in(path);
    if (!in) throw PathNotFound("cannot open '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,value")
        throw ParseError(path.string() + ": expected header 'timestamp,value'");

    std::vector<TimePoint> times;
    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || comma + 1 >= line.size())
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": missing value");
        times.push_back(parse_timestamp(line.substr(0, comma)));
        const std::string field = line.substr(comma + 1);
        char* endp = nullptr;
        const double v = std::strtod(field.c_str(), &endp);
        if (endp == field.c_str() || *endp != '\0' || !std::isfinite(v))
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": bad value '" + field + "'");
        values.push_back(v);
    }
    if (values.empty()) throw EmptySeries(path.string() + ": no samples");
    if (values.size() == 1)
        throw ParseError(path.string() + ": a single sample has no step size");

    const auto step = std::chrono::duration_cast<Minutes>(times[1] - times[0]);
    if (step.count() <= 0) throw ParseError(path.string() + ": timestamps must increase");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] - times[i - 1] != step)
            throw SignalGap(path.string() + ": gap or irregular spacing at " +
                            format_timestamp(times[i]));
    return TimeSeries(times.front(), step, std::move(values), unit);
}

namespace {

std::vector<ScheduleSegment> parse_profile(const json& j, const std::string& key) {
    if (!j.is_array()) throw ParseError("'" + key + "' must be an array of [start, end, value]");
    std::vector<ScheduleSegment> segments;
    for (const auto& seg : j) {
        if (!seg.is_array() || seg.size() != 3)
            throw ParseError("'" + key + "' segments must be [start, end, value]");
        segments.push_back({seg[0].get<double>(), seg[1].get<double>(), seg[2].get<double>()});
    }
    return segments;
}

Schedule parse_schedule(const json& j, const std::string& key) {
    if (!j.contains("workday")) throw MissingKey("'" + key + ".workday' is required");
    if (!j.contains("weekend")) throw MissingKey("'" + key + ".weekend' is required");
    try {
        return Schedule(parse_profile(j["workday"], key + ".workday"),
                        parse_profile(j["weekend"], key + ".weekend"));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError("'" + key + "': " + e.what());
    }
}

Schedule default_schedule(double work_value, double off_value) {
    return Schedule({{0, 8, off_value}, {8, 19, work_value}, {19, 24, off_value}},
                    {{0, 24, off_value}});
}

DatasetRef parse_dataset(const json& datasets, const std::string& key, Unit expected,
                         const std::filesystem::path& base) {
    if (!datasets.contains(key)) throw MissingKey("'datasets." + key + "' is required");
    const json& entry = datasets[key];
    if (!entry.contains("path")) throw MissingKey("'datasets." + key + ".path' is required");
    const Unit declared = entry.contains("unit")
                              ? unit_from_name(entry["unit"].get<std::string>())
                              : expected;
    if (declared != expected)
        throw UnitMismatch("'datasets." + key + ".unit' is " + unit_name(declared) +
                           " but this dataset must be " + unit_name(expected));
    std::filesystem::path p = entry["path"].get<std::string>();
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::exists(p))
        throw PathNotFound("'datasets." + key + ".path': no such file '" + p.string() + "'");
    return DatasetRef{std::move(p), expected};
}

std::filesystem::path resolve_existing(const json& j, const std::string& key,
                                       const std::filesystem::path& base) {
    std::filesystem::path p = j.get<std::string>();
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::exists(p))
        throw PathNotFound("'" + key + "': no such file '" + p.string() + "'");
    return p;
}

SeasonComfort parse_comfort(const json& j, const SeasonComfort& defaults) {
    SeasonComfort c = defaults;
    c.air_speed_m_s = j.value("air_speed_m_s", c.air_speed_m_s);
    c.relative_humidity_pct = j.value("relative_humidity_pct", c.relative_humidity_pct);
    c.metabolic_rate_met = j.value("metabolic_rate_met", c.metabolic_rate_met);
    c.clothing_clo = j.value("clothing_clo", c.clothing_clo);
    return c;
}

}  // namespace

ProjectConfig load_project(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    const std::filesystem::path base = path.has_parent_path()
                                           ? path.parent_path()
                                           : std::filesystem::path(".");

    ProjectConfig project;
    project.schema_version = doc.value("schema_version", 1);
    if (project.schema_version != 1)
        throw ParseError("'schema_version' " + std::to_string(project.schema_version) +
                         " is not supported");

    if (!doc.contains("datasets")) throw MissingKey("'datasets' is required");
    const json& datasets = doc["datasets"];
    project.ci = parse_dataset(datasets, "carbon_intensity", Unit::grams_co2_per_kwh, base);
    project.pv = parse_dataset(datasets, "pv_energy", Unit::kilowatt_hour, base);
    project.t_ext = parse_dataset(datasets, "external_temperature", Unit::celsius, base);

    if (!doc.contains("models")) throw MissingKey("'models' is required");
    if (!doc["models"].contains("winter")) throw MissingKey("'models.winter' is required");
    if (!doc["models"].contains("summer")) throw MissingKey("'models.summer' is required");
    project.winter_model_path = resolve_existing(doc["models"]["winter"], "models.winter", base);
    project.summer_model_path = resolve_existing(doc["models"]["summer"], "models.summer", base);
    if (doc.contains("envelope"))
        project.envelope_path = resolve_existing(doc["envelope"], "envelope", base);

    if (doc.contains("training")) {
        auto parse_training = [&](const json& jt, const std::string& key) {
            TrainingSet set;
            for (const char* field : {"t_ref", "n_occ", "t_ext", "power"})
                if (!jt.contains(field))
                    throw MissingKey("'" + key + "." + field + "' is required");
            set.t_ref = resolve_existing(jt["t_ref"], key + ".t_ref", base);
            set.n_occ = resolve_existing(jt["n_occ"], key + ".n_occ", base);
            set.t_ext = resolve_existing(jt["t_ext"], key + ".t_ext", base);
            set.power = resolve_existing(jt["power"], key + ".power", base);
            return set;
        };
        if (doc["training"].contains("winter"))
            project.winter_training = parse_training(doc["training"]["winter"], "training.winter");
        if (doc["training"].contains("summer"))
            project.summer_training = parse_training(doc["training"]["summer"], "training.summer");
    }

    if (!doc.contains("scenario")) throw MissingKey("'scenario' is required");
    const json& scenario = doc["scenario"];
    if (!scenario.contains("start")) throw MissingKey("'scenario.start' is required");
    if (!scenario.contains("end")) throw MissingKey("'scenario.end' is required");
    project.start = parse_timestamp(scenario["start"].get<std::string>());
    project.end = parse_timestamp(scenario["end"].get<std::string>());
    if (project.end <= project.start)
        throw ParseError("'scenario.end' must be after 'scenario.start'");
    project.tz_offset = Minutes{scenario.value("timezone_offset_minutes", 60)};
    if (scenario.contains("heating_season")) {
        const json& hs = scenario["heating_season"];
        project.heating_season = SeasonWindow{
            hs.value("start_month", 10), hs.value("start_day", 15),
            hs.value("end_month", 4), hs.value("end_day", 15)};
    }

    // paper-style defaults: 20/18 degC winter, 26/28 degC summer, 2 occupants
    project.setpoint_winter = scenario.contains("setpoints") &&
                                      scenario["setpoints"].contains("winter")
                                  ? parse_schedule(scenario["setpoints"]["winter"],
                                                   "scenario.setpoints.winter")
                                  : default_schedule(20.0, 18.0);
    project.setpoint_summer = scenario.contains("setpoints") &&
                                      scenario["setpoints"].contains("summer")
                                  ? parse_schedule(scenario["setpoints"]["summer"],
                                                   "scenario.setpoints.summer")
                                  : default_schedule(26.0, 28.0);
    project.occupancy = scenario.contains("occupancy")
                            ? parse_schedule(scenario["occupancy"], "scenario.occupancy")
                            : default_schedule(2.0, 0.0);

    if (!doc.contains("controller")) throw MissingKey("'controller' is required");
    const json& ctrl = doc["controller"];
    project.controller.omega = ctrl.value("omega", 1e6);
    project.controller.step = Minutes{ctrl.value("step_minutes", 30)};
    project.controller.gamma = ctrl.value("gamma", 1.0);
    const double horizon_hours = ctrl.value("horizon_hours", 24.0);
    const double steps = horizon_hours * 60.0 / static_cast<double>(project.controller.step.count());
    if (steps < 1.0 || steps != std::floor(steps))
        throw ParseError("'controller.horizon_hours' is not a whole number of steps");
    project.controller.horizon_steps = static_cast<std::size_t>(steps);

    if (ctrl.contains("c_th_kj_per_k")) {
        project.controller.c_th_kj_k = ctrl["c_th_kj_per_k"].get<double>();
    } else if (project.envelope_path.has_value()) {
        const auto components = constructions_from_json(read_file(*project.envelope_path));
        project.controller.c_th_kj_k = summarize(components).total_capacity_kj_k;
    } else {
        throw MissingKey("'controller.c_th_kj_per_k' is required when no envelope is given");
    }
    try {
        project.controller.validate();
    } catch (const Error& e) {
        throw ParseError(std::string("'controller': ") + e.what());
    }

    if (doc.contains("comfort")) {
        if (doc["comfort"].contains("winter"))
            project.winter_comfort = parse_comfort(doc["comfort"]["winter"], project.winter_comfort);
        if (doc["comfort"].contains("summer"))
            project.summer_comfort = parse_comfort(doc["comfort"]["summer"], project.summer_comfort);
    }

    std::filesystem::path out = doc.value("output_dir", std::string("out"));
    if (out.is_relative()) out = base / out;
    project.output_dir = std::move(out);
    return project;
}

ScenarioConfig build_scenario(const ProjectConfig& project) {
    ScenarioConfig scenario{
        project.start,
        project.end,
        project.tz_offset,
        project.heating_season,
        project.setpoint_winter,
        project.setpoint_summer,
        project.occupancy,
        load_series_csv(project.ci.path, project.ci.unit),
        load_series_csv(project.pv.path, project.pv.unit),
        load_series_csv(project.t_ext.path, project.t_ext.unit),
        model_from_json(read_file(project.winter_model_path)),
        model_from_json(read_file(project.summer_model_path)),
        project.controller,
    };
    return scenario;
}

namespace {

json comfort_json(double setpoint_c, const SeasonComfort& params) {
    const ComfortResult r = pmv(ComfortInput{setpoint_c, setpoint_c, params.air_speed_m_s,
                                             params.relative_humidity_pct,
                                             params.metabolic_rate_met, params.clothing_clo});
    json j;
    j["air_temp_c"] = setpoint_c;
    j["pmv"] = r.pmv;
    j["ppd"] = r.ppd;
    j["within_existing_limits"] = classify(r, BuildingClass::existing);
    j["within_new_limits"] = classify(r, BuildingClass::new_build);
    return j;
}

// occupied-hours setpoint: the weekday profile value at noon
double occupied_setpoint(const Schedule& schedule) {
    for (const auto& seg : schedule.weekday())
        if (12.0 >= seg.start_hour && 12.0 < seg.end_hour) return seg.value;
    return schedule.weekday().front().value;
}

void write_figure_csv(const std::filesystem::path& path,
                      std::span<const StepRecord> records, Minutes tz_offset,
                      int month, int first_day, int last_day,
                      double StepRecord::* field) {
    std::ostringstream os;
    os << "timestamp,value\n";
    char line[64];
    for (const auto& r : records) {
        const auto days = std::chrono::floor<std::chrono::days>(r.timestamp + tz_offset);
        const std::chrono::year_month_day ymd{days};
        if (static_cast<unsigned>(ymd.month()) != static_cast<unsigned>(month)) continue;
        const auto day = static_cast<int>(static_cast<unsigned>(ymd.day()));
        if (day < first_day || day > last_day) continue;
        std::snprintf(line, sizeof(line), ",%.6f\n", r.*field);
        os << format_timestamp(r.timestamp) << line;
    }
    write_file(path, os.str());
}

}  // namespace

void write_report(const ProjectConfig& project, const ReportOptions& options) {
    const ScenarioConfig scenario = build_scenario(project);
    const SimulationResult baseline = run(scenario, /*controlled=*/false);
    const SimulationResult controlled = run(scenario, /*controlled=*/true);

    std::error_code ec;
    std::filesystem::create_directories(project.output_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + project.output_dir.string() + "'");

    {
        std::ostringstream os;
        write_ledger_csv(os, baseline.records);
        write_file(project.output_dir / "ledger_baseline.csv", os.str());
    }
    {
        std::ostringstream os;
        write_ledger_csv(os, controlled.records);
        write_file(project.output_dir / "ledger_controlled.csv", os.str());
    }

    const double max_shift = controlled.totals.max_daily_delta_t_k;
    const double winter_setpoint = occupied_setpoint(project.setpoint_winter);
    const double summer_setpoint = occupied_setpoint(project.setpoint_summer);

    json summary;
    summary["baseline"] = json::parse(summary_to_json(baseline, false));
    summary["controlled"] = json::parse(summary_to_json(controlled, true));
    summary["comfort"]["winter"]["baseline"] = comfort_json(winter_setpoint, project.winter_comfort);
    summary["comfort"]["winter"]["worst_shift"] =
        comfort_json(winter_setpoint + max_shift, project.winter_comfort);
    summary["comfort"]["summer"]["baseline"] = comfort_json(summer_setpoint, project.summer_comfort);
    summary["comfort"]["summer"]["worst_shift"] =
        comfort_json(summer_setpoint - max_shift, project.summer_comfort);
    write_file(project.output_dir / "summary.json", summary.dump(2));

    if (options.figure_data) {
        const auto& recs = controlled.records;
        const Minutes tz = project.tz_offset;
        write_figure_csv(project.output_dir / "figure_alpha_winter.csv", recs, tz, 11, 15, 30,
                         &StepRecord::alpha);
        write_figure_csv(project.output_dir / "figure_delta_co2_winter.csv", recs, tz, 11, 15, 30,
                         &StepRecord::delta_co2_g);
        write_figure_csv(project.output_dir / "figure_delta_t_winter.csv", recs, tz, 11, 15, 30,
                         &StepRecord::delta_t_k);
        write_figure_csv(project.output_dir / "figure_alpha_summer.csv", recs, tz, 7, 15, 30,
                         &StepRecord::alpha);
        write_figure_csv(project.output_dir / "figure_delta_co2_summer.csv", recs, tz, 7, 15, 30,
                         &StepRecord::delta_co2_g);
        write_figure_csv(project.output_dir / "figure_delta_t_summer.csv", recs, tz, 7, 15, 30,
                         &StepRecord::delta_t_k);
    }
}

}  // namespace ballast
