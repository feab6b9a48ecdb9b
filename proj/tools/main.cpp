#include "ballast/comfort.hpp"
#include "ballast/controller.hpp"
#include "ballast/envelope.hpp"
#include "ballast/errors.hpp"
#include "ballast/project.hpp"
#include "ballast/simulator.hpp"
#include "ballast/thermal_model.hpp"
#include "ballast/timeseries.hpp"
#include "ballast/tuner.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

using namespace ballast;
using nlohmann::json;

json decision_to_json(const ControlDecision& d) {
    json j;
    j["alpha"] = d.alpha;
    j["alpha_unsaturated"] = d.alpha_unsaturated;
    j["delta_t_k"] = d.delta_t_k;
    j["delta_q_kwh"] = d.delta_q_kwh;
    j["j_co2_baseline_g"] = d.j_co2_baseline_g;
    j["j_co2_controlled_g"] = d.j_co2_controlled_g;
    j["j_co2_objective_g"] = d.j_co2_objective_g;
    j["j_comfort_k2"] = d.j_comfort_k2;
    return j;
}

json fit_report_to_json(const FitReport& report) {
    json j;
    j["r2"] = report.r2;
    j["nmae_percent"] = report.nmae_percent;
    j["n_validation"] = report.n_validation;
    j["order"] = report.order;
    return j;
}

int cmd_identify(std::string t_ref_path, std::string n_occ_path, std::string t_ext_path,
                 std::string power_path, const std::string& scenario_path,
                 const std::string& season, int order, double split, std::string mode,
                 int step_minutes, const std::string& out_path) {
    if (!scenario_path.empty()) {
        const ProjectConfig project = load_project(scenario_path);
        const auto& training = season == "summer" ? project.summer_training
                                                  : project.winter_training;
        if (!training.has_value())
            throw MissingKey("project has no 'training." + season + "' block");
        t_ref_path = training->t_ref.string();
        n_occ_path = training->n_occ.string();
        t_ext_path = training->t_ext.string();
        power_path = training->power.string();
        if (mode.empty()) mode = season == "summer" ? "cooling" : "heating";
    }
    if (t_ref_path.empty() || n_occ_path.empty() || t_ext_path.empty() || power_path.empty()) {
        std::cerr << "identify needs --t-ref/--n-occ/--t-ext/--power or --scenario\n";
        return 2;
    }
    if (mode.empty()) mode = "heating";
    ModelInputs inputs{
        load_series_csv(t_ref_path, Unit::celsius),
        load_series_csv(n_occ_path, Unit::persons),
        load_series_csv(t_ext_path, Unit::celsius),
    };
    TimeSeries power = load_series_csv(power_path, Unit::kilowatt);
    if (step_minutes > 0) {
        const Minutes step{step_minutes};
        inputs.t_ref = resample(inputs.t_ref, step);
        inputs.n_occ = resample(inputs.n_occ, step);
        inputs.t_ext = resample(inputs.t_ext, step);
        power = resample(power, step);
    }
    auto [model, report] = identify(inputs, power, static_cast<std::size_t>(order), split,
                                    mode_from_name(mode));
    if (!out_path.empty()) write_file(out_path, model_to_json(model));
    std::cout << fit_report_to_json(report).dump(2) << "\n";
    return 0;
}

int cmd_envelope(const std::string& construction_path, double period_s, bool no_films) {
    const auto components = constructions_from_json(read_file(construction_path));
    const EnvelopeSummary summary = summarize(components, period_s, !no_films);
    std::printf("%-32s %10s %14s %14s\n", "component", "area m2", "kappa kJ/m2K", "kJ/K");
    for (const auto& c : summary.components)
        std::printf("%-32s %10.2f %14.2f %14.2f\n", c.name.c_str(), c.area_m2, c.kappa_kj_m2k,
                    c.capacity_kj_k);
    std::printf("%-32s %10s %14s %14.2f\n", "total C_m", "", "", summary.total_capacity_kj_k);
    return 0;
}

int cmd_decide(const std::string& input_path) {
    json doc;
    try {
        doc = json::parse(read_file(input_path));
    } catch (const json::exception& e) {
        throw ParseError(input_path + ": " + e.what());
    }
    if (!doc.contains("config")) throw MissingKey("'config' is required");
    if (!doc.contains("window")) throw MissingKey("'window' is required");
    const json& jc = doc["config"];
    const json& jw = doc["window"];
    for (const char* key : {"e_pred", "e_solar", "ci"})
        if (!jw.contains(key)) throw MissingKey(std::string("'window.") + key + "' is required");

    ForecastWindow fw(jw["e_pred"].get<std::vector<double>>(),
                      jw["e_solar"].get<std::vector<double>>(),
                      jw["ci"].get<std::vector<double>>());
    ControllerConfig cfg;
    cfg.omega = jc.value("omega", 1e6);
    cfg.horizon_steps = jc.value("horizon_steps", fw.size());
    cfg.step = Minutes{jc.value("step_minutes", 30)};
    cfg.gamma = jc.value("gamma", 1.0);
    cfg.mode_sign = mode_from_name(jc.value("mode", "heating")) == Mode::heating ? +1 : -1;
    if (!jc.contains("c_th_kj_per_k")) throw MissingKey("'config.c_th_kj_per_k' is required");
    cfg.c_th_kj_k = jc["c_th_kj_per_k"].get<double>();

    std::cout << decision_to_json(alpha_star(cfg, fw)).dump(2) << "\n";
    return 0;
}

int cmd_simulate(const std::string& scenario_path, bool controlled, const std::string& out_dir) {
    ProjectConfig project = load_project(scenario_path);
    if (!out_dir.empty()) project.output_dir = out_dir;
    const ScenarioConfig scenario = build_scenario(project);
    const SimulationResult result = run(scenario, controlled);

    std::error_code ec;
    std::filesystem::create_directories(project.output_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + project.output_dir.string() + "'");

    std::ostringstream ledger;
    write_ledger_csv(ledger, result.records);
    const char* name = controlled ? "ledger_controlled.csv" : "ledger_baseline.csv";
    write_file(project.output_dir / name, ledger.str());
    const std::string summary = summary_to_json(result, controlled);
    write_file(project.output_dir / (controlled ? "summary_controlled.json"
                                                : "summary_baseline.json"),
               summary);
    std::cout << summary << "\n";
    return 0;
}

SweepSpec load_sweep_spec(const std::string& path) {
    SweepSpec spec;
    if (path.empty()) return spec;
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (doc.contains("horizons_hours")) spec.horizons_hours = doc["horizons_hours"].get<std::vector<int>>();
    if (doc.contains("steps_minutes")) spec.steps_minutes = doc["steps_minutes"].get<std::vector<int>>();
    spec.omega_count = doc.value("omega_count", spec.omega_count);
    spec.omega_lo = doc.value("omega_lo", spec.omega_lo);
    spec.omega_hi = doc.value("omega_hi", spec.omega_hi);
    spec.comfort_bound_k = doc.value("comfort_bound_k", spec.comfort_bound_k);
    return spec;
}

int cmd_tune(const std::string& scenario_path, const std::string& spec_path,
             const std::string& out_dir, int threads, bool heatmap) {
    ProjectConfig project = load_project(scenario_path);
    if (!out_dir.empty()) project.output_dir = out_dir;
    const SweepSpec spec = load_sweep_spec(spec_path);
    const ScenarioConfig scenario = build_scenario(project);

    const SweepResult swept = sweep(scenario, spec, threads);
    for (const auto& message : swept.skipped) std::cerr << "skipped: " << message << "\n";

    const auto front = pareto_front(swept.cells);
    const SweepCell best = select_optimum(front, spec.comfort_bound_k);

    std::error_code ec;
    std::filesystem::create_directories(project.output_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + project.output_dir.string() + "'");

    std::ostringstream cells_csv, front_csv;
    write_cells_csv(cells_csv, swept.cells);
    write_cells_csv(front_csv, front);
    write_file(project.output_dir / "sweep_cells.csv", cells_csv.str());
    write_file(project.output_dir / "pareto_front.csv", front_csv.str());
    write_file(project.output_dir / "optimum.json", cell_to_json(best));
    if (heatmap) {
        std::ostringstream hm;
        write_heatmap_csv(hm, spec, swept.cells);
        write_file(project.output_dir / "heatmap.csv", hm.str());
    }
    std::cout << cell_to_json(best) << "\n";
    return 0;
}

int cmd_pmv(double ta, double tr, bool tr_set, double v, double rh, double met, double clo,
            const std::string& building_class) {
    const ComfortInput input{ta, tr_set ? tr : ta, v, rh, met, clo};
    const ComfortResult result = pmv(input);
    json j;
    j["pmv"] = result.pmv;
    j["ppd"] = result.ppd;
    if (!building_class.empty()) {
        BuildingClass cls;
        if (building_class == "existing") cls = BuildingClass::existing;
        else if (building_class == "new") cls = BuildingClass::new_build;
        else throw ParseError("building class must be 'existing' or 'new'");
        j["within_limits"] = classify(result, cls);
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_report(const std::string& scenario_path, bool figure_data, const std::string& out_dir) {
    ProjectConfig project = load_project(scenario_path);
    if (!out_dir.empty()) project.output_dir = out_dir;
    write_report(project, ReportOptions{figure_data});
    std::cout << "report written to " << project.output_dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermal_ballast: carbon-aware PV-surplus storage in building thermal mass"};
    app.require_subcommand(1);

    // identify
    auto* identify_cmd = app.add_subcommand("identify", "fit a state-space surrogate from CSVs");
    std::string id_t_ref, id_n_occ, id_t_ext, id_power, id_mode, id_out, id_scenario;
    std::string id_season = "winter";
    int id_order = 2, id_step = 0;
    double id_split = 0.7;
    identify_cmd->add_option("--t-ref", id_t_ref, "setpoint CSV (degC)");
    identify_cmd->add_option("--n-occ", id_n_occ, "occupancy CSV (persons)");
    identify_cmd->add_option("--t-ext", id_t_ext, "external temperature CSV (degC)");
    identify_cmd->add_option("--power", id_power, "heating/cooling power CSV (kW)");
    identify_cmd->add_option("--scenario", id_scenario,
                             "project JSON with a 'training' block (alternative to the four CSVs)");
    identify_cmd->add_option("--season", id_season, "winter or summer (with --scenario)")
        ->check(CLI::IsMember({"winter", "summer"}));
    identify_cmd->add_option("--order", id_order, "model order (1-3)")->check(CLI::Range(1, 3));
    identify_cmd->add_option("--split", id_split, "identification fraction, (0.5, 0.95)");
    identify_cmd->add_option("--mode", id_mode, "heating or cooling");
    identify_cmd->add_option("--step", id_step, "resample inputs to this step (minutes)");
    identify_cmd->add_option("--out", id_out, "write the model JSON here");

    // envelope
    auto* envelope_cmd = app.add_subcommand("envelope", "dynamic thermal capacity of an envelope");
    std::string env_path;
    double env_period = kDefaultPeriodS;
    bool env_no_films = false;
    envelope_cmd->add_option("--construction", env_path, "construction JSON")->required();
    envelope_cmd->add_option("--period", env_period, "cycle period, seconds");
    envelope_cmd->add_flag("--no-films", env_no_films, "exclude surface film resistances");

    // decide
    auto* decide_cmd = app.add_subcommand("decide", "evaluate one forecast window");
    std::string decide_input;
    decide_cmd->add_option("--input", decide_input, "JSON with 'config' and 'window'")->required();

    // simulate
    auto* simulate_cmd = app.add_subcommand("simulate", "run a scenario end to end");
    std::string sim_scenario, sim_out;
    bool sim_controlled = false, sim_baseline = false;
    simulate_cmd->add_option("--scenario", sim_scenario, "project JSON")->required();
    simulate_cmd->add_flag("--controlled", sim_controlled, "apply the storage policy");
    simulate_cmd->add_flag("--baseline", sim_baseline, "no storage (alpha = 0)");
    simulate_cmd->add_option("--out", sim_out, "output directory override");

    // tune
    auto* tune_cmd = app.add_subcommand("tune", "hyperparameter sweep and Pareto selection");
    std::string tune_scenario, tune_spec, tune_out;
    int tune_threads = 0;
    bool tune_heatmap = false;
    tune_cmd->add_option("--scenario", tune_scenario, "project JSON")->required();
    tune_cmd->add_option("--spec", tune_spec, "sweep spec JSON (defaults mirror the full grid)");
    tune_cmd->add_option("--threads", tune_threads, "parallelism cap");
    tune_cmd->add_flag("--heatmap-data", tune_heatmap, "emit the (ts x m) matrix CSV");
    tune_cmd->add_option("--out", tune_out, "output directory override");

    // pmv
    auto* pmv_cmd = app.add_subcommand("pmv", "Fanger PMV/PPD for one condition");
    double pmv_ta = 20.0, pmv_tr = 20.0, pmv_v = 0.1, pmv_rh = 50.0, pmv_met = 1.2, pmv_clo = 1.0;
    std::string pmv_class;
    pmv_cmd->add_option("--ta", pmv_ta, "air temperature, degC")->required();
    auto* tr_opt = pmv_cmd->add_option("--tr", pmv_tr, "mean radiant temperature (default: ta)");
    pmv_cmd->add_option("--v", pmv_v, "air speed, m/s")->required();
    pmv_cmd->add_option("--rh", pmv_rh, "relative humidity, %")->required();
    pmv_cmd->add_option("--met", pmv_met, "metabolic rate, met")->required();
    pmv_cmd->add_option("--clo", pmv_clo, "clothing insulation, clo")->required();
    pmv_cmd->add_option("--class", pmv_class, "'existing' or 'new' limit check");

    // report
    auto* report_cmd = app.add_subcommand("report", "baseline vs controlled report bundle");
    std::string rep_scenario, rep_out;
    bool rep_figures = false;
    report_cmd->add_option("--scenario", rep_scenario, "project JSON")->required();
    report_cmd->add_flag("--figure-data", rep_figures, "emit per-window plot-data CSVs");
    report_cmd->add_option("--out", rep_out, "output directory override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (identify_cmd->parsed())
            return cmd_identify(id_t_ref, id_n_occ, id_t_ext, id_power, id_scenario, id_season,
                                id_order, id_split, id_mode, id_step, id_out);
        if (envelope_cmd->parsed()) return cmd_envelope(env_path, env_period, env_no_films);
        if (decide_cmd->parsed()) return cmd_decide(decide_input);
        if (simulate_cmd->parsed()) {
            if (sim_controlled == sim_baseline)
                throw Error("pass exactly one of --controlled / --baseline");
            return cmd_simulate(sim_scenario, sim_controlled, sim_out);
        }
        if (tune_cmd->parsed())
            return cmd_tune(tune_scenario, tune_spec, tune_out, tune_threads, tune_heatmap);
        if (pmv_cmd->parsed())
            return cmd_pmv(pmv_ta, pmv_tr, tr_opt->count() > 0, pmv_v, pmv_rh, pmv_met, pmv_clo,
                           pmv_class);
        if (report_cmd->parsed()) return cmd_report(rep_scenario, rep_figures, rep_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
