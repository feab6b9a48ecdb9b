#include "ballast/controller.hpp"

#include "ballast/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ballast {

void ControllerConfig::validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw Error("omega must be positive");
    if (horizon_steps < 1) throw Error("horizon must be at least one step");
    if (step.count() <= 0) throw Error("controller step must be positive");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw Error("gamma must lie in (0, 1]");
    if (mode_sign != 1 && mode_sign != -1) throw Error("mode sign must be +1 or -1");
    if (!(c_th_kj_k > 0.0) || !std::isfinite(c_th_kj_k))
        throw Error("thermal capacity must be positive");
}

ForecastWindow::ForecastWindow(std::vector<double> e_pred, std::vector<double> e_solar,
                               std::vector<double> ci)
    : e_pred_kwh(std::move(e_pred)), e_solar_kwh(std::move(e_solar)), ci_g_kwh(std::move(ci)) {
    if (e_pred_kwh.size() != e_solar_kwh.size() || e_pred_kwh.size() != ci_g_kwh.size())
        throw LengthMismatch("forecast window series have different lengths");
    for (std::size_t i = 0; i < e_pred_kwh.size(); ++i)
        if (e_pred_kwh[i] < 0.0 || e_solar_kwh[i] < 0.0 || ci_g_kwh[i] < 0.0)
            throw Error("forecast window values must be non-negative");
}

std::vector<double> solar_surplus(const ForecastWindow& fw) {
    std::vector<double> out(fw.size());
    for (std::size_t i = 0; i < fw.size(); ++i)
        out[i] = std::max(fw.e_solar_kwh[i] - fw.e_pred_kwh[i], 0.0);
    return out;
}

double baseline_grid_energy(const ForecastWindow& fw) {
    double total = 0.0;
    for (std::size_t i = 0; i < fw.size(); ++i)
        total += std::max(fw.e_pred_kwh[i] - fw.e_solar_kwh[i], 0.0);
    return total;
}

double baseline_emissions(const ForecastWindow& fw) {
    double total = 0.0;
    for (std::size_t i = 0; i < fw.size(); ++i)
        total += std::max(fw.e_pred_kwh[i] - fw.e_solar_kwh[i], 0.0) * fw.ci_g_kwh[i];
    return total;
}

namespace {

double surplus_total(const ForecastWindow& fw) {
    double total = 0.0;
    for (std::size_t i = 0; i < fw.size(); ++i)
        total += std::max(fw.e_solar_kwh[i] - fw.e_pred_kwh[i], 0.0);
    return total;
}

double ci_total(const ForecastWindow& fw) {
    double total = 0.0;
    for (double ci : fw.ci_g_kwh) total += ci;
    return total;
}

}  // namespace

double controlled_emissions(const ForecastWindow& fw, double alpha) {
    if (fw.size() == 0) return 0.0;
    const double offset = alpha / static_cast<double>(fw.size()) * surplus_total(fw);
    double total = 0.0;
    for (std::size_t i = 0; i < fw.size(); ++i) {
        const double import = std::max(fw.e_pred_kwh[i] - fw.e_solar_kwh[i], 0.0);
        total += std::max(import - offset, 0.0) * fw.ci_g_kwh[i];
    }
    return total;
}

double temperature_shift(const ControllerConfig& cfg, double stored_kwh) {
    return static_cast<double>(cfg.mode_sign) * cfg.gamma * stored_kwh * kKjPerKwh /
           cfg.c_th_kj_k;
}

double comfort_cost(const ControllerConfig& cfg, const ForecastWindow& fw, double alpha) {
    const double total_shift = cfg.gamma * surplus_total(fw) * kKjPerKwh / cfg.c_th_kj_k;
    return alpha * alpha * total_shift * total_shift;
}

double total_cost(const ControllerConfig& cfg, const ForecastWindow& fw, double alpha) {
    if (fw.size() == 0) return 0.0;
    const double surplus = surplus_total(fw);
    const double emission_term =
        (baseline_grid_energy(fw) - alpha / static_cast<double>(fw.size()) * surplus) *
        ci_total(fw);
    const double shift = cfg.gamma * surplus / cfg.c_th_kj_k;
    return emission_term + cfg.omega * alpha * alpha * shift * shift;
}

ControlDecision alpha_star(const ControllerConfig& cfg, const ForecastWindow& fw) {
    cfg.validate();
    ControlDecision decision;
    if (fw.size() == 0) return decision;

    const double surplus = surplus_total(fw);
    const double m = static_cast<double>(fw.size());
    decision.j_co2_baseline_g = baseline_emissions(fw);
    if (surplus <= kSurplusEpsilonKwh) {
        decision.j_co2_controlled_g = decision.j_co2_baseline_g;
        decision.j_co2_objective_g = baseline_grid_energy(fw) * ci_total(fw);
        return decision;
    }

    decision.alpha_unsaturated = cfg.c_th_kj_k * cfg.c_th_kj_k /
                                 (2.0 * cfg.omega * m * cfg.gamma * cfg.gamma) *
                                 (ci_total(fw) / surplus);
    decision.alpha = std::clamp(decision.alpha_unsaturated, 0.0, 1.0);

    const double current_surplus = std::max(fw.e_solar_kwh[0] - fw.e_pred_kwh[0], 0.0);
    decision.delta_q_kwh = cfg.gamma * decision.alpha * current_surplus;
    decision.delta_t_k = temperature_shift(cfg, decision.alpha * current_surplus);
    decision.j_co2_controlled_g = controlled_emissions(fw, decision.alpha);
    decision.j_co2_objective_g =
        (baseline_grid_energy(fw) - decision.alpha / m * surplus) * ci_total(fw);
    decision.j_comfort_k2 = comfort_cost(cfg, fw, decision.alpha);
    return decision;
}

void SignalSet::check_aligned(const StateSpaceModel& model) const {
    const Minutes step = model.step();
    if (t_ref.step() != step || n_occ.step() != step || t_ext.step() != step ||
        e_solar.step() != step || ci.step() != step)
        throw StepMismatch("signal step does not match the controller sampling time");
    const std::size_t n = t_ref.size();
    if (n_occ.size() != n || t_ext.size() != n || e_solar.size() != n || ci.size() != n)
        throw LengthMismatch("signal series have different lengths");
    if (t_ref.unit() != Unit::celsius || t_ext.unit() != Unit::celsius ||
        e_solar.unit() != Unit::kilowatt_hour || ci.unit() != Unit::grams_co2_per_kwh)
        throw UnitMismatch("signal set carries unexpected unit tags");
}

ForecastWindow build_window(const ControllerConfig& cfg, const StateSpaceModel& model,
                            const SignalSet& signals, std::size_t k, const StateVector& x_k) {
    if (model.step() != cfg.step)
        throw StepMismatch("surrogate model step does not match the controller ts");
    if (k >= signals.size()) throw HorizonOverrun("step index beyond the signal end");
    const std::size_t m = std::min<std::size_t>(cfg.horizon_steps, signals.size() - k);
    const double step_hours = static_cast<double>(cfg.step.count()) / 60.0;

    std::vector<double> e_pred;
    e_pred.reserve(m);
    StateVector x = x_k;
    for (std::size_t i = 0; i < m; ++i) {
        const InputVector u{signals.t_ref.values()[k + i], signals.n_occ.values()[k + i],
                            signals.t_ext.values()[k + i]};
        e_pred.push_back(std::max(model.output(x, u), 0.0) * step_hours);
        model.advance(x, u);
    }
    return ForecastWindow(std::move(e_pred), window(signals.e_solar, k, m),
                          window(signals.ci, k, m));
}

ControlDecision receding_step(const ControllerConfig& cfg, const StateSpaceModel& model,
                              const SignalSet& signals, std::size_t k, const StateVector& x_k) {
    cfg.validate();
    signals.check_aligned(model);
    if (k >= signals.size()) throw HorizonOverrun("step index beyond the signal end");
    if (signals.size() - k < 2) {
        // end of data: no meaningful horizon left, fall back to doing nothing
        ForecastWindow fw = build_window(cfg, model, signals, k, x_k);
        ControlDecision decision;
        decision.j_co2_baseline_g = baseline_emissions(fw);
        decision.j_co2_controlled_g = decision.j_co2_baseline_g;
        return decision;
    }
    return alpha_star(cfg, build_window(cfg, model, signals, k, x_k));
}

ControlDecision receding_step(const ControllerConfig& cfg, const StateSpaceModel& model,
                              const SignalSet& signals, std::size_t k) {
    cfg.validate();
    signals.check_aligned(model);
    if (k >= signals.size()) throw HorizonOverrun("step index beyond the signal end");
    StateVector x{};
    for (std::size_t i = 0; i < k; ++i) {
        const InputVector u{signals.t_ref.values()[i], signals.n_occ.values()[i],
                            signals.t_ext.values()[i]};
        model.advance(x, u);
    }
    return receding_step(cfg, model, signals, k, x);
}

}  // namespace ballast
