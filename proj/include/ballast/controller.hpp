#pragma once

#include "ballast/thermal_model.hpp"
#include "ballast/timeseries.hpp"

#include <cstddef>
#include <vector>

namespace ballast {

/// kJ released per kWh stored; converts stored electrical energy into the
/// temperature shift of a thermal mass rated in kJ/K.
inline constexpr double kKjPerKwh = 3600.0;

/// Below this total surplus (kWh) a horizon is treated as surplus-free and
/// the decision degenerates to alpha = 0.
inline constexpr double kSurplusEpsilonKwh = 1e-12;

/// Tuning knobs of the receding-horizon storage policy.
///
/// omega balances emissions against comfort and is a raw scalar: the cost it
/// weights is evaluated with C_th in kJ/K, energies in kWh and carbon
/// intensity in gCO2/kWh, so omega absorbs the leftover units. Values around
/// 1e6 are the useful range; sweeps go up to 1e15.
struct ControllerConfig {
    double omega = 1e6;
    std::size_t horizon_steps = 24;  // m
    Minutes step{30};                // ts
    double gamma = 1.0;              // surplus-to-thermal conversion efficiency
    int mode_sign = +1;              // eta: +1 heating, -1 cooling
    double c_th_kj_k = 0.0;          // effective thermal capacity

    void validate() const;
};

/// Horizon of m aligned per-step forecasts: predicted demand, PV yield
/// (both kWh per step) and grid carbon intensity (gCO2/kWh).
struct ForecastWindow {
    std::vector<double> e_pred_kwh;
    std::vector<double> e_solar_kwh;
    std::vector<double> ci_g_kwh;

    ForecastWindow() = default;
    ForecastWindow(std::vector<double> e_pred, std::vector<double> e_solar, std::vector<double> ci);

    std::size_t size() const { return e_pred_kwh.size(); }
};

/// Everything the policy knows about one step. alpha is the clamped fraction
/// of the horizon's PV surplus routed into the thermal mass; the J terms are
/// the emission cost of the horizon without and with the stored offset, and
/// the squared total setpoint shift. j_co2_objective_g is the emission term
/// of the simplified objective the closed form minimizes (no per-step
/// re-clipping); its distance from j_co2_controlled_g exposes the
/// simplification per decision.
struct ControlDecision {
    double alpha = 0.0;
    double alpha_unsaturated = 0.0;
    double delta_t_k = 0.0;           // setpoint shift applied this step, K
    double delta_q_kwh = 0.0;         // energy stored this step
    double j_co2_baseline_g = 0.0;
    double j_co2_controlled_g = 0.0;
    double j_co2_objective_g = 0.0;
    double j_comfort_k2 = 0.0;
};

/// Per-step PV surplus: max(E_solar - E_pred, 0).
std::vector<double> solar_surplus(const ForecastWindow& fw);

/// Grid energy the horizon would draw with no storage at all.
double baseline_grid_energy(const ForecastWindow& fw);

/// Emissions of the no-storage horizon: sum of clipped imports times CI.
double baseline_emissions(const ForecastWindow& fw);

/// Horizon emissions when a fraction alpha of the total surplus is stored
/// and released uniformly: each step's import is reduced by
/// (alpha / m) * sum(surplus) and re-clipped at zero. Never exceeds
/// baseline_emissions for alpha in [0, 1].
double controlled_emissions(const ForecastWindow& fw, double alpha);

/// Setpoint shift caused by storing `stored_kwh` in the thermal mass:
/// eta * gamma * stored * 3600 / C_th, in kelvin (signed by mode).
double temperature_shift(const ControllerConfig& cfg, double stored_kwh);

/// Physical comfort penalty in K^2: the squared total shift the horizon's
/// storage would induce, alpha^2 (gamma * sum(surplus) * 3600 / C_th)^2.
double comfort_cost(const ControllerConfig& cfg, const ForecastWindow& fw, double alpha);

/// The optimization objective exactly as the closed form is derived from it:
///   J(alpha) = (E_grid0 - (alpha/m) sum(surplus)) * sum(CI)
///              + omega * alpha^2 * (gamma * sum(surplus) / C_th)^2
/// Note this is the simplified objective: no per-step re-clipping (that
/// lives in controlled_emissions) and no kWh->kJ conversion in the comfort
/// term (omega absorbs units). The horizon length m is the window size.
double total_cost(const ControllerConfig& cfg, const ForecastWindow& fw, double alpha);

/// Closed-form minimizer of total_cost, saturated to [0, 1]:
///   alpha* = C_th^2 / (2 omega m gamma^2) * sum(CI) / sum(surplus)
/// with alpha* = 0 whenever the horizon has no surplus. Populates the full
/// decision including the current-step temperature shift.
ControlDecision alpha_star(const ControllerConfig& cfg, const ForecastWindow& fw);

/// Realized input signals a receding-horizon run draws from, all aligned to
/// the controller step. t_ref carries the user schedule (the forecast is
/// always built against the unshifted setpoint).
struct SignalSet {
    TimeSeries t_ref;    // degC
    TimeSeries n_occ;    // persons
    TimeSeries t_ext;    // degC
    TimeSeries e_solar;  // kWh per step
    TimeSeries ci;       // gCO2/kWh

    void check_aligned(const StateSpaceModel& model) const;
    std::size_t size() const { return t_ref.size(); }
};

/// Builds the forecast window at step k by free-running the surrogate from
/// state x_k: E_pred(i) is the clipped power prediction times the step
/// length. The window shrinks near the series end.
ForecastWindow build_window(const ControllerConfig& cfg, const StateSpaceModel& model,
                            const SignalSet& signals, std::size_t k, const StateVector& x_k);

/// One receding-horizon decision with an explicit model state at step k.
/// Fewer than two remaining steps force the zero decision.
ControlDecision receding_step(const ControllerConfig& cfg, const StateSpaceModel& model,
                              const SignalSet& signals, std::size_t k, const StateVector& x_k);

/// Convenience overload that reconstructs the model state by free-running
/// from rest at the start of the signals. Prefer the explicit-state overload
/// inside loops.
ControlDecision receding_step(const ControllerConfig& cfg, const StateSpaceModel& model,
                              const SignalSet& signals, std::size_t k);

}  // namespace ballast
