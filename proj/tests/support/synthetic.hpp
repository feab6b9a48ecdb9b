#pragma once

#include "ballast/simulator.hpp"
#include "ballast/thermal_model.hpp"
#include "ballast/timeseries.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace testsupport {

using namespace ballast;

inline constexpr Minutes kTz{60};  // fixed CET offset used by all desk scenarios

/// Stable order-2 heating surrogate, observable canonical form, poles
/// {0.7, 0.5}. DC gains: +0.08 kW/K on the setpoint, -0.05 kW/person,
/// -0.06 kW/K on the outdoor temperature.
inline StateSpaceModel synthetic_heating_model(Minutes step) {
    Matrix a = Matrix::zeros(2, 2);
    a(0, 0) = 1.2;
    a(0, 1) = 1.0;
    a(1, 0) = -0.35;
    Matrix b = Matrix::zeros(2, 3);
    b(0, 0) = 0.008;
    b(1, 0) = 0.004;  // sums to 0.08 * (1 - 1.2 + 0.35)
    b(0, 1) = -0.005;
    b(1, 1) = -0.0025;
    b(0, 2) = -0.006;
    b(1, 2) = -0.003;
    Matrix c = Matrix::zeros(1, 2);
    c(0, 0) = 1.0;
    return StateSpaceModel(std::move(a), std::move(b), std::move(c), Matrix::zeros(1, 3), step,
                           Mode::heating);
}

/// Cooling counterpart, poles {0.6, 0.4}: demand rises with the outdoor
/// temperature and occupancy, falls with the setpoint.
inline StateSpaceModel synthetic_cooling_model(Minutes step) {
    Matrix a = Matrix::zeros(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 1.0;
    a(1, 0) = -0.24;
    Matrix b = Matrix::zeros(2, 3);
    b(0, 0) = -0.0128;
    b(1, 0) = -0.0064;  // -0.08 kW/K
    b(0, 1) = 0.008;
    b(1, 1) = 0.004;
    b(0, 2) = 0.0144;
    b(1, 2) = 0.0072;  // +0.09 kW/K
    Matrix c = Matrix::zeros(1, 2);
    c(0, 0) = 1.0;
    return StateSpaceModel(std::move(a), std::move(b), std::move(c), Matrix::zeros(1, 3), step,
                           Mode::cooling);
}

inline double local_hour(TimePoint t) {
    const TimePoint local = t + kTz;
    const auto days = std::chrono::floor<std::chrono::days>(local);
    return std::chrono::duration_cast<std::chrono::seconds>(local - days).count() / 3600.0;
}

inline double day_of_year(TimePoint t) {
    const auto days = std::chrono::floor<std::chrono::days>(t + kTz);
    const std::chrono::year_month_day ymd{days};
    const auto jan1 = std::chrono::sys_days{ymd.year() / 1 / 1};
    return static_cast<double>((days - jan1).count());
}

/// Hourly carbon intensity with a daily swing and a weekly wobble, gCO2/kWh.
inline TimeSeries synthetic_ci(TimePoint start, int days) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(days) * 24);
    for (int i = 0; i < days * 24; ++i) {
        const TimePoint t = start + std::chrono::hours{i};
        const double h = local_hour(t);
        const double d = day_of_year(t);
        v.push_back(350.0 + 120.0 * std::sin(2.0 * std::numbers::pi * (h - 16.0) / 24.0) +
                    15.0 * std::sin(2.0 * std::numbers::pi * d / 7.0));
    }
    return TimeSeries(start, Minutes{60}, std::move(v), Unit::grams_co2_per_kwh);
}

/// Hourly PV yield, kWh per hour: a daylight bell scaled by a mild seasonal
/// factor (peak near the end of June).
inline TimeSeries synthetic_pv(TimePoint start, int days, double peak_kw = 4.0) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(days) * 24);
    for (int i = 0; i < days * 24; ++i) {
        const TimePoint t = start + std::chrono::hours{i};
        const double h = local_hour(t);
        const double d = day_of_year(t);
        const double season =
            0.7 + 0.3 * std::cos(2.0 * std::numbers::pi * (d - 172.0) / 365.0);
        const double bell = std::max(std::sin(std::numbers::pi * (h - 7.0) / 10.0), 0.0);
        v.push_back(h >= 7.0 && h <= 17.0 ? peak_kw * season * bell : 0.0);
    }
    return TimeSeries(start, Minutes{60}, std::move(v), Unit::kilowatt_hour);
}

/// Hourly outdoor temperature: seasonal mean plus a daily swing, degC.
inline TimeSeries synthetic_t_ext(TimePoint start, int days) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(days) * 24);
    for (int i = 0; i < days * 24; ++i) {
        const TimePoint t = start + std::chrono::hours{i};
        const double h = local_hour(t);
        const double d = day_of_year(t);
        const double seasonal =
            12.0 - 10.0 * std::cos(2.0 * std::numbers::pi * (d - 20.0) / 365.0);
        v.push_back(seasonal + 4.0 * std::sin(2.0 * std::numbers::pi * (h - 14.0) / 24.0));
    }
    return TimeSeries(start, Minutes{60}, std::move(v), Unit::celsius);
}

inline Schedule winter_setpoints() {
    return Schedule({{0, 8, 18}, {8, 19, 20}, {19, 24, 18}}, {{0, 24, 18}});
}

inline Schedule summer_setpoints() {
    return Schedule({{0, 8, 28}, {8, 19, 26}, {19, 24, 28}}, {{0, 24, 28}});
}

inline Schedule office_occupancy() {
    return Schedule({{0, 8, 0}, {8, 19, 2}, {19, 24, 0}}, {{0, 24, 0}});
}

/// Desk-scale scenario over [start, start + days) with synthetic signals,
/// paper-style schedules and the synthetic surrogates at the given step.
inline ScenarioConfig desk_scenario(TimePoint start, int days, Minutes step,
                                    double c_th_kj_k = 6531.77, double omega = 1e6,
                                    std::size_t horizon_steps = 0) {
    ControllerConfig controller;
    controller.omega = omega;
    controller.step = step;
    controller.horizon_steps = horizon_steps > 0
                                   ? horizon_steps
                                   : static_cast<std::size_t>(12 * 60 / step.count());
    controller.gamma = 1.0;
    controller.mode_sign = +1;
    controller.c_th_kj_k = c_th_kj_k;

    return ScenarioConfig{
        start,
        start + std::chrono::days{days},
        kTz,
        SeasonWindow{},
        winter_setpoints(),
        summer_setpoints(),
        office_occupancy(),
        synthetic_ci(start, days),
        synthetic_pv(start, days),
        synthetic_t_ext(start, days),
        synthetic_heating_model(step),
        synthetic_cooling_model(step),
        controller,
    };
}

inline TimePoint make_time(int year, unsigned month, unsigned day, int hour = 0,
                           int minute = 0) {
    return std::chrono::sys_days{std::chrono::year{year} / month / day} +
           std::chrono::hours{hour} + std::chrono::minutes{minute};
}

}  // namespace testsupport
