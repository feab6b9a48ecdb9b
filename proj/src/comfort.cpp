#include "ballast/comfort.hpp"

#include "ballast/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ballast {

namespace {

constexpr double kWattsPerMet = 58.15;   // W/m2
constexpr double kM2kwPerClo = 0.155;    // m2K/W

void validate(const ComfortInput& in) {
    if (in.air_speed_m_s < 0.0) throw Error("air speed must be non-negative");
    if (in.relative_humidity_pct < 0.0 || in.relative_humidity_pct > 100.0)
        throw Error("relative humidity must lie in [0, 100]");
    if (!(in.metabolic_rate_met > 0.0)) throw Error("metabolic rate must be positive");
    if (in.clothing_clo < 0.0) throw Error("clothing insulation must be non-negative");
}

}  // namespace

ComfortResult pmv(const ComfortInput& in) {
    validate(in);

    const double ta = in.air_temp_c;
    const double tr = in.mean_radiant_temp_c;
    // relative air velocity: body movement above 1 met adds 0.3 m/s per met
    const double var =
        in.air_speed_m_s + 0.3 * std::max(in.metabolic_rate_met - 1.0, 0.0);

    // water vapour partial pressure, Pa
    const double pa =
        in.relative_humidity_pct * 10.0 * std::exp(16.6536 - 4030.183 / (ta + 235.0));

    const double icl = kM2kwPerClo * in.clothing_clo;
    const double met_w = in.metabolic_rate_met * kWattsPerMet;
    const double mw = met_w;  // no external work
    const double fcl = icl <= 0.078 ? 1.0 + 1.29 * icl : 1.05 + 0.645 * icl;
    const double hcf = 12.1 * std::sqrt(var);

    const double taa = ta + 273.0;
    const double tra = tr + 273.0;

    // clothing surface temperature by fixed-point iteration (scaled by 100)
    double tcla = taa + (35.5 - ta) / (3.5 * icl + 0.1);
    const double p1 = icl * fcl;
    const double p2 = p1 * 3.96;
    const double p3 = p1 * 100.0;
    const double p4 = p1 * taa;
    const double p5 = 308.7 - 0.028 * mw + p2 * std::pow(tra / 100.0, 4.0);

    double xn = tcla / 100.0;
    double xf = tcla / 50.0;
    double hc = hcf;
    const double eps = 1e-7;  // 1e-5 K on the clothing surface temperature
    int iterations = 0;
    while (std::abs(xn - xf) > eps) {
        if (++iterations > 200)
            throw NoConvergence("clothing surface temperature did not converge in 200 steps");
        xf = (xf + xn) / 2.0;
        const double hcn = 2.38 * std::pow(std::abs(100.0 * xf - taa), 0.25);
        hc = std::max(hcf, hcn);
        xn = (p5 + p4 * hc - p2 * std::pow(xf, 4.0)) / (100.0 + p3 * hc);
    }
    const double tcl = 100.0 * xn - 273.0;

    // heat loss components, W/m2
    const double hl1 = 3.05 * 0.001 * (5733.0 - 6.99 * mw - pa);      // skin diffusion
    const double hl2 = mw > kWattsPerMet ? 0.42 * (mw - kWattsPerMet) : 0.0;  // sweating
    const double hl3 = 1.7 * 1e-5 * met_w * (5867.0 - pa);            // latent respiration
    const double hl4 = 0.0014 * met_w * (34.0 - ta);                  // dry respiration
    const double hl5 = 3.96 * fcl * (std::pow(xn, 4.0) - std::pow(tra / 100.0, 4.0));
    const double hl6 = fcl * hc * (tcl - ta);

    const double sensitivity = 0.303 * std::exp(-0.036 * met_w) + 0.028;
    const double pmv_value = sensitivity * (mw - hl1 - hl2 - hl3 - hl4 - hl5 - hl6);
    const double ppd_value =
        100.0 - 95.0 * std::exp(-0.03353 * std::pow(pmv_value, 4.0) -
                                0.2179 * pmv_value * pmv_value);
    return ComfortResult{pmv_value, ppd_value};
}

bool classify(const ComfortResult& result, BuildingClass cls) {
    const double bound = cls == BuildingClass::existing ? 0.7 : 0.5;
    return std::abs(result.pmv) < bound;
}

}  // namespace ballast
