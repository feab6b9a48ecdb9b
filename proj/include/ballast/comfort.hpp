#pragma once

namespace ballast {

struct ComfortInput {
    double air_temp_c;
    double mean_radiant_temp_c;  // set equal to air_temp_c when unknown
    double air_speed_m_s;
    double relative_humidity_pct;
    double metabolic_rate_met;
    double clothing_clo;
};

struct ComfortResult {
    double pmv;  // predicted mean vote, [-3, +3] scale
    double ppd;  // predicted percentage dissatisfied, %
};

enum class BuildingClass { existing, new_build };

/// Fanger heat-balance PMV/PPD. The clothing surface temperature is solved
/// iteratively to 1e-5 K (at most 200 steps, else NoConvergence); the
/// convection coefficient is max(natural, forced). air_speed is the measured
/// value; the relative velocity correction for activity above 1 met
/// (+0.3 m/s per met) is applied internally.
ComfortResult pmv(const ComfortInput& input);

/// True iff |PMV| is strictly inside the class band: 0.7 for existing
/// buildings, 0.5 for new or renovated ones.
bool classify(const ComfortResult& result, BuildingClass cls);

}  // namespace ballast
