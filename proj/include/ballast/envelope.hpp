#pragma once

#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ballast {

/// Period of the driving temperature cycle, seconds. 24 h unless overridden.
inline constexpr double kDefaultPeriodS = 86400.0;

struct Layer {
    double thickness_m;
    double conductivity_w_mk;
    double density_kg_m3;
    double specific_heat_j_kgk;
};

/// Layered building component. layers[0] is the internal (room-side) layer.
struct Construction {
    std::string name;
    std::vector<Layer> layers;
    double area_m2 = 0.0;
    double r_si_m2kw = 0.13;  // internal surface film resistance
    double r_se_m2kw = 0.04;  // external surface film resistance
};

/// 2x2 complex matrix relating sinusoidal temperature / heat-flux amplitudes
/// across a wall: (theta_2, q_2)^T = Z (theta_1, q_1)^T with side 1 internal.
/// Pure-resistance entries carry Z12 = -R (the off-diagonal sign convention
/// used throughout; kappa only sees |Z12|).
struct TransferMatrix {
    std::complex<double> z11, z12, z21, z22;

    std::complex<double> determinant() const { return z11 * z22 - z12 * z21; }
    TransferMatrix operator*(const TransferMatrix& rhs) const;
};

TransferMatrix identity_matrix();

/// Periodic one-dimensional conduction matrix of a homogeneous layer:
/// entries are cosh/sinh of (1+i) d/delta with penetration depth
/// delta = sqrt(lambda T / (pi rho c)). Unit determinant by construction.
TransferMatrix layer_matrix(const Layer& l, double period_s = kDefaultPeriodS);

/// Surface film (or air gap) as a pure thermal resistance.
TransferMatrix film_matrix(double resistance_m2kw);

/// Ordered product from the internal to the external side; the matrix of the
/// layer closest to the outside ends up leftmost.
TransferMatrix cascade(std::span<const TransferMatrix> ms);

/// Full component matrix: optional internal film, layers in order, optional
/// external film.
TransferMatrix construction_matrix(const Construction& c, double period_s = kDefaultPeriodS,
                                   bool include_films = true);

/// Internal areal heat capacity kappa = (T / 2 pi) |(Z11 - 1) / Z12|,
/// returned in kJ/(m2 K). Throws SingularZ12 when |Z12| < 1e-12.
double areal_heat_capacity(const TransferMatrix& z, double period_s = kDefaultPeriodS);

/// Area-weighted sum of per-component kappas, kJ/K.
double total_capacity(std::span<const std::pair<Construction, double>> components);

struct ComponentSummary {
    std::string name;
    double area_m2;
    double kappa_kj_m2k;
    double capacity_kj_k;  // kappa * area
};

struct EnvelopeSummary {
    std::vector<ComponentSummary> components;
    double total_capacity_kj_k = 0.0;
    double period_s = kDefaultPeriodS;
};

EnvelopeSummary summarize(std::span<const Construction> components,
                          double period_s = kDefaultPeriodS, bool include_films = true);

/// Parses the construction file format: {"components": [{"name", "area",
/// "r_si", "r_se", "layers": [[d, lambda, rho, c], ...]}, ...]}.
std::vector<Construction> constructions_from_json(const std::string& text);

}  // namespace ballast
