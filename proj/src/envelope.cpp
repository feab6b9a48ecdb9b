#include "ballast/envelope.hpp"

#include "ballast/errors.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

namespace ballast {

using cplx = std::complex<double>;

TransferMatrix TransferMatrix::operator*(const TransferMatrix& rhs) const {
    return TransferMatrix{
        z11 * rhs.z11 + z12 * rhs.z21,
        z11 * rhs.z12 + z12 * rhs.z22,
        z21 * rhs.z11 + z22 * rhs.z21,
        z21 * rhs.z12 + z22 * rhs.z22,
    };
}

TransferMatrix identity_matrix() {
    return TransferMatrix{1.0, 0.0, 0.0, 1.0};
}

TransferMatrix layer_matrix(const Layer& l, double period_s) {
    if (period_s <= 0.0) throw NonPositiveProperty("period must be positive");
    if (l.thickness_m <= 0.0 || l.conductivity_w_mk <= 0.0 || l.density_kg_m3 <= 0.0 ||
        l.specific_heat_j_kgk <= 0.0 || !std::isfinite(l.thickness_m) ||
        !std::isfinite(l.conductivity_w_mk) || !std::isfinite(l.density_kg_m3) ||
        !std::isfinite(l.specific_heat_j_kgk))
        throw NonPositiveProperty("layer properties must be positive and finite");

    const double delta = std::sqrt(l.conductivity_w_mk * period_s /
                                   (std::numbers::pi * l.density_kg_m3 * l.specific_heat_j_kgk));
    const cplx k = cplx(1.0, 1.0) / delta;
    const cplx kd = k * l.thickness_m;
    const cplx ch = std::cosh(kd);
    const cplx sh = std::sinh(kd);
    return TransferMatrix{
        ch,
        -sh / (l.conductivity_w_mk * k),
        -l.conductivity_w_mk * k * sh,
        ch,
    };
}

TransferMatrix film_matrix(double resistance_m2kw) {
    if (resistance_m2kw < 0.0 || !std::isfinite(resistance_m2kw))
        throw NonPositiveProperty("film resistance must be non-negative and finite");
    return TransferMatrix{1.0, -resistance_m2kw, 0.0, 1.0};
}

TransferMatrix cascade(std::span<const TransferMatrix> ms) {
    if (ms.empty()) throw EmptySequence("cascade of zero matrices");
    TransferMatrix acc = ms.front();
    for (std::size_t i = 1; i < ms.size(); ++i) acc = ms[i] * acc;
    return acc;
}

TransferMatrix construction_matrix(const Construction& c, double period_s, bool include_films) {
    if (c.layers.empty()) throw EmptySequence("construction '" + c.name + "' has no layers");
    std::vector<TransferMatrix> chain;
    chain.reserve(c.layers.size() + 2);
    if (include_films) chain.push_back(film_matrix(c.r_si_m2kw));
    for (const auto& layer : c.layers) chain.push_back(layer_matrix(layer, period_s));
    if (include_films) chain.push_back(film_matrix(c.r_se_m2kw));
    return cascade(chain);
}

double areal_heat_capacity(const TransferMatrix& z, double period_s) {
    if (period_s <= 0.0) throw NonPositiveProperty("period must be positive");
    if (std::abs(z.z11 - 1.0) == 0.0) return 0.0;  // identity-like: nothing stores heat
    if (std::abs(z.z12) < 1e-12)
        throw SingularZ12("Z12 magnitude below 1e-12; component has no thermal resistance");
    const double kappa_si = period_s / (2.0 * std::numbers::pi) * std::abs((z.z11 - 1.0) / z.z12);
    return kappa_si / 1000.0;  // J -> kJ
}

double total_capacity(std::span<const std::pair<Construction, double>> components) {
    double total = 0.0;
    for (const auto& [construction, kappa] : components) {
        if (construction.area_m2 <= 0.0)
            throw NonPositiveProperty("component '" + construction.name + "' has non-positive area");
        total += kappa * construction.area_m2;
    }
    return total;
}

EnvelopeSummary summarize(std::span<const Construction> components, double period_s,
                          bool include_films) {
    EnvelopeSummary summary;
    summary.period_s = period_s;
    for (const auto& c : components) {
        if (c.area_m2 <= 0.0)
            throw NonPositiveProperty("component '" + c.name + "' has non-positive area");
        const double kappa = areal_heat_capacity(construction_matrix(c, period_s, include_films),
                                                 period_s);
        summary.components.push_back({c.name, c.area_m2, kappa, kappa * c.area_m2});
        summary.total_capacity_kj_k += kappa * c.area_m2;
    }
    return summary;
}

std::vector<Construction> constructions_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("construction file: ") + e.what());
    }
    if (!doc.contains("components") || !doc["components"].is_array())
        throw MissingKey("construction file: missing 'components' array");

    std::vector<Construction> out;
    for (const auto& jc : doc["components"]) {
        Construction c;
        if (!jc.contains("name")) throw MissingKey("construction component: missing 'name'");
        if (!jc.contains("area")) throw MissingKey("construction component: missing 'area'");
        if (!jc.contains("layers")) throw MissingKey("construction component: missing 'layers'");
        c.name = jc["name"].get<std::string>();
        c.area_m2 = jc["area"].get<double>();
        c.r_si_m2kw = jc.value("r_si", 0.13);
        c.r_se_m2kw = jc.value("r_se", 0.04);
        for (const auto& jl : jc["layers"]) {
            if (!jl.is_array() || jl.size() != 4)
                throw ParseError("layer of '" + c.name + "' must be [d, lambda, rho, c]");
            c.layers.push_back(Layer{jl[0].get<double>(), jl[1].get<double>(),
                                     jl[2].get<double>(), jl[3].get<double>()});
        }
        if (c.layers.empty()) throw ParseError("component '" + c.name + "' has no layers");
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace ballast
