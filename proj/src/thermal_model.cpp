#include "ballast/thermal_model.hpp"

#include "ballast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

namespace ballast {

std::string mode_name(Mode m) {
    return m == Mode::heating ? "heating" : "cooling";
}

Mode mode_from_name(const std::string& name) {
    if (name == "heating") return Mode::heating;
    if (name == "cooling") return Mode::cooling;
    throw ParseError("unknown mode: '" + name + "'");
}

std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs) {
    using cplx = std::complex<double>;
    switch (coeffs.size()) {
        case 0:
            return {};
        case 1:
            return {cplx(-coeffs[0], 0.0)};
        case 2: {
            const double b = coeffs[0], q = coeffs[1];
            const double disc = b * b - 4.0 * q;
            if (disc >= 0.0) {
                const double s = std::sqrt(disc);
                return {cplx((-b + s) / 2.0, 0.0), cplx((-b - s) / 2.0, 0.0)};
            }
            const double s = std::sqrt(-disc);
            return {cplx(-b / 2.0, s / 2.0), cplx(-b / 2.0, -s / 2.0)};
        }
        case 3: {
            const double a = coeffs[0], b = coeffs[1], d = coeffs[2];
            const double shift = -a / 3.0;
            const double p = b - a * a / 3.0;
            const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;
            const double disc = q * q / 4.0 + p * p * p / 27.0;
            if (disc > 0.0) {
                // one real root, one conjugate pair (Cardano)
                const double s = std::sqrt(disc);
                const double u = std::cbrt(-q / 2.0 + s);
                const double v = std::cbrt(-q / 2.0 - s);
                const double im = std::sqrt(3.0) / 2.0 * (u - v);
                return {cplx(u + v + shift, 0.0), cplx(-(u + v) / 2.0 + shift, im),
                        cplx(-(u + v) / 2.0 + shift, -im)};
            }
            if (p == 0.0) return {cplx(shift, 0.0), cplx(shift, 0.0), cplx(shift, 0.0)};
            // three real roots (trigonometric form); disc <= 0 implies p < 0 here
            const double m = 2.0 * std::sqrt(-p / 3.0);
            const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
            const double theta = std::acos(arg) / 3.0;
            std::vector<cplx> roots;
            for (int k = 0; k < 3; ++k)
                roots.emplace_back(
                    m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) + shift, 0.0);
            return roots;
        }
        default:
            throw Error("polynomial_roots supports degree <= 3");
    }
}

namespace {

std::vector<double> characteristic_coeffs(const Matrix& a) {
    const std::size_t n = a.rows;
    if (n == 1) return {-a(0, 0)};
    if (n == 2) return {-(a(0, 0) + a(1, 1)), a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)};
    const double tr = a(0, 0) + a(1, 1) + a(2, 2);
    const double m2 = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) +
                      (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) +
                      (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1));
    const double det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                       a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                       a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    return {-tr, m2, -det};
}

double spectral_radius_of(const Matrix& a) {
    double radius = 0.0;
    for (const auto& root : polynomial_roots(characteristic_coeffs(a)))
        radius = std::max(radius, std::abs(root));
    return radius;
}

}  // namespace

StateSpaceModel::StateSpaceModel(Matrix a, Matrix b, Matrix c, Matrix d, Minutes step, Mode mode)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)), step_(step),
      mode_(mode) {
    const std::size_t n = a_.rows;
    if (n < 1 || n > 3) throw Error("model order must be 1, 2 or 3");
    if (a_.cols != n || b_.rows != n || b_.cols != kInputs || c_.rows != 1 || c_.cols != n ||
        d_.rows != 1 || d_.cols != kInputs)
        throw Error("inconsistent state-space dimensions");
    if (step_.count() <= 0) throw Error("model step must be positive");
    spectral_radius_ = spectral_radius_of(a_);
    if (!(spectral_radius_ < 1.0))
        throw UnstableModel("spectral radius " + std::to_string(spectral_radius_) + " >= 1");
}

double StateSpaceModel::output(const StateVector& x, const InputVector& u) const {
    const std::size_t n = order();
    double y = 0.0;
    for (std::size_t i = 0; i < n; ++i) y += c_(0, i) * x[i];
    for (std::size_t j = 0; j < kInputs; ++j) y += d_(0, j) * u[j];
    return y;
}

void StateSpaceModel::advance(StateVector& x, const InputVector& u) const {
    const std::size_t n = order();
    StateVector next{};
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += a_(i, j) * x[j];
        for (std::size_t j = 0; j < kInputs; ++j) acc += b_(i, j) * u[j];
        next[i] = acc;
    }
    x = next;
}

namespace {

void check_aligned(const StateSpaceModel& model, const ModelInputs& in) {
    if (in.t_ref.step() != model.step() || in.n_occ.step() != model.step() ||
        in.t_ext.step() != model.step())
        throw StepMismatch("input step does not match the model sampling time");
    if (in.t_ref.size() != in.n_occ.size() || in.t_ref.size() != in.t_ext.size())
        throw LengthMismatch("input series have different lengths");
}

StateVector initial_state(const StateSpaceModel& model, std::span<const double> x0) {
    StateVector x{};
    if (x0.empty()) return x;
    if (x0.size() != model.order())
        throw LengthMismatch("initial state size does not match the model order");
    for (std::size_t i = 0; i < x0.size(); ++i) x[i] = x0[i];
    return x;
}

}  // namespace

std::vector<double> simulate_raw(const StateSpaceModel& model, const ModelInputs& inputs,
                                 std::span<const double> x0) {
    check_aligned(model, inputs);
    StateVector x = initial_state(model, x0);
    const std::size_t n = inputs.t_ref.size();
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const InputVector u{inputs.t_ref.values()[k], inputs.n_occ.values()[k],
                            inputs.t_ext.values()[k]};
        out.push_back(model.output(x, u));
        model.advance(x, u);
    }
    return out;
}

TimeSeries simulate(const StateSpaceModel& model, const ModelInputs& inputs,
                    std::span<const double> x0) {
    std::vector<double> raw = simulate_raw(model, inputs, x0);
    for (double& v : raw) v = std::max(v, 0.0);
    return TimeSeries(inputs.t_ref.start_time(), model.step(), std::move(raw), Unit::kilowatt);
}

double r_squared(std::span<const double> y_true, std::span<const double> y_pred) {
    if (y_true.size() != y_pred.size()) throw LengthMismatch("r_squared: length mismatch");
    if (y_true.size() < 2) throw InsufficientData("r_squared needs at least 2 samples");
    double mean = 0.0;
    for (double v : y_true) mean += v;
    mean /= static_cast<double>(y_true.size());
    double sse = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        sse += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
        sst += (y_true[i] - mean) * (y_true[i] - mean);
    }
    if (sst == 0.0) throw ConstantTruth("r_squared undefined for constant y_true");
    return 1.0 - sse / sst;
}

double nmae(std::span<const double> y_true, std::span<const double> y_pred) {
    if (y_true.size() != y_pred.size()) throw LengthMismatch("nmae: length mismatch");
    if (y_true.empty()) throw InsufficientData("nmae needs at least 1 sample");
    double scale = 0.0;
    for (double v : y_true) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) throw ZeroScale("nmae undefined when max |y_true| is 0");
    double mae = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) mae += std::abs(y_true[i] - y_pred[i]);
    mae /= static_cast<double>(y_true.size());
    return 100.0 * mae / scale;
}

namespace {

// Solves G theta = r by Gaussian elimination with partial pivoting.
// G is symmetric positive semi-definite here (normal equations).
std::vector<double> solve_linear(Matrix g, std::vector<double> r) {
    const std::size_t p = g.rows;
    double scale = 0.0;
    for (std::size_t i = 0; i < p; ++i) scale = std::max(scale, std::abs(g(i, i)));
    if (scale == 0.0) throw RankDeficient("regressor matrix is singular");

    std::vector<std::size_t> perm(p);
    for (std::size_t i = 0; i < p; ++i) perm[i] = i;

    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < p; ++row)
            if (std::abs(g(row, col)) > std::abs(g(pivot, col))) pivot = row;
        if (std::abs(g(pivot, col)) < 1e-12 * scale)
            throw RankDeficient("regressor matrix is rank deficient (collinear regressors)");
        if (pivot != col) {
            for (std::size_t j = 0; j < p; ++j) std::swap(g(col, j), g(pivot, j));
            std::swap(r[col], r[pivot]);
        }
        for (std::size_t row = col + 1; row < p; ++row) {
            const double f = g(row, col) / g(col, col);
            for (std::size_t j = col; j < p; ++j) g(row, j) -= f * g(col, j);
            r[row] -= f * r[col];
        }
    }
    std::vector<double> theta(p, 0.0);
    for (std::size_t i = p; i-- > 0;) {
        double acc = r[i];
        for (std::size_t j = i + 1; j < p; ++j) acc -= g(i, j) * theta[j];
        theta[i] = acc / g(i, i);
    }
    return theta;
}

// Expands prod (z - root_i) back into monic coefficients; roots come in
// conjugate pairs so the imaginary parts cancel.
std::vector<double> coeffs_from_roots(const std::vector<std::complex<double>>& roots) {
    std::vector<std::complex<double>> poly{1.0};
    for (const auto& root : roots) {
        std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] -= poly[i] * root;
        }
        poly = std::move(next);
    }
    std::vector<double> out;
    for (std::size_t i = 1; i < poly.size(); ++i) out.push_back(poly[i].real());
    return out;
}

constexpr double kStabilityRadius = 0.995;

}  // namespace

std::pair<StateSpaceModel, FitReport> identify(const ModelInputs& inputs,
                                               const TimeSeries& power, std::size_t order,
                                               double split_fraction, Mode mode) {
    if (order < 1 || order > 3) throw Error("identification order must be 1, 2 or 3");
    if (!(split_fraction > 0.5 && split_fraction < 0.95))
        throw Error("split_fraction must lie in (0.5, 0.95)");
    if (inputs.t_ref.size() != power.size() || inputs.n_occ.size() != power.size() ||
        inputs.t_ext.size() != power.size())
        throw LengthMismatch("identification inputs and output have different lengths");
    if (inputs.t_ref.step() != power.step())
        throw StepMismatch("identification inputs and output have different steps");

    const std::size_t total = power.size();
    const std::size_t n = order;
    if (total < 50 * n) throw InsufficientData("need at least 50 * order samples");

    const std::size_t n_id = static_cast<std::size_t>(std::llround(split_fraction *
                                                                   static_cast<double>(total)));
    const std::size_t warmup = 10 * n;
    if (total - n_id < warmup + 2)
        throw InsufficientData("validation split too short for warm-up plus metrics");

    const std::vector<double>& y = power.values();
    const std::array<const std::vector<double>*, 3> u = {&inputs.t_ref.values(),
                                                         &inputs.n_occ.values(),
                                                         &inputs.t_ext.values()};

    // ARX least squares: y(k) = sum_i a_i y(k-i) + sum_j sum_i b_{j,i} u_j(k-i)
    const std::size_t p = 4 * n;
    Matrix gram = Matrix::zeros(p, p);
    std::vector<double> rhs(p, 0.0);
    std::vector<double> phi(p, 0.0);
    for (std::size_t k = n; k < n_id; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            phi[i] = y[k - 1 - i];
            for (std::size_t j = 0; j < 3; ++j) phi[n + j * n + i] = (*u[j])[k - 1 - i];
        }
        for (std::size_t i = 0; i < p; ++i) {
            rhs[i] += phi[i] * y[k];
            for (std::size_t j = i; j < p; ++j) gram(i, j) += phi[i] * phi[j];
        }
    }
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < i; ++j) gram(i, j) = gram(j, i);

    std::vector<double> theta = solve_linear(std::move(gram), std::move(rhs));

    // stability: project poles of z^n - a_1 z^(n-1) - ... - a_n onto radius 0.995
    std::vector<double> char_coeffs(n);
    for (std::size_t i = 0; i < n; ++i) char_coeffs[i] = -theta[i];
    auto roots = polynomial_roots(char_coeffs);
    bool projected = false;
    for (auto& root : roots) {
        const double mag = std::abs(root);
        if (mag >= 1.0) {
            root *= kStabilityRadius / mag;
            projected = true;
        }
    }
    if (projected) {
        const auto stabilized = coeffs_from_roots(roots);
        for (std::size_t i = 0; i < n; ++i) theta[i] = -stabilized[i];
    }

    Matrix a = Matrix::zeros(n, n);
    Matrix b = Matrix::zeros(n, StateSpaceModel::kInputs);
    Matrix c = Matrix::zeros(1, n);
    Matrix d = Matrix::zeros(1, StateSpaceModel::kInputs);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, 0) = theta[i];
        if (i + 1 < n) a(i, i + 1) = 1.0;
        for (std::size_t j = 0; j < 3; ++j) b(i, j) = theta[n + j * n + i];
    }
    c(0, 0) = 1.0;

    StateSpaceModel model(std::move(a), std::move(b), std::move(c), std::move(d), power.step(),
                          mode);

    // free-run validation on the held-out tail, zero initial state
    const std::size_t n_val = total - n_id;
    auto slice = [&](const TimeSeries& s) {
        return TimeSeries(s.time_at(n_id), s.step(),
                          std::vector<double>(s.values().begin() + static_cast<std::ptrdiff_t>(n_id),
                                              s.values().end()),
                          s.unit());
    };
    const ModelInputs val_inputs{slice(inputs.t_ref), slice(inputs.n_occ), slice(inputs.t_ext)};
    const TimeSeries prediction = simulate(model, val_inputs, {});

    std::vector<double> y_true(y.begin() + static_cast<std::ptrdiff_t>(n_id + warmup), y.end());
    std::vector<double> y_pred(prediction.values().begin() + static_cast<std::ptrdiff_t>(warmup),
                               prediction.values().end());

    FitReport report;
    report.order = n;
    report.n_validation = n_val - warmup;
    report.r2 = r_squared(y_true, y_pred);
    report.nmae_percent = nmae(y_true, y_pred);
    return {std::move(model), report};
}

namespace {

Matrix multiply(const Matrix& lhs, const Matrix& rhs) {
    Matrix out = Matrix::zeros(lhs.rows, rhs.cols);
    for (std::size_t i = 0; i < lhs.rows; ++i)
        for (std::size_t k = 0; k < lhs.cols; ++k) {
            const double v = lhs(i, k);
            for (std::size_t j = 0; j < rhs.cols; ++j) out(i, j) += v * rhs(k, j);
        }
    return out;
}

}  // namespace

StateSpaceModel downsample_model(const StateSpaceModel& model, Minutes new_step) {
    const auto old_min = model.step().count();
    const auto new_min = new_step.count();
    if (new_min == old_min) return model;
    if (new_min <= 0 || new_min % old_min != 0)
        throw NonIntegerRatio("model step " + std::to_string(old_min) +
                              " min cannot be converted to " + std::to_string(new_min) + " min");
    const auto factor = new_min / old_min;

    const std::size_t n = model.order();
    Matrix a_pow = Matrix::zeros(n, n);
    for (std::size_t i = 0; i < n; ++i) a_pow(i, i) = 1.0;
    Matrix a_sum = Matrix::zeros(n, n);  // I + A + ... + A^(f-1)
    for (long i = 0; i < factor; ++i) {
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) a_sum(r, c) += a_pow(r, c);
        a_pow = multiply(a_pow, model.a());
    }
    return StateSpaceModel(std::move(a_pow), multiply(a_sum, model.b()), model.c(), model.d(),
                           new_step, model.mode());
}

std::string model_to_json(const StateSpaceModel& model) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["order"] = model.order();
    j["step_minutes"] = model.step().count();
    j["mode"] = mode_name(model.mode());
    j["a"] = model.a().data;
    j["b"] = model.b().data;
    j["c"] = model.c().data;
    j["d"] = model.d().data;
    return j.dump(2);
}

StateSpaceModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
    for (const char* key : {"order", "step_minutes", "mode", "a", "b", "c", "d"})
        if (!j.contains(key)) throw MissingKey(std::string("model file: missing '") + key + "'");

    const auto n = j["order"].get<std::size_t>();
    auto load = [&](const char* key, std::size_t rows, std::size_t cols) {
        auto data = j[key].get<std::vector<double>>();
        if (data.size() != rows * cols)
            throw ParseError(std::string("model file: '") + key + "' has wrong size");
        return Matrix{rows, cols, std::move(data)};
    };
    return StateSpaceModel(load("a", n, n), load("b", n, StateSpaceModel::kInputs),
                           load("c", 1, n), load("d", 1, StateSpaceModel::kInputs),
                           Minutes{j["step_minutes"].get<long>()},
                           mode_from_name(j["mode"].get<std::string>()));
}

}  // namespace ballast
