#pragma once

#include "ballast/timeseries.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ballast {

enum class Mode { heating, cooling };

std::string mode_name(Mode m);
Mode mode_from_name(const std::string& name);

/// Small dense row-major matrix; model orders never exceed 3, so this stays
/// deliberately simple.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    static Matrix zeros(std::size_t r, std::size_t c) { return Matrix{r, c, std::vector<double>(r * c, 0.0)}; }
    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// State vector with capacity for the maximum model order.
using StateVector = std::array<double, 3>;
/// Input vector, fixed layout (T_ref degC, n_occ persons, T_ext degC).
using InputVector = std::array<double, 3>;

/// Discrete-time LTI surrogate of the room's heating/cooling power demand:
///   x(k+1) = A x(k) + B u(k),  P(k) = C x(k) + D u(k)
/// with u = (T_ref, n_occ, T_ext) and P in kW. Stability (spectral radius of
/// A below one) is checked at construction so year-long free runs cannot
/// diverge.
class StateSpaceModel {
public:
    static constexpr std::size_t kInputs = 3;

    StateSpaceModel(Matrix a, Matrix b, Matrix c, Matrix d, Minutes step, Mode mode);

    std::size_t order() const { return a_.rows; }
    const Matrix& a() const { return a_; }
    const Matrix& b() const { return b_; }
    const Matrix& c() const { return c_; }
    const Matrix& d() const { return d_; }
    Minutes step() const { return step_; }
    Mode mode() const { return mode_; }
    double spectral_radius() const { return spectral_radius_; }

    /// Raw output C x + D u, before the non-negativity clip.
    double output(const StateVector& x, const InputVector& u) const;
    /// Advances x in place: x <- A x + B u.
    void advance(StateVector& x, const InputVector& u) const;

private:
    Matrix a_, b_, c_, d_;
    Minutes step_;
    Mode mode_;
    double spectral_radius_;
};

struct ModelInputs {
    TimeSeries t_ref;
    TimeSeries n_occ;
    TimeSeries t_ext;
};

struct FitReport {
    double r2 = 0.0;
    double nmae_percent = 0.0;
    std::size_t n_validation = 0;
    std::size_t order = 0;
};

/// Free-run simulation; output is clipped at zero because P is a demand.
TimeSeries simulate(const StateSpaceModel& model, const ModelInputs& inputs,
                    std::span<const double> x0);

/// Unclipped output path, kept for linearity diagnostics.
std::vector<double> simulate_raw(const StateSpaceModel& model, const ModelInputs& inputs,
                                 std::span<const double> x0);

/// Least-squares ARX identification of the given order, realized as an
/// n-state canonical model. The report is evaluated on the held-out tail via
/// free-run simulation (zero initial state, 10 n warm-up steps excluded).
/// Poles at or outside the unit circle are projected radially to 0.995.
std::pair<StateSpaceModel, FitReport> identify(const ModelInputs& inputs,
                                               const TimeSeries& power, std::size_t order,
                                               double split_fraction, Mode mode = Mode::heating);

/// Coefficient of determination on a validation pair. Throws ConstantTruth
/// when y_true has zero variance.
double r_squared(std::span<const double> y_true, std::span<const double> y_pred);

/// Mean absolute error normalized by max |y_true|, in percent.
double nmae(std::span<const double> y_true, std::span<const double> y_pred);

/// Roots of the monic polynomial z^n + c[0] z^(n-1) + ... + c[n-1].
std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs);

/// Rate conversion to a coarser step that is an integer multiple f of the
/// native one, assuming inputs are held over the coarse step:
/// A' = A^f, B' = (sum of A^i, i < f) B. Throws NonIntegerRatio otherwise.
StateSpaceModel downsample_model(const StateSpaceModel& model, Minutes new_step);

std::string model_to_json(const StateSpaceModel& model);
StateSpaceModel model_from_json(const std::string& text);

}  // namespace ballast
