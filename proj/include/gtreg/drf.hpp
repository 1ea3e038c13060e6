#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gtreg/dictionary.hpp"
#include "gtreg/inference.hpp"
#include "gtreg/solver.hpp"

namespace gtreg {

/// Bound (dictionary, coefficients, covariance) object evaluating the
/// fitted conditional CDF, PDF, and quantile function with pointwise
/// delta-method standard errors. Inputs and outputs are raw data units;
/// computation runs in standardized coordinates. Immutable and pure.
class DrfEvaluator {
public:
    DrfEvaluator(Dictionary dict, Vector b, std::optional<Matrix> cov_std = std::nullopt);

    struct Value {
        double estimate = 0.0;
        std::optional<double> se;
    };

    Value cdf(std::span<const double> x_raw, double y_raw) const;
    Value pdf(std::span<const double> x_raw, double y_raw) const;

    /// Solves g(y,x) = Phi^{-1}(u); bracket doubling from the sample median
    /// then safeguarded Newton with bisection fallback, tolerance 1e-10 in
    /// g units. Closed form in the affine tails.
    Value quantile(std::span<const double> x_raw, double u) const;

    /// Fitted transform g(y,x) = b'T(x,y) (standardized inputs).
    double g_std(std::span<const double> x_std, double y_std) const;
    double eta_std(std::span<const double> x_std, double y_std) const;

    const Dictionary& dictionary() const { return dict_; }
    const Vector& coefficients() const { return b_; }
    bool has_cov() const { return cov_.has_value(); }

    /// Standardized quantile solve; throws DataError naming the attainable
    /// range when the level cannot be reached (boundary conditions failing).
    double quantile_std(std::span<const double> x_std, double u) const;

    /// Root of g(y,x) = g_target in standardized y; the safeguarded solver
    /// behind quantile_std, also used to invert simulated GT models.
    double invert_g_std(std::span<const double> x_std, double g_target) const;

private:
    Dictionary dict_;
    Vector b_;
    std::optional<Matrix> cov_;
    double tail_slope_std(std::span<const double> x_std) const;  // beta_2(x)
};

struct QgmViolation {
    Vector x;  // raw units
    double u = 0.0;
    double eta = 0.0;  // b't at (x, Q(x,u)), standardized derivative units
};

struct QgmReport {
    bool passed = false;
    std::vector<QgmViolation> violations;
    std::string grid;
};

/// Evaluates b't(x, Q(x,u)) > 0 over the grid; a failed quantile solve
/// counts as a violation at that grid point.
QgmReport qgm_check(const DrfEvaluator& ev, const Matrix& x_grid, std::span<const double> u_grid);

/// Default grids: 201 x-points spanning the sample covariate range and
/// u in {0.01, ..., 0.99}.
Matrix default_qgm_x_grid(const DataSet& data, int points = 201);
Vector default_qgm_u_grid();

struct BandRow {
    Vector x;  // raw units
    double at = 0.0;  // y value (cdf/pdf) or u level (quantile)
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    std::string kind;
};

/// Pointwise bands estimate +/- z_{1-alpha/2} * se on a grid, raw units.
/// CDF bands are clipped to [0,1] in output only.
std::vector<BandRow> band_grid(const DrfEvaluator& ev, const Matrix& x_values,
                               std::span<const double> grid, const std::string& kind,
                               double level);

struct QgmRepairResult {
    FitResult fit;
    QgmReport report;
    int rounds = 0;  // constraint rounds used (0 = unconstrained fit passed)
};

/// fit_ml, then on QGM failure re-estimates under derivative-positivity
/// constraints on a coarse (y,x) grid whose density doubles each round
/// (5, 9, 17, 33 points per axis), eps = 1e-3, at most `max_rounds` rounds.
QgmRepairResult fit_with_qgm_repair(const DesignMatrices& d, const Dictionary& dict,
                                    const DataSet& data, const SolverConfig& cfg,
                                    int max_rounds = 4, double eps = 1e-3);

}  // namespace gtreg
