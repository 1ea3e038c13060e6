#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gtreg/bspline.hpp"
#include "gtreg/linalg.hpp"

namespace gtreg {

enum class BasisKind { linear, bspline };

/// Declarative basis description. For b-splines either give explicit knots
/// (standardized units, strictly ascending) or a target dimension `dim`, in
/// which case equispaced knots over the standardized data range are placed
/// at build time.
struct BasisSpec {
    BasisKind kind = BasisKind::linear;
    int degree = 3;              // bspline only
    int dim = 0;                 // requested basis dimension (K or J); 0 = derive from knots
    std::vector<double> knots;   // bspline only; empty = auto equispaced
};

struct DictionarySpec {
    BasisSpec x_basis;  // W(X); dimension K (intercept always prepended)
    BasisSpec y_basis;  // S(Y); linear = (1,y), bspline adds J-2 integrated splines
    bool standardize = true;
    std::string name;
};

/// Affine maps applied to the data before basis evaluation. Identity when
/// standardize = false.
struct Standardization {
    double y_mean = 0.0, y_sd = 1.0;
    Vector x_means, x_sds;
    bool is_identity() const;
    double y_to_std(double y) const { return (y - y_mean) / y_sd; }
    double y_to_raw(double z) const { return y_mean + y_sd * z; }
};

struct DataSet {
    Vector y;
    Matrix x;  // n rows, one column per covariate
    std::vector<std::string> x_names;
    int n() const { return int(y.size()); }
};

/// Per-sample evaluated dictionary rows T(x_i,y_i) and t(x_i,y_i).
struct DesignMatrices {
    Matrix T;  // n x JK
    Matrix t;  // n x JK, y-derivative of T (standardized y units)
    int n = 0;
    int jk = 0;
    Standardization standardization;
};

/// Spec-bound tensor dictionary T(X,Y) = W(X) (x) S(Y), t = W(X) (x) s(Y).
/// Index order is W-major: column l = k*J + j (0-based) carries W_k * S_j.
/// Immutable after construction; evaluation is pure.
class Dictionary {
public:
    Dictionary(const DictionarySpec& spec, const Standardization& std_map, int n_covariates,
               double y_lo_std, double y_hi_std, double x_lo_std, double x_hi_std);

    int K() const { return K_; }
    int J() const { return J_; }
    int size() const { return K_ * J_; }
    int n_covariates() const { return n_cov_; }
    const Standardization& standardization() const { return std_; }
    const DictionarySpec& spec() const { return spec_; }

    // building blocks, standardized coordinates
    void eval_w(std::span<const double> x_std, std::span<double> out) const;  // K values
    void eval_S(double y_std, std::span<double> out) const;                   // J values
    void eval_s(double y_std, std::span<double> out) const;                   // J values

    void eval_T_std(std::span<const double> x_std, double y_std, std::span<double> out) const;
    void eval_t_std(std::span<const double> x_std, double y_std, std::span<double> out) const;

    // raw-unit entry points (standardize, then evaluate)
    Vector eval_T(std::span<const double> x_raw, double y_raw) const;
    Vector eval_t(std::span<const double> x_raw, double y_raw) const;

    Vector x_to_std(std::span<const double> x_raw) const;

    /// Standardized y range outside which the y-basis splines vanish and
    /// b'T(x,y) is exactly affine in y. (-inf, +inf) for a linear y-basis.
    double y_knot_lo() const;
    double y_knot_hi() const;

    /// Resolved spec: explicit knots filled in, dims fixed. Together with
    /// the standardization this reconstructs the dictionary exactly.
    DictionarySpec resolved_spec() const;

private:
    DictionarySpec spec_;
    Standardization std_;
    int K_ = 0, J_ = 0, n_cov_ = 0;
    std::optional<BsplineBasis> w_spline_;  // clamped size K, first dropped
    std::optional<BsplineBasis> s_spline_;  // open size J-2, nonnegative bumps
    Vector s_mass_;                         // total mass of each s-spline
};

struct BuildResult {
    Dictionary dict;
    DesignMatrices design;
};

/// Change of basis M with T_std(x,y) = M T_rawbasis(x,y), where the raw
/// basis replaces the standardized linear coordinates by raw y and x and
/// keeps spline features as composed functions. Raw coefficients are
/// b_raw = M' b_std and cov_raw = M' cov_std M.
Matrix coefficient_map_std_to_raw(const Dictionary& dict);

/// Raw-basis row (see coefficient_map_std_to_raw); satisfies
/// b_raw . T_rawbasis == b_std . T_std at every point.
Vector eval_T_rawbasis(const Dictionary& dict, std::span<const double> x_raw, double y_raw);

/// Evaluates the dictionary over the sample. Standardizes first when
/// spec.standardize, recording the affine maps.
BuildResult build_dictionary(const DictionarySpec& spec, const DataSet& data);

/// Dictionary from a fully resolved spec (explicit knots) and a given
/// standardization: used when loading fit artifacts and by simulation DGPs.
Dictionary resolve_dictionary(const DictionarySpec& spec, const Standardization& std_map,
                              int n_covariates);

/// Design matrices for an already-bound dictionary over raw data.
DesignMatrices evaluate_design(const Dictionary& dict, const DataSet& data);

}  // namespace gtreg
