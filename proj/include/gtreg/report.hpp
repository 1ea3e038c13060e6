#pragma once

#include <optional>
#include <string>

#include "gtreg/dictionary.hpp"
#include "gtreg/duality.hpp"
#include "gtreg/inference.hpp"
#include "gtreg/model_select.hpp"
#include "gtreg/solver.hpp"

namespace gtreg {

inline constexpr const char* kFitSchema = "gtreg-fit/1";
inline constexpr const char* kSelectSchema = "gtreg-select/1";

/// Self-contained fit artifact: resolved dictionary + standardization +
/// coefficients (+ covariance), enough to rebuild a DrfEvaluator without
/// the data, plus the certificate and diagnostic summary.
struct FitArtifact {
    std::string schema = kFitSchema;
    std::string kind = "ml";  // "ml" or "adaptive_lasso"
    DictionarySpec spec;      // resolved (explicit knots)
    Standardization standardization;
    int n_covariates = 1;
    int n = 0;
    Vector b_std;
    Vector b_raw;
    std::optional<Matrix> cov_std;  // full dictionary size
    Vector x_lo, x_hi;              // observed covariate hull (raw units)

    double value = 0.0;
    double score_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool qgm_ok = true;
    int qgm_repair_rounds = 0;
    int constraints_added = 0;

    double primal_value = 0.0;
    double dual_value = 0.0;
    double dual_gap = 0.0;
    double dual_constraint_residual = 0.0;
    double info_matrix_gap = 0.0;

    // adaptive-Lasso extras
    double lambda = 0.0;  // sum scale
    Vector weights;
    std::vector<int> active_set;
    double bic = 0.0;
    double kkt_residual = 0.0;
};

void save_fit_artifact(const std::string& path, const FitArtifact& art);
FitArtifact load_fit_artifact(const std::string& path);

/// Rebuilds the bound dictionary of a stored artifact.
Dictionary artifact_dictionary(const FitArtifact& art);

std::string selection_report_json(const SelectionReport& report, const std::string& data_path);

}  // namespace gtreg
