#pragma once

#include <vector>

#include "gtreg/dictionary.hpp"
#include "gtreg/solver.hpp"

namespace gtreg {

enum class CovScope { full, active_block };

/// Sandwich covariance pieces at a fitted coefficient vector:
/// gamma_hat = mean gamma_i, psi_hat = mean psi_i psi_i', and
/// cov = gamma_hat^- psi_hat gamma_hat^- / n. For penalized fits the
/// blocks are restricted to the active set (active coordinates permuted
/// first), the zero coordinates carrying no variance.
struct Sandwich {
    Matrix gamma_hat;
    Matrix psi_hat;
    Matrix cov;
    CovScope which = CovScope::full;
    std::vector<int> active;  // block coordinates in full-dictionary indices
    bool pseudo_inverse_used = false;
    Vector std_errors;

    /// Covariance expanded to full dictionary size (zeros off the block).
    Matrix full_cov(int jk) const;
};

Sandwich sandwich(const Vector& b, const DesignMatrices& d);
Sandwich sandwich(const FitResult& fit, const DesignMatrices& d);
Sandwich sandwich(const PenalizedFit& pfit, const DesignMatrices& d);

/// Stein score moments mean_i{ -Ttilde_i e_i + ttilde_i } for a probe
/// dictionary evaluated over (x_i, e_i), with studentized components from
/// the iid sample variance of the summands. The studentization is a
/// pragmatic report device, not a formal test statistic.
struct SteinReport {
    Vector moments;
    Vector studentized;
};

SteinReport stein_moments(const Matrix& t_probe, const Matrix& tder_probe, const Vector& e_hat);

/// Builds the probe dictionary over (x_i, e_hat_i) without standardization,
/// so that the derivative stays exactly d/de, then reports the moments.
SteinReport stein_diagnostics(const FitResult& fit, const DesignMatrices& d, const DataSet& data,
                              const DictionarySpec& probe_spec);

/// ||gamma_hat + psi_hat||_F / ||psi_hat||_F: 0 in the limit under correct
/// specification (information-matrix equality), bounded away from it
/// otherwise. Reported as a raw diagnostic, no p-value.
double info_matrix_gap(const Vector& b, const DesignMatrices& d);

}  // namespace gtreg
