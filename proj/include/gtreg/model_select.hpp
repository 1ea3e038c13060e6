#pragma once

#include <string>
#include <vector>

#include "gtreg/dictionary.hpp"
#include "gtreg/solver.hpp"

namespace gtreg {

/// One model specification plus its penalization grid. Grid values are
/// per-observation (they are multiplied by n before entering the sum-scale
/// penalized objective).
struct Candidate {
    DictionarySpec spec;
    Vector lambda_grid;  // per-observation scale; empty = default grid
};

/// Default grid: 5 values log-spaced in [0.001, 0.5], per-observation scale.
Vector default_lambda_grid();

struct LambdaFit {
    double lambda = 0.0;      // per-observation value from the grid
    double lambda_sum = 0.0;  // n * lambda, as passed to the solver
    PenalizedFit fit;
    bool qgm_pass = false;
    bool excluded = false;  // failed QGM or did not converge
};

struct CandidateResult {
    std::string name;
    bool fitted = false;
    std::string error;
    FitResult first_step;
    std::vector<LambdaFit> path;
    int best = -1;  // index into path; -1 when every lambda is excluded
};

struct SelectionReport {
    std::vector<CandidateResult> candidates;
    int best_candidate = -1;
    int best_lambda = -1;
};

struct SelectOptions {
    SolverConfig solver;
    int qgm_x_points = 201;
    Vector qgm_u_grid;  // empty = default {0.01,...,0.99}
};

/// The three-step pipeline per candidate: first-step ML fit, penalized fits
/// over the grid, QGM screen per lambda, BIC among survivors. Candidates
/// whose every lambda fails the screen are dropped from the ranking. Ties
/// break toward the lower candidate index, then the lower lambda index.
SelectionReport select_model(const std::vector<Candidate>& candidates, const DataSet& data,
                             const SelectOptions& opts = {});

}  // namespace gtreg
