#include "gtreg/model_select.hpp"

#include <cmath>

#include "gtreg/drf.hpp"
#include "gtreg/errors.hpp"

namespace gtreg {

Vector default_lambda_grid() {
    const double lo = std::log(0.001), hi = std::log(0.5);
    Vector grid(5);
    for (int i = 0; i < 5; ++i) grid[i] = std::exp(lo + (hi - lo) * i / 4.0);
    return grid;
}

SelectionReport select_model(const std::vector<Candidate>& candidates, const DataSet& data,
                             const SelectOptions& opts) {
    if (candidates.empty()) throw SpecError("select_model needs at least one candidate");
    SelectionReport report;
    const Matrix x_grid = default_qgm_x_grid(data, opts.qgm_x_points);
    const Vector u_grid = opts.qgm_u_grid.empty() ? default_qgm_u_grid() : opts.qgm_u_grid;
    const auto unpen = default_unpenalized();

    double best_bic = 0.0;
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        const Candidate& cand = candidates[ci];
        CandidateResult res;
        res.name = cand.spec.name.empty() ? ("candidate-" + std::to_string(ci + 1))
                                          : cand.spec.name;
        try {
            BuildResult built = build_dictionary(cand.spec, data);
            res.first_step = fit_ml(built.design, opts.solver);
            if (!res.first_step.converged)
                throw DataError("first-step fit did not converge");
            res.fitted = true;

            const Vector grid = cand.lambda_grid.empty() ? default_lambda_grid() : cand.lambda_grid;
            double cand_best = 0.0;
            for (double lam : grid) {
                LambdaFit lf;
                lf.lambda = lam;
                lf.lambda_sum = lam * data.n();
                lf.fit = fit_adaptive_lasso(built.design, opts.solver, res.first_step,
                                            lf.lambda_sum, unpen);
                if (lf.fit.converged) {
                    DrfEvaluator ev(built.dict, lf.fit.b_al);
                    lf.qgm_pass = qgm_check(ev, x_grid, u_grid).passed;
                }
                lf.fit.qgm_ok = lf.qgm_pass;
                lf.excluded = !lf.fit.converged || !lf.qgm_pass;
                if (!lf.excluded && (res.best < 0 || lf.fit.bic < cand_best)) {
                    res.best = int(res.path.size());
                    cand_best = lf.fit.bic;
                }
                res.path.push_back(std::move(lf));
            }
            if (res.best >= 0) {
                const double bic = res.path[res.best].fit.bic;
                if (report.best_candidate < 0 || bic < best_bic) {
                    report.best_candidate = int(ci);
                    report.best_lambda = res.best;
                    best_bic = bic;
                }
            } else {
                res.error = "all lambda values excluded (QGM or convergence failure)";
            }
        } catch (const std::exception& ex) {
            res.error = ex.what();
        }
        report.candidates.push_back(std::move(res));
    }
    return report;
}

}  // namespace gtreg
