// Acceptance suite: one pass/fail line per criterion, full scales and
// tolerances pinned in code. Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gtreg/drf.hpp"
#include "gtreg/duality.hpp"
#include "gtreg/gauss.hpp"
#include "gtreg/inference.hpp"
#include "gtreg/model_select.hpp"
#include "gtreg/objective.hpp"
#include "gtreg/rng.hpp"
#include "gtreg/simulate.hpp"
#include "gtreg/solver.hpp"
#include "oracles.hpp"

using namespace gtreg;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// global certificate accounting over every converged unpenalized fit the
// suite performs
struct CertStats {
    int fits = 0;
    double worst_score = 0.0;
    double worst_gap_ratio = 0.0;
    double worst_residual_ratio = 0.0;
    bool ok = true;
} g_cert;

FitResult fit_checked(const DesignMatrices& d, const SolverConfig& cfg = {}) {
    FitResult fit = fit_ml(d, cfg);
    if (fit.converged) {
        DualCertificate cert = recover_dual(fit, d);
        ++g_cert.fits;
        g_cert.worst_score = std::max(g_cert.worst_score, fit.score_norm);
        g_cert.worst_gap_ratio =
            std::max(g_cert.worst_gap_ratio, cert.gap / (1.0 + std::abs(cert.primal_value)));
        g_cert.worst_residual_ratio =
            std::max(g_cert.worst_residual_ratio, cert.constraint_residual / d.n);
        if (fit.score_norm > 1e-8 || cert.gap > 1e-8 * (1.0 + std::abs(cert.primal_value)) ||
            cert.constraint_residual > d.n * 1e-8)
            g_cert.ok = false;
    }
    return fit;
}

DictionarySpec class_spec(int cls) {
    DictionarySpec spec;
    switch (cls) {
        case 1:
            break;
        case 2:
            spec.x_basis = {BasisKind::bspline, 3, 6, {}};
            break;
        case 3:
            spec.y_basis = {BasisKind::bspline, 2, 5, {}};
            break;
        default:
            spec.x_basis = {BasisKind::bspline, 3, 6, {}};
            spec.y_basis = {BasisKind::bspline, 2, 5, {}};
    }
    spec.name = "class" + std::to_string(cls);
    return spec;
}

DataSet lls_data(int n, std::uint64_t seed) {
    DgpSpec dgp;
    dgp.kind = DgpKind::linear_location_scale;
    dgp.n = n;
    dgp.seed = seed;
    return generate(dgp);
}

Vector random_feasible(const DesignMatrices& d, Rng& rng, double scale = 0.3) {
    Vector b(d.jk, 0.0);
    b[1] = 1.0;
    for (int attempt = 0; attempt < 60; ++attempt) {
        Vector trial = b;
        for (int l = 0; l < d.jk; ++l) trial[l] += scale * rng.normal();
        if (in_domain(trial, d)) return trial;
        scale *= 0.7;
    }
    return b;
}

Vector raw_coefficients(const Dictionary& dict, const Vector& b_std) {
    const Matrix m = coefficient_map_std_to_raw(dict);
    Vector raw(b_std.size(), 0.0);
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) raw[c] += m(r, c) * b_std[r];
    return raw;
}

Matrix raw_covariance(const Dictionary& dict, const Matrix& cov_std) {
    const Matrix m = coefficient_map_std_to_raw(dict);
    Matrix mt(m.cols(), m.rows());
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) mt(c, r) = m(r, c);
    return mat_mul(mat_mul(mt, cov_std), m);
}

// ------------------------------------------------------------ criterion 1

Outcome criterion1() {
    // battery over the four dictionary classes and three data laws
    for (int cls = 1; cls <= 4; ++cls) {
        for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
            DgpSpec dgp;
            dgp.kind = (seed % 2 == 0) ? DgpKind::linear_location_scale
                                       : DgpKind::baseline_gaussian;
            dgp.n = 1500;
            dgp.seed = seed * 17 + cls;
            BuildResult built = build_dictionary(class_spec(cls), generate(dgp));
            FitResult fit = fit_checked(built.design);
            if (!fit.converged)
                return {false, "fit did not converge (class " + std::to_string(cls) + ")"};
        }
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%d fits: max score %.2e, max gap ratio %.2e, max residual/n %.2e", g_cert.fits,
                  g_cert.worst_score, g_cert.worst_gap_ratio, g_cert.worst_residual_ratio);
    return {g_cert.ok, buf};
}

// ------------------------------------------------------------ criterion 2

Outcome criterion2() {
    Rng rng(2024);
    int points = 0;
    double worst_score = 0.0, worst_hess = 0.0;
    for (int cls = 1; cls <= 4; ++cls) {
        BuildResult built = build_dictionary(class_spec(cls), lls_data(250, 100 + cls));
        const auto& d = built.design;
        const int per_class = cls <= 2 ? 13 : 12;  // 50 points in total
        for (int k = 0; k < per_class; ++k) {
            const Vector b = random_feasible(d, rng);
            LikelihoodReport rep = evaluate(b, d);
            auto value_fn = [&](const Vector& bb) { return evaluate_value(bb, d); };
            const Vector g = oracle::fd_gradient(value_fn, b);
            for (int l = 0; l < d.jk; ++l)
                worst_score = std::max(worst_score, oracle::rel_err(rep.score[l], g[l]));
            auto score_fn = [&](const Vector& bb) { return evaluate(bb, d).score; };
            const Matrix jac = oracle::fd_jacobian(score_fn, b, 1e-5);
            for (int i = 0; i < d.jk; ++i)
                for (int j = 0; j < d.jk; ++j)
                    worst_hess = std::max(worst_hess,
                                          std::abs(rep.hessian(i, j) - jac(i, j)) /
                                              (1.0 + std::abs(rep.hessian(i, j))));
            ++points;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d points: max score err %.2e, max hessian err %.2e", points,
                  worst_score, worst_hess);
    return {points == 50 && worst_score <= 1e-5 && worst_hess <= 1e-5, buf};
}

// ------------------------------------------------------------ criterion 3

Outcome criterion3() {
    const Vector truth = {0.0, 1.0, 0.0, 0.0};
    int passed = 0;
    double worst_t = 0.0;
    for (int seed = 0; seed < 20; ++seed) {
        DgpSpec dgp;
        dgp.kind = DgpKind::baseline_gaussian;
        dgp.n = 5000;
        dgp.seed = 3000 + seed;
        BuildResult built = build_dictionary(DictionarySpec{}, generate(dgp));
        FitResult fit = fit_checked(built.design);
        if (!fit.converged) continue;
        Sandwich cov = sandwich(fit, built.design);
        const Vector braw = raw_coefficients(built.dict, fit.b_hat);
        const Matrix craw = raw_covariance(built.dict, cov.cov);
        bool ok = true;
        for (int l = 0; l < 4; ++l) {
            const double t = std::abs(braw[l] - truth[l]) / std::sqrt(craw(l, l));
            worst_t = std::max(worst_t, t);
            ok = ok && t <= 5.0;
        }
        if (ok) ++passed;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d/20 seeds within 5 SEs of (0,1,0,0), worst |t| %.2f",
                  passed, worst_t);
    return {passed >= 19, buf};
}

// ------------------------------------------------------------ criterion 4

Outcome criterion4() {
    const int reps = 500, n = 2000;
    const Vector xs = {0.1, 0.3, 0.5, 0.7, 0.9};
    const Vector us = {0.1, 0.25, 0.5, 0.75, 0.9};
    DgpSpec proto;
    proto.kind = DgpKind::linear_location_scale;

    std::vector<int> cdf_cover(25, 0), q_cover(25, 0);
    std::vector<Vector> braw_all;
    std::vector<Vector> se_all;
    int done = 0;
    for (int rep = 0; rep < reps; ++rep) {
        DgpSpec dgp = proto;
        dgp.n = n;
        dgp.seed = 40000 + rep;
        BuildResult built = build_dictionary(DictionarySpec{}, generate(dgp));
        FitResult fit = fit_ml(built.design);
        if (!fit.converged) continue;
        Sandwich cov = sandwich(fit, built.design);
        DrfEvaluator ev(built.dict, fit.b_hat, cov.cov);
        int g = 0;
        for (double x : xs) {
            for (double u : us) {
                const double ytrue = lls_quantile(proto, x, u);
                const auto c = ev.cdf({{x}}, ytrue);
                if (std::abs(c.estimate - u) <= 1.959963984540054 * (*c.se))
                    ++cdf_cover[g];
                const auto q = ev.quantile({{x}}, u);
                if (std::abs(q.estimate - ytrue) <= 1.959963984540054 * (*q.se)) ++q_cover[g];
                ++g;
            }
        }
        braw_all.push_back(raw_coefficients(built.dict, fit.b_hat));
        const Matrix craw = raw_covariance(built.dict, cov.cov);
        Vector se(4);
        for (int l = 0; l < 4; ++l) se[l] = std::sqrt(craw(l, l));
        se_all.push_back(std::move(se));
        ++done;
    }
    if (done < reps) return {false, "replications failed to converge"};

    double cover_lo = 1.0, cover_hi = 0.0;
    for (int g = 0; g < 25; ++g) {
        for (double c : {cdf_cover[g] / double(done), q_cover[g] / double(done)}) {
            cover_lo = std::min(cover_lo, c);
            cover_hi = std::max(cover_hi, c);
        }
    }
    // delta-method SEs against the Monte Carlo standard deviations
    double worst_se_ratio = 0.0;
    for (int l = 0; l < 4; ++l) {
        double mean = 0.0;
        for (const auto& b : braw_all) mean += b[l] / done;
        double var = 0.0;
        for (const auto& b : braw_all) var += (b[l] - mean) * (b[l] - mean) / (done - 1);
        const double mc_sd = std::sqrt(var);
        Vector ses;
        for (const auto& se : se_all) ses.push_back(se[l]);
        std::nth_element(ses.begin(), ses.begin() + done / 2, ses.end());
        const double med_se = ses[done / 2];
        worst_se_ratio = std::max(worst_se_ratio, std::abs(med_se / mc_sd - 1.0));
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "coverage range [%.1f%%, %.1f%%] over 25 points, worst SE/SD deviation %.1f%%",
                  100 * cover_lo, 100 * cover_hi, 100 * worst_se_ratio);
    return {cover_lo >= 0.92 && cover_hi <= 0.98 && worst_se_ratio <= 0.15, buf};
}

// ------------------------------------------------------------ criterion 5

Outcome criterion5() {
    // half the interaction coefficients are zero: g = y - 0.8 x1 + 0.5 x1 y
    // + 0.6 x2, so the x2*y interaction is the true zero. At the pinned
    // lambda = 0.5 n^{1/4}, each true zero survives thresholding with the
    // chi-square tail probability P(chi2_1 > lambda) ~ 4.6%, which caps the
    // attainable joint recovery rate per zero coordinate.
    const int reps = 200, n = 4000;
    const double lambda = 0.5 * std::pow(double(n), 0.25);
    DgpSpec proto;
    proto.kind = DgpKind::custom_b0;
    proto.n = n;
    proto.n_covariates = 2;
    proto.custom_dict.standardize = false;
    proto.b0 = {0.0, 1.0, -0.8, 0.5, 0.6, 0.0};
    const std::vector<int> true_zeros = {5};

    int exact = 0, kkt_ok = 0, converged = 0;
    for (int rep = 0; rep < reps; ++rep) {
        DgpSpec dgp = proto;
        dgp.seed = 50000 + rep;
        BuildResult built = build_dictionary(DictionarySpec{}, generate(dgp));
        FitResult first = fit_ml(built.design);
        if (!first.converged) continue;
        PenalizedFit pf = fit_adaptive_lasso(built.design, SolverConfig{}, first, lambda,
                                             default_unpenalized());
        if (!pf.converged) continue;
        ++converged;
        bool all_zero = true;
        for (int l : true_zeros) all_zero = all_zero && pf.b_al[l] == 0.0;
        if (all_zero) ++exact;
        if (check_lasso_kkt(pf, built.design, 1e-6 * n).pass) ++kkt_ok;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%d/%d replications recover the zero set exactly, kkt box holds in %d/%d",
                  exact, reps, kkt_ok, converged);
    return {converged == reps && exact >= reps * 9 / 10 && kkt_ok == converged, buf};
}

// ------------------------------------------------------------ criterion 6

Outcome criterion6() {
    DictionarySpec spec = class_spec(4);
    BuildResult built = build_dictionary(spec, lls_data(2500, 606));
    FitResult fit = fit_checked(built.design);
    if (!fit.converged) return {false, "spline-spline fit did not converge"};
    DrfEvaluator ev(built.dict, fit.b_hat);
    const auto& st = built.dict.standardization();

    // round trip over random (x, u)
    Rng rng(6);
    double worst_rt = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double x = rng.uniform();
        const double u = 0.01 + 0.98 * rng.uniform();
        const double q = ev.quantile({{x}}, u).estimate;
        worst_rt = std::max(worst_rt, std::abs(ev.cdf({{x}}, q).estimate - u));
    }

    // pdf integrates to one: exact gaussian tail mass + quadrature inside
    double worst_mass = 0.0;
    for (double x : {0.1, 0.5, 0.9}) {
        const double ylo = st.y_to_raw(built.dict.y_knot_lo());
        const double yhi = st.y_to_raw(built.dict.y_knot_hi());
        auto f = [&](double y) { return ev.pdf({{x}}, y).estimate; };
        Vector breaks;
        for (double k : built.dict.resolved_spec().y_basis.knots)
            breaks.push_back(st.y_to_raw(k));
        const double mass = ev.cdf({{x}}, ylo).estimate +
                            oracle::integrate_piecewise(f, breaks, ylo, yhi) +
                            (1.0 - ev.cdf({{x}}, yhi).estimate);
        worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
    }

    // no crossing anywhere on the default 201 x 99 grid of a QGM-passing fit
    DataSet data = lls_data(2500, 606);
    QgmReport qgm = qgm_check(ev, default_qgm_x_grid(data), default_qgm_u_grid());
    bool crossing_free = qgm.passed;
    if (qgm.passed) {
        const Matrix xg = default_qgm_x_grid(data);
        const Vector ug = default_qgm_u_grid();
        for (int i = 0; i < xg.rows() && crossing_free; ++i) {
            double prev = -1e300;
            for (double u : ug) {
                const double q = ev.quantile({{xg(i, 0)}}, u).estimate;
                if (q <= prev) {
                    crossing_free = false;
                    break;
                }
                prev = q;
            }
        }
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "round trip %.1e, pdf mass error %.1e, %s on the 201x99 grid", worst_rt,
                  worst_mass, crossing_free ? "no quantile crossing" : "CROSSING FOUND");
    return {worst_rt <= 1e-8 && worst_mass <= 1e-4 && crossing_free, buf};
}

// ------------------------------------------------------------ criterion 7

DataSet qgm_gap_data(std::uint64_t seed, int n_side) {
    // two covariate clusters with a steep scale increase toward the gap:
    // the fitted spline slope undershoots below zero inside the gap
    Rng rng(seed);
    DataSet d;
    const int n = 2 * n_side;
    d.y.resize(n);
    d.x = Matrix(n, 1);
    d.x_names = {"x"};
    for (int i = 0; i < n; ++i) {
        const double x = (i < n_side) ? 0.30 * rng.uniform() : 0.70 + 0.30 * rng.uniform();
        const double sigma =
            (x < 0.15) ? 0.3 : (x < 0.30 ? 0.3 * std::exp(7.0 * (x - 0.15)) : 2.0);
        d.x(i, 0) = x;
        d.y[i] = sigma * rng.normal();
    }
    return d;
}

Outcome criterion7() {
    DataSet data = qgm_gap_data(1, 250);
    DictionarySpec spec;
    spec.x_basis = {BasisKind::bspline, 3, 6, {}};
    BuildResult built = build_dictionary(spec, data);

    FitResult plain = fit_ml(built.design);
    if (!plain.converged) return {false, "unconstrained fit did not converge"};
    QgmReport before = qgm_check(DrfEvaluator(built.dict, plain.b_hat),
                                 default_qgm_x_grid(data), default_qgm_u_grid());
    if (before.passed) return {false, "construction failed: unpenalized fit already passes QGM"};

    QgmRepairResult rep = fit_with_qgm_repair(built.design, built.dict, data, SolverConfig{});
    if (!rep.fit.converged) return {false, "constrained fit did not converge"};

    // every added constraint satisfied with nonnegative slack
    double min_slack = 1e300;
    for (const auto& cp : rep.fit.constraints_added) {
        Vector t(built.design.jk);
        built.dict.eval_t_std(cp.x, cp.y, t);
        double eta = 0.0;
        for (int l = 0; l < built.design.jk; ++l) eta += rep.fit.b_hat[l] * t[l];
        min_slack = std::min(min_slack, eta - cp.eps);
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "%zu violations before, repaired in %d rounds (%zu constraints), min slack %.2e",
                  before.violations.size(), rep.rounds, rep.fit.constraints_added.size(),
                  min_slack);
    return {rep.report.passed && rep.rounds <= 4 && min_slack >= 0.0, buf};
}

// ------------------------------------------------------------ criterion 8

Outcome criterion8() {
    const std::vector<int> sizes = {500, 2000, 8000};
    auto median_gap = [&](DgpKind kind, int n) {
        Vector gaps;
        for (int seed = 0; seed < 50; ++seed) {
            DgpSpec dgp;
            dgp.kind = kind;
            dgp.n = n;
            dgp.seed = 80000 + seed * 7 + n;
            BuildResult built = build_dictionary(DictionarySpec{}, generate(dgp));
            FitResult fit = fit_ml(built.design);
            if (!fit.converged) continue;
            gaps.push_back(info_matrix_gap(fit.b_hat, built.design));
        }
        std::sort(gaps.begin(), gaps.end());
        return gaps[gaps.size() / 2];
    };
    Vector good(3), bad(3);
    for (int k = 0; k < 3; ++k) {
        good[k] = median_gap(DgpKind::linear_location_scale, sizes[k]);
        bad[k] = median_gap(DgpKind::bimodal_misspec, sizes[k]);
    }
    const bool monotone = good[0] > good[1] && good[1] > good[2];
    const bool small_tail = good[2] <= 0.1;
    const bool misspec_large = bad[0] >= 0.2 && bad[1] >= 0.2 && bad[2] >= 0.2;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "correct spec medians %.3f > %.3f > %.3f (<= 0.1), misspec %.2f/%.2f/%.2f",
                  good[0], good[1], good[2], bad[0], bad[1], bad[2]);
    return {monotone && small_tail && misspec_large, buf};
}

// ------------------------------------------------------------ criterion 9

int run_cli(const std::string& args) {
#ifndef GTREG_CLI_PATH
#define GTREG_CLI_PATH "gtreg"
#endif
    const std::string cmd = std::string(GTREG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
}

Outcome criterion9() {
    namespace fs = std::filesystem;
    std::string real_path;
    if (const char* env = std::getenv("GTREG_MELBOURNE_CSV"); env != nullptr) real_path = env;
    if (real_path.empty() && fs::exists("melbourne.csv")) real_path = "melbourne.csv";
    if (real_path.empty() && fs::exists("data/melbourne.csv")) real_path = "data/melbourne.csv";

    const fs::path tmp = fs::temp_directory_path() / "gtreg-acceptance-c9";
    fs::create_directories(tmp);
    std::string data_path;
    bool real_data = !real_path.empty();
    if (real_data) {
        data_path = real_path;
    } else {
        // synthetic stand-in: the pipeline itself is still exercised end to end
        data_path = (tmp / "melb.csv").string();
        if (run_cli("simulate --kind melbourne --n 3650 --seed 42 --out " + data_path) != 0)
            return {false, "synthetic series generation failed"};
    }

    const std::string out = (tmp / "sel").string();
    const int code = run_cli("select --data " + data_path + " --lag --out " + out +
                             " --qgm-x-points 101 --qgm-u-step 0.02");
    if (code != 0) return {false, "cmd_select exit code " + std::to_string(code)};

    std::ifstream in(out + "/select.json");
    std::string report((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const bool spline_winner = [&] {
        // winner name recorded in the report; index 3 is the spline-spline class
        auto pos = report.find("\"best_candidate_index\"");
        if (pos == std::string::npos) return false;
        return report.find("3", pos) != std::string::npos;
    }();

    std::string detail = real_data ? "user-supplied series: " : "synthetic stand-in series: ";
    detail += "pipeline completed, spline-spline winner = ";
    detail += spline_winner ? "yes" : "no";
    if (real_data)
        detail += " (paper reference: 35 parameters, 25 nonzero; logged, not asserted)";
    if (real_data && !spline_winner) return {false, detail};
    return {true, detail};
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {"criterion 1 (optimality certificates)", criterion1},
        {"criterion 2 (derivative oracles)", criterion2},
        {"criterion 3 (baseline recovery)", criterion3},
        {"criterion 4 (coverage + SE calibration)", criterion4},
        {"criterion 5 (selection consistency + kkt)", criterion5},
        {"criterion 6 (drf structural properties)", criterion6},
        {"criterion 7 (qgm repair)", criterion7},
        {"criterion 8 (information-matrix trend)", criterion8},
        {"criterion 9 (melbourne pipeline, soft)", criterion9},
    };
    int failures = 0;
    for (const auto& e : entries) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out = {false, std::string("exception: ") + ex.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%-42s %s — %s (%.1fs)\n", e.name, out.pass ? "PASS" : "FAIL",
                    out.detail.c_str(), secs);
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    if (failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", failures);
    return failures;
}
