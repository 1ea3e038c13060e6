#include <doctest.h>

#include <cmath>

#include "gtreg/duality.hpp"
#include "gtreg/errors.hpp"
#include "gtreg/inference.hpp"
#include "gtreg/objective.hpp"
#include "gtreg/rng.hpp"
#include "gtreg/simulate.hpp"
#include "gtreg/solver.hpp"
#include "oracles.hpp"

using namespace gtreg;

namespace {

DataSet lls_data(int n, std::uint64_t seed) {
    DgpSpec dgp;
    dgp.kind = DgpKind::linear_location_scale;
    dgp.n = n;
    dgp.seed = seed;
    return generate(dgp);
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

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("initial point is feasible and near-optimal on the gaussian baseline") {
    DgpSpec dgp;
    dgp.kind = DgpKind::baseline_gaussian;
    dgp.n = 4000;
    dgp.seed = 100;
    BuildResult built = build_dictionary(DictionarySpec{}, generate(dgp));
    const Vector b0 = initial_point(built.design);
    CHECK(in_domain(b0, built.design));

    FitResult fit = fit_ml(built.design);
    REQUIRE(fit.converged);
    for (int l = 0; l < 4; ++l)
        CHECK(std::abs(fit.b_hat[l] - b0[l]) < 0.1);  // canonical point nearly optimal
    CHECK(fit.score_norm <= 1e-8);
}

TEST_CASE("heavily scaled raw data stays feasible through standardization") {
    DataSet data = lls_data(500, 101);
    for (auto& y : data.y) y = 1e6 * y + 3e7;
    BuildResult built = build_dictionary(DictionarySpec{}, data);
    CHECK(in_domain(initial_point(built.design), built.design));
    FitResult fit = fit_ml(built.design);
    CHECK(fit.converged);
}

TEST_CASE("baseline recovery within 5 standard errors of (0,1,0,0)") {
    DgpSpec dgp;
    dgp.kind = DgpKind::baseline_gaussian;
    dgp.n = 5000;
    dgp.seed = 7;
    BuildResult built = build_dictionary(DictionarySpec{}, generate(dgp));
    FitResult fit = fit_ml(built.design);
    REQUIRE(fit.converged);
    Sandwich cov = sandwich(fit, built.design);
    const Vector braw = raw_coefficients(built.dict, fit.b_hat);
    const Matrix craw = raw_covariance(built.dict, cov.cov);
    const Vector truth = {0.0, 1.0, 0.0, 0.0};
    for (int l = 0; l < 4; ++l) {
        const double se = std::sqrt(craw(l, l));
        CHECK(std::abs(braw[l] - truth[l]) / se <= 5.0);
    }
}

TEST_CASE("location-scale recovery of the true coefficient vector") {
    BuildResult built = build_dictionary(DictionarySpec{}, lls_data(5000, 8));
    FitResult fit = fit_ml(built.design);
    REQUIRE(fit.converged);
    Sandwich cov = sandwich(fit, built.design);
    const Vector braw = raw_coefficients(built.dict, fit.b_hat);
    const Matrix craw = raw_covariance(built.dict, cov.cov);
    // g = -1 - x + y + 0.5 x y in the (1, y, x, xy) ordering
    const Vector truth = {-1.0, 1.0, -1.0, 0.5};
    for (int l = 0; l < 4; ++l) {
        const double se = std::sqrt(craw(l, l));
        CHECK(std::abs(braw[l] - truth[l]) / se <= 5.0);
    }
}

TEST_CASE("method-of-moments equations hold at the optimum") {
    BuildResult built = build_dictionary(DictionarySpec{}, lls_data(1000, 9));
    FitResult fit = fit_ml(built.design);
    REQUIRE(fit.converged);
    LikelihoodReport rep = evaluate(fit.b_hat, built.design);
    CHECK(norm_inf(rep.score) <= 1e-8);
    CHECK(in_domain(fit.b_hat, built.design));
}

TEST_CASE("monotone ascent across accepted iterations") {
    DictionarySpec spec;
    spec.x_basis = {BasisKind::bspline, 3, 6, {}};
    spec.y_basis = {BasisKind::bspline, 2, 5, {}};
    BuildResult built = build_dictionary(spec, lls_data(800, 10));
    FitResult fit = fit_ml(built.design);
    REQUIRE(fit.converged);
    for (std::size_t k = 1; k < fit.value_trace.size(); ++k)
        CHECK(fit.value_trace[k] >= fit.value_trace[k - 1] - 1e-12);
}

TEST_CASE("ten random feasible restarts reach the same optimum") {
    DictionarySpec spec;
    spec.y_basis = {BasisKind::bspline, 2, 5, {}};
    BuildResult built = build_dictionary(spec, lls_data(600, 11));
    FitResult base = fit_ml(built.design);
    REQUIRE(base.converged);
    Rng rng(77);
    int done = 0;
    for (int rep = 0; rep < 50 && done < 10; ++rep) {
        Vector start = initial_point(built.design);
        for (auto& v : start) v += 0.4 * rng.normal();
        if (!in_domain(start, built.design)) continue;
        ++done;
        FitResult fit = fit_ml_from(built.design, SolverConfig{}, start);
        REQUIRE(fit.converged);
        for (int l = 0; l < built.design.jk; ++l)
            CHECK(std::abs(fit.b_hat[l] - base.b_hat[l]) <= 1e-6);
    }
    CHECK(done == 10);
}

TEST_CASE("constrained fit: empty list is bitwise fit_ml") {
    BuildResult built = build_dictionary(DictionarySpec{}, lls_data(300, 12));
    FitResult a = fit_ml(built.design);
    FitResult b = fit_ml_constrained(built.design, SolverConfig{}, {}, built.dict);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    for (int l = 0; l < built.design.jk; ++l) CHECK(a.b_hat[l] == b.b_hat[l]);
}

TEST_CASE("constrained fit: inactive constraint leaves the optimum unchanged") {
    BuildResult built = build_dictionary(DictionarySpec{}, lls_data(400, 13));
    FitResult base = fit_ml(built.design);
    REQUIRE(base.converged);
    // eta at the sample midpoint is comfortably above a small eps
    ConstraintPoint cp;
    cp.x = {0.0};
    cp.y = 0.0;
    cp.eps = 1e-3;
    FitResult fit = fit_ml_constrained(built.design, SolverConfig{}, {cp}, built.dict);
    REQUIRE(fit.converged);
    for (int l = 0; l < built.design.jk; ++l)
        CHECK(std::abs(fit.b_hat[l] - base.b_hat[l]) <= 1e-6);
}

TEST_CASE("constrained fit: active constraint lands on the boundary, matches grid search") {
    // two-parameter problem built by hand: T rows (1, y), t rows (0, 1);
    // y has sd 10 so the unconstrained slope 1/sd is far below eps
    Rng rng(5);
    const int n = 400;
    DesignMatrices d;
    d.n = n;
    d.jk = 2;
    d.T = Matrix(n, 2);
    d.t = Matrix(n, 2);
    for (int i = 0; i < n; ++i) {
        const double y = 10.0 * rng.normal();
        d.T(i, 0) = 1.0;
        d.T(i, 1) = y;
        d.t(i, 0) = 0.0;
        d.t(i, 1) = 1.0;
    }
    const double eps = 0.5;  // unconstrained b2 ~ 0.1
    Matrix t_rows(1, 2);
    t_rows(0, 0) = 0.0;
    t_rows(0, 1) = 1.0;
    FitResult fit = fit_ml_constrained_rows(d, SolverConfig{}, t_rows, {eps});
    REQUIRE(fit.converged);
    CHECK(fit.b_hat[1] == doctest::Approx(eps).epsilon(1e-6));

    // dense 2-d grid search oracle over b2 >= eps
    double best = -1e300, best1 = 0, best2 = 0;
    for (int i = -200; i <= 200; ++i) {
        const double b1 = i * 0.005;
        for (int k = 0; k <= 300; ++k) {
            const double b2 = eps + k * 0.005;
            const double q = evaluate_value({{b1, b2}}, d);
            if (q > best) {
                best = q;
                best1 = b1;
                best2 = b2;
            }
        }
    }
    CHECK(std::abs(fit.b_hat[0] - best1) <= 0.01);
    CHECK(std::abs(fit.b_hat[1] - best2) <= 0.01);
    CHECK(fit.value >= best - 1e-9);
}

TEST_CASE("adaptive lasso: vanishing penalty reproduces the ML fit") {
    BuildResult built = build_dictionary(DictionarySpec{}, lls_data(500, 14));
    FitResult first = fit_ml(built.design);
    REQUIRE(first.converged);
    PenalizedFit pf = fit_adaptive_lasso(built.design, SolverConfig{}, first, 1e-12,
                                         default_unpenalized());
    CHECK(pf.converged);
    for (int l = 0; l < built.design.jk; ++l)
        CHECK(std::abs(pf.b_al[l] - first.b_hat[l]) <= 1e-6);
}

TEST_CASE("adaptive lasso: weights follow the first step, unpenalized set forced to zero") {
    BuildResult built = build_dictionary(DictionarySpec{}, lls_data(500, 15));
    FitResult first = fit_ml(built.design);
    const auto unpen = default_unpenalized();
    const Vector w = adaptive_weights(first, unpen);
    CHECK(w[0] == 0.0);
    CHECK(w[1] == 0.0);
    for (int l = 2; l < built.design.jk; ++l)
        CHECK(w[l] == doctest::Approx(1.0 / std::abs(first.b_hat[l])));
    CHECK_THROWS_AS(
        fit_adaptive_lasso(built.design, SolverConfig{}, first, -1.0, unpen), SpecError);
    FitResult bad = first;
    bad.converged = false;
    CHECK_THROWS_AS(fit_adaptive_lasso(built.design, SolverConfig{}, bad, 1.0, unpen), SpecError);
}

TEST_CASE("dimension mismatches are rejected") {
    BuildResult built = build_dictionary(DictionarySpec{}, lls_data(100, 18));
    Vector short_b(built.design.jk - 1, 0.1);
    CHECK_THROWS_AS(in_domain(short_b, built.design), DimensionError);
    CHECK_THROWS_AS(evaluate(short_b, built.design), DimensionError);
    CHECK_THROWS_AS(built.dict.eval_T({{0.5, 0.5}}, 0.0), DimensionError);
}

TEST_CASE("adaptive lasso: exact zeros on a sparse design, kkt certificate holds") {
    // x3, x4 carry no signal
    DgpSpec dgp;
    dgp.kind = DgpKind::custom_b0;
    dgp.n = 3000;
    dgp.seed = 16;
    dgp.n_covariates = 4;
    dgp.custom_dict.standardize = false;
    dgp.b0 = {0.0, 1.0, -0.8, 0.5, 0.6, -0.4, 0.0, 0.0, 0.0, 0.0};
    DataSet data = generate(dgp);
    BuildResult built = build_dictionary(DictionarySpec{}, data);
    FitResult first = fit_ml(built.design);
    REQUIRE(first.converged);
    const double lambda = 0.5 * std::pow(double(dgp.n), 0.25);
    PenalizedFit pf =
        fit_adaptive_lasso(built.design, SolverConfig{}, first, lambda, default_unpenalized());
    REQUIRE(pf.converged);
    CHECK(pf.kkt_residual <= 1e-8 * dgp.n);

    LassoKktReport kkt = check_lasso_kkt(pf, built.design, 1e-6 * dgp.n);
    CHECK(kkt.pass);
    // nonzero truth stays active
    const Vector truth = dgp.b0;
    // standardized indices correspond one-to-one (same ordering)
    int zeros_recovered = 0;
    for (int l = 2; l < built.design.jk; ++l)
        if (truth[l] == 0.0 && pf.b_al[l] == 0.0) ++zeros_recovered;
    CHECK(zeros_recovered >= 2);  // most of the four true zeros drop at this lambda
    CHECK(pf.bic ==
          doctest::Approx(-2.0 * dgp.n * pf.value + pf.active_set.size() * std::log(dgp.n)));
}

TEST_CASE("lasso active set never contains exact zeros") {
    BuildResult built = build_dictionary(DictionarySpec{}, lls_data(400, 17));
    FitResult first = fit_ml(built.design);
    PenalizedFit pf = fit_adaptive_lasso(built.design, SolverConfig{}, first,
                                         5.0 * std::sqrt(400.0), default_unpenalized());
    for (int l : pf.active_set) CHECK(pf.b_al[l] != 0.0);
    for (int l = 0; l < built.design.jk; ++l) {
        const bool active =
            std::find(pf.active_set.begin(), pf.active_set.end(), l) != pf.active_set.end();
        CHECK(active == (pf.b_al[l] != 0.0));
    }
}

}  // TEST_SUITE
