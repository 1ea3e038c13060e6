#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gtreg/errors.hpp"
#include "gtreg/gauss.hpp"
#include "gtreg/rng.hpp"
#include "gtreg/simulate.hpp"
#include "oracles.hpp"

using namespace gtreg;

namespace {

// Kolmogorov-Smirnov statistic against U(0,1)
double ks_uniform(Vector u) {
    std::sort(u.begin(), u.end());
    const int n = int(u.size());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        d = std::max(d, std::abs(u[i] - double(i) / n));
        d = std::max(d, std::abs(u[i] - double(i + 1) / n));
    }
    return d;
}

}  // namespace

TEST_SUITE("simulate") {

TEST_CASE("identical spec and seed give identical samples") {
    DgpSpec spec;
    spec.kind = DgpKind::linear_location_scale;
    spec.n = 500;
    spec.seed = 77;
    DataSet a = generate(spec);
    DataSet b = generate(spec);
    for (int i = 0; i < spec.n; ++i) {
        CHECK(a.y[i] == b.y[i]);
        CHECK(a.x(i, 0) == b.x(i, 0));
    }
    DgpSpec other = spec;
    other.seed = 78;
    DataSet c = generate(other);
    CHECK(a.y[0] != c.y[0]);
}

TEST_CASE("baseline gaussian: outcome uncorrelated with the covariate") {
    DgpSpec spec;
    spec.kind = DgpKind::baseline_gaussian;
    spec.n = 20000;
    spec.seed = 79;
    DataSet d = generate(spec);
    double my = 0, mx = 0;
    for (int i = 0; i < spec.n; ++i) {
        my += d.y[i];
        mx += d.x(i, 0);
    }
    my /= spec.n;
    mx /= spec.n;
    double sxy = 0, sy = 0, sx = 0;
    for (int i = 0; i < spec.n; ++i) {
        sxy += (d.y[i] - my) * (d.x(i, 0) - mx);
        sy += (d.y[i] - my) * (d.y[i] - my);
        sx += (d.x(i, 0) - mx) * (d.x(i, 0) - mx);
    }
    const double corr = sxy / std::sqrt(sx * sy);
    CHECK(std::abs(corr) <= 3.0 / std::sqrt(double(spec.n)));
    CHECK(std::abs(my) <= 3.0 / std::sqrt(double(spec.n)));
}

TEST_CASE("location-scale draws follow the analytic transform") {
    DgpSpec spec;
    spec.kind = DgpKind::linear_location_scale;
    spec.n = 1000000;
    spec.seed = 80;
    DataSet d = generate(spec);
    // g(y,x) = beta1 + beta2 y must be standard normal and independent of x
    double m = 0, m2 = 0, mx = 0, cross = 0;
    for (int i = 0; i < spec.n; ++i) {
        const double g = true_g(spec, {{d.x(i, 0)}}, d.y[i]);
        m += g;
        m2 += g * g;
        mx += d.x(i, 0);
        cross += g * d.x(i, 0);
    }
    m /= spec.n;
    m2 /= spec.n;
    mx /= spec.n;
    cross = cross / spec.n - m * mx;
    CHECK(std::abs(m) < 0.004);
    CHECK(std::abs(m2 - 1.0) < 0.006);
    CHECK(std::abs(cross) < 0.002);
}

TEST_CASE("probability integral transform is uniform for custom-b0 draws") {
    DictionarySpec dict;
    dict.standardize = false;
    dict.y_basis = {BasisKind::bspline, 2, 5, {-1.5, -0.75, 0.0, 0.75, 1.5, 2.25}};
    // nonnegative spline loadings keep the derivative positive
    DgpSpec spec;
    spec.kind = DgpKind::custom_b0;
    spec.n = 2000;
    spec.custom_dict = dict;
    spec.b0 = {0.1, 1.0, 0.6, 0.9, 0.0, -0.3, 0.25, 0.0, 0.2, 0.15};
    int pass = 0;
    const int reps = 20;
    for (int rep = 0; rep < reps; ++rep) {
        spec.seed = 900 + rep;
        DataSet d = generate(spec);
        Vector u(spec.n);
        for (int i = 0; i < spec.n; ++i)
            u[i] = normal_cdf(true_g(spec, {{d.x(i, 0)}}, d.y[i]));
        const double ks = ks_uniform(u);
        // 1% critical value of the KS statistic
        if (ks < 1.6276 / std::sqrt(double(spec.n))) ++pass;
    }
    CHECK(pass >= 19);
}

TEST_CASE("infeasible b0 is rejected") {
    DgpSpec spec;
    spec.kind = DgpKind::custom_b0;
    spec.n = 100;
    spec.custom_dict.standardize = false;
    spec.b0 = {0.0, 1.0, 0.0, -2.0};  // beta2(x) = 1 - 2x < 0 for x > 0.5
    CHECK_THROWS_AS(generate(spec), SpecError);
}

TEST_CASE("melbourne-like series: determinism, lag pairs, and bimodal hot-day law") {
    Vector a = melbourne_like(3650, 11);
    Vector b = melbourne_like(3650, 11);
    CHECK(a == b);
    DataSet pairs = lag_pairs(a);
    CHECK(pairs.n() == 3649);
    for (int i = 0; i < pairs.n(); ++i) {
        CHECK(pairs.y[i] == a[i + 1]);
        CHECK(pairs.x(i, 0) == a[i]);
    }
    // series stays in a plausible temperature range
    double lo = 1e300, hi = -1e300;
    for (double v : a) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo > -10.0);
    CHECK(hi < 60.0);
    CHECK(hi > 30.0);  // hot days occur

    // conditional density after a hot day has two modes: count next-day
    // outcomes after hot days and look for a gap between the clusters
    Vector next_after_hot;
    for (int i = 0; i < pairs.n(); ++i)
        if (pairs.x(i, 0) > 33.0) next_after_hot.push_back(pairs.y[i]);
    REQUIRE(next_after_hot.size() > 50);
    int low_cluster = 0, mid = 0, high_cluster = 0;
    for (double v : next_after_hot) {
        if (v < 24.0)
            ++low_cluster;
        else if (v < 28.0)
            ++mid;
        else
            ++high_cluster;
    }
    CHECK(low_cluster > mid);
    CHECK(high_cluster > mid);
}

TEST_CASE("series too short for lag pairs is rejected") {
    CHECK_THROWS_AS(lag_pairs(Vector{1.0}), DataError);
    CHECK_THROWS_AS(melbourne_like(1, 3), SpecError);
}

}  // TEST_SUITE
