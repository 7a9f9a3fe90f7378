#include "helpers.hpp"
#include "wipmf/exact.hpp"
#include "wipmf/experiments.hpp"
#include "wipmf/fixtures.hpp"

using namespace wipmf;
using namespace wipmf::test;

TEST_CASE("random instances") {
    Rng rng = make_rng(11);
    const int d = 4;
    const int n = 25000;
    Matrix sum = Matrix::Zero(d, d);
    for (int k = 0; k < n; ++k) {
        const auto m = random_instance(d, rng);
        for (int i = 0; i < d; ++i) {
            CHECK(std::abs(m.P0.row(i).sum() - 1.0) < 1e-12);
            CHECK(std::abs(m.P1.row(i).sum() - 1.0) < 1e-12);
        }
        CHECK(m.R0.isZero());
        CHECK(m.R1.minCoeff() >= 0.0);
        CHECK(m.R1.maxCoeff() <= 1.0);
        sum += m.P0;
    }
    // Dirichlet(1,...,1): each entry has mean 1/d, variance (d-1)/(d^2 (d+1))
    const double sd = std::sqrt((d - 1.0) / (d * d * (d + 1.0)) / n);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) CHECK(std::abs(sum(i, j) / n - 1.0 / d) < 4.0 * sd);
    Rng a = make_rng(5), b = make_rng(5);
    CHECK(random_instance(3, a).P1 == random_instance(3, b).P1);
}

TEST_CASE("normalized-uniform row sampling") {
    Rng rng = make_rng(12);
    const int n = 20000;
    double sum00 = 0.0;
    for (int k = 0; k < n; ++k) {
        const auto m = random_instance(3, rng, RowSampling::normalized_uniform);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(m.P1.row(i).sum() - 1.0) < 1e-12);
        sum00 += m.P0(0, 0);
    }
    // exchangeable entries, so each has mean 1/d
    CHECK(std::abs(sum00 / n - 1.0 / 3.0) < 0.005);
    CHECK(parse_row_sampling("normalized-uniform") == RowSampling::normalized_uniform);
    CHECK_THROWS_AS(parse_row_sampling("dirichlet"), Error);
    const auto a = scan(3, 400, 3, Exec::serial, RowSampling::normalized_uniform);
    CHECK(a.rows == RowSampling::normalized_uniform);
}

TEST_CASE("rate fits") {
    SUBCASE("exponential data") {
        std::vector<SubgapPoint> pts;
        for (int N = 10; N <= 100; N += 10) pts.push_back({double(N), 2.0 * std::exp(-0.1 * N)});
        const auto f = fit_rate(pts);
        CHECK(f.exponential.coef == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(f.exponential.rate == doctest::Approx(0.1).epsilon(1e-6));
        CHECK(f.exponential.r_squared > 0.999);
        CHECK(f.exponential.rate_reported());
        CHECK(f.dropped == 0);
    }
    SUBCASE("non-positive points are dropped") {
        std::vector<SubgapPoint> pts{{10, 0.5}, {20, -0.1}, {30, 0.2}, {40, 0.1}, {50, 0.0}, {60, 0.03}};
        const auto f = fit_rate(pts);
        CHECK(f.dropped == 2);
        CHECK(f.exponential.n_points == 4);
        CHECK_THROWS_AS(fit_rate({{10, 0.5}, {20, 0.1}, {30, -1.0}, {40, 0.01}}), Error);
    }
    SUBCASE("singular model follows a square-root law") {
        std::vector<SubgapPoint> pts;
        for (int N = 20; N <= 200; N += 20) pts.push_back({double(N), 0.5 - singular_wip_value(N, 0.5)});
        const auto f = fit_rate(pts);
        CHECK(f.power.rate == doctest::Approx(0.5).epsilon(0.02));
        CHECK(f.power.r_squared > 0.999);
        // scaling by N^0.5 is flat; N^0.49 and N^0.51 drift over a wide range of N
        auto drift = [](double e) {
            const double lo = (0.5 - singular_wip_value(1000, 0.5)) * std::pow(1000.0, e);
            const double hi = (0.5 - singular_wip_value(100000, 0.5)) * std::pow(100000.0, e);
            return std::abs(hi / lo - 1.0);
        };
        CHECK(drift(0.5) < 0.005);
        CHECK(drift(0.49) > 0.04);
        CHECK(drift(0.51) > 0.04);
    }
}

TEST_CASE("cycle fixtures are flagged unstable with an eigenvalue below -1") {
    for (int k : {1, 2, 3}) {
        const auto v = classify_instance(fixtures::cycle_example(k));
        CHECK(v.indexable);
        CHECK(v.unstable);
        CHECK(v.witness.eigenvalue.real() < -1.0);
        CHECK(std::abs(v.witness.eigenvalue.imag()) < 1e-9);
    }
    const auto ref = classify_instance(fixtures::reference3());
    CHECK(ref.indexable);
    CHECK_FALSE(ref.unstable);
}

TEST_CASE("scan is deterministic and thread-count independent") {
    const auto a = scan(3, 3000, 7, Exec::serial);
    const auto b = scan(3, 3000, 7, Exec::parallel);
    const auto c = scan(3, 3000, 7, Exec::parallel);
    CHECK(a.n_nonindexable == b.n_nonindexable);
    CHECK(a.n_unstable == b.n_unstable);
    CHECK(a.nonindexable == b.nonindexable);
    CHECK(b.n_unstable == c.n_unstable);
    REQUIRE(a.unstable.size() == b.unstable.size());
    for (std::size_t k = 0; k < a.unstable.size(); ++k) {
        CHECK(a.unstable[k].instance == b.unstable[k].instance);
        CHECK(std::abs(a.unstable[k].eigenvalue) > 1.0);
    }
    CHECK(a.n_nonindexable + a.n_unstable <= a.n_instances);
}

TEST_CASE("alpha sweep stays below the relaxation") {
    SweepOptions opt;
    opt.horizon = 20000;
    opt.burn_in = 500;
    const auto rows = sweep_alpha(fixtures::reference3(), {0.2, 0.3, 0.4, 0.5}, {20, 50}, opt);
    CHECK(rows.size() == 8);
    for (const auto& r : rows) CHECK(r.normalized() <= 1.0 + 3.0 * r.normalized_hw());
    const auto again = sweep_alpha(fixtures::reference3(), {0.2, 0.3, 0.4, 0.5}, {20, 50}, opt, Exec::serial);
    for (std::size_t k = 0; k < rows.size(); ++k) CHECK(rows[k].mean == again[k].mean);
}
