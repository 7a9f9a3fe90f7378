#include "helpers.hpp"
#include "wipmf/fixtures.hpp"
#include "wipmf/model_io.hpp"

using namespace wipmf;
using namespace wipmf::test;

TEST_CASE("validate accepts a well-formed model") {
    const auto rep = validate(fixtures::singular2());
    CHECK(rep.ok());
    CHECK(rep.warnings.empty());
}

TEST_CASE("validate reports a broken row sum") {
    BanditModel m = fixtures::singular2();
    m.P0(0, 1) = 0.6;
    const auto rep = validate(m);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0] == "row 0 of P0 sums to 1.1");
}

TEST_CASE("validate warns on identity dynamics") {
    BanditModel m = fixtures::singular2();
    m.P0 = m.P1 = Matrix::Identity(2, 2);
    const auto rep = validate(m);
    CHECK(rep.ok());
    REQUIRE(rep.warnings.size() == 1);
    CHECK(rep.warnings[0].find("possibly multichain") != std::string::npos);
}

TEST_CASE("fixtures are valid models") {
    CHECK(validate(fixtures::reference3()).ok());
    for (int k = 1; k <= 3; ++k) CHECK(validate(fixtures::cycle_example(k)).ok());
}

TEST_CASE("uniformize worked example") {
    AsyncBanditModel q;
    q.Q0 = mat({{-1, 1}, {2, -2}});
    q.Q1 = q.Q0;
    q.R0 = vec({0, 0});
    q.R1 = vec({1, 0});
    const auto u = uniformize(q);
    CHECK(u.tau == doctest::Approx(2.0));
    CHECK(sup(u.model.P0.row(0).transpose(), vec({0.5, 0.5})) < 1e-15);
    CHECK(sup(u.model.P0.row(1).transpose(), vec({1.0, 0.0})) < 1e-15);
    CHECK(sup(u.model.R1, vec({2, 0})) < 1e-15);
    CHECK(validate(u.model).ok());
}

TEST_CASE("uniformize with zero passive rates gives identity") {
    AsyncBanditModel q;
    q.Q0 = Matrix::Zero(2, 2);
    q.Q1 = mat({{-3, 3}, {1, -1}});
    q.R0 = vec({0, 0});
    q.R1 = vec({1, 0});
    const auto u = uniformize(q);
    CHECK(u.tau == doctest::Approx(3.0));
    CHECK(u.model.P0 == Matrix::Identity(2, 2));
}

TEST_CASE("uniformize rejects all-zero rates") {
    AsyncBanditModel q;
    q.Q0 = q.Q1 = Matrix::Zero(2, 2);
    q.R0 = q.R1 = vec({0, 0});
    CHECK_THROWS_AS(uniformize(q), Error);
}

TEST_CASE("uniformize inverts tau*(P - I) at the max diagonal rate") {
    const BanditModel m = fixtures::reference3();
    double tau = 0.0;
    for (int i = 0; i < 3; ++i) tau = std::max({tau, 1.0 - m.P0(i, i), 1.0 - m.P1(i, i)});
    // Rescale so the max diagonal rate equals tau and the round trip is exact.
    const auto q = to_rates(m, 1.0);
    const auto u = uniformize(q);
    CHECK(u.tau == doctest::Approx(tau).epsilon(1e-14));
    const auto back = uniformize(to_rates(u.model, u.tau));
    CHECK((back.model.P0 - u.model.P0).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((back.model.P1 - u.model.P1).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("zone_of examples") {
    CHECK(zone_of(vec({0.3, 0.3, 0.4}), 0.4) == 1);
    CHECK(zone_of(vec({0.5, 0.5}), 0.5) == 1);
    CHECK(zone_of(vec({1, 0, 0}), 0.5) == 0);
}

TEST_CASE("zone_of sandwich on random points") {
    Rng rng = make_rng(11);
    for (int k = 0; k < 10000; ++k) {
        const int d = 2 + k % 5;
        const Vector m = random_simplex_point(d, rng);
        const double alpha = std::uniform_real_distribution<double>(0.01, 0.99)(rng);
        const int s = zone_of(m, alpha);
        const double below = m.head(s).sum();
        CHECK(below <= alpha);
        CHECK(alpha < below + m(s));
        // weakly increasing in alpha
        CHECK(zone_of(m, std::min(0.999, alpha + 0.05)) >= s);
    }
}

TEST_CASE("model JSON round trip") {
    const BanditModel m = fixtures::reference3();
    const auto j = to_json(m, 0.4);
    const ModelFile f = parse_model(j);
    REQUIRE(!f.is_async());
    CHECK(f.alpha.value() == 0.4);
    const auto& b = std::get<BanditModel>(f.model);
    CHECK(b.P0 == m.P0);
    CHECK(b.R1 == m.R1);
    const auto q = parse_model(to_json(to_rates(m)));
    CHECK(q.is_async());
}

TEST_CASE("model JSON rejects malformed input") {
    CHECK_THROWS_AS(parse_model(nlohmann::json{{"d", 2}}), Error);
    CHECK_THROWS_AS(parse_model(nlohmann::json{{"d", 2}, {"kind", "other"}}), Error);
}

TEST_CASE("permute_states relabels consistently") {
    const BanditModel m = fixtures::reference3();
    const std::vector<int> order{2, 0, 1};
    const BanditModel p = permute_states(m, order);
    CHECK(p.P1(0, 1) == m.P1(2, 0));
    CHECK(p.R1(0) == m.R1(2));
    CHECK_THROWS_AS(permute_states(m, std::vector<int>{0, 0, 1}), Error);
}
