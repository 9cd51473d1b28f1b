#include "gasrec/oracle.hpp"
#include "gasrec/recursion.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace gasrec;
using namespace gasrec::test;

namespace {

RecursionParams fast(int order = 12) {
    RecursionParams p;
    p.scheme.order_per_dimension = order;
    return p;
}

}  // namespace

TEST_CASE("apply_F on simple inputs") {
    const auto rod = Potential::hard_core(1, 0.5);
    const Region wide = Region::interval(-2.0, 3.0);
    const PointFunction zero = [](const Point&) { return cplx(0.0); };
    CHECK(apply_F(cplx(1.3, 0.2), zero, rod, Point{0.5}, wide, {16}) == cplx(1.3, 0.2));
    const cplx c(0.4, -0.1);
    const PointFunction constant = [&](const Point&) { return c; };
    const cplx out = apply_F(cplx(2.0), constant, rod, Point{0.5}, wide, {16});
    CHECK(std::abs(out - 2.0 * std::exp(-c * 1.0)) < 1e-14);
    CHECK(apply_F(cplx(0.0), constant, rod, Point{0.5}, wide, {16}) == cplx(0.0));
}

TEST_CASE("density base cases") {
    CHECK(density(hard_rods(0.0), Point{0.5}, 4, fast()).value == cplx(0.0));
    CHECK(density(hard_rods(2.0), Point{0.5}, 0, fast()).value == cplx(2.0));
    const auto est = density(hard_rods(2.0), Point{0.5}, 0, fast());
    CHECK(est.last_step_delta == 0.0);
    CHECK(est.tree_nodes == 1);
    CHECK(density(hard_rods(1.0), Point{3.0}, 3, fast()).value == cplx(0.0));
}

TEST_CASE("hard-rod density converges to the oracle ratio") {
    RecursionParams params;
    const auto seq = density_sequence(hard_rods(1.0), Point{0.5}, 5, params);
    REQUIRE(seq.size() == 6);
    CHECK(std::abs(seq.back().value - 8.0 / 17.0) < 1e-3);
    CHECK(std::abs(seq.back().value.imag()) < 1e-12);
    for (std::size_t k = 3; k < seq.size(); ++k) CHECK(seq[k].last_step_delta < seq[k - 1].last_step_delta);
    CHECK(seq[1].value.real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("ideal gas density equals the activity at every depth") {
    for (int depth = 0; depth <= 3; ++depth) {
        CHECK(std::abs(density(ideal_gas(1.0), Point{0.3}, depth, fast()).value - 1.0) < 1e-15);
    }
}

TEST_CASE("log partition function") {
    CHECK(log_partition_via_identity(hard_rods(0.0), Point{0.0}, 3, fast()).value == cplx(0.0));
    const auto ideal = log_partition_via_identity(ideal_gas(0.7, 1.5), Point{0.0}, 2, fast(), {8});
    CHECK(std::abs(ideal.value - 0.7 * 1.5) < 1e-12);

    RecursionParams params = fast(12);
    const double exact = std::log(2.125);
    const auto at0 = log_partition_via_identity(hard_rods(1.0), Point{0.0}, 4, params, {8});
    const auto at_half = log_partition_via_identity(hard_rods(1.0), Point{0.5}, 4, params, {8});
    CHECK(std::abs(at0.value - exact) < 1e-3);
    CHECK(std::abs(at_half.value - exact) < 1e-3);
    CHECK(std::abs(at0.value - at_half.value) < 2e-3);
}

TEST_CASE("k-point densities") {
    RecursionParams params;
    const auto f = hard_rods(1.0);
    const std::vector<Point> one{Point{0.5}};
    CHECK(kpoint_density_telescoping(f, one, 3, params) == density(f, Point{0.5}, 3, params).value);
    const std::vector<Point> overlap{Point{0.3}, Point{0.7}};
    CHECK(kpoint_density_telescoping(f, overlap, 5, params) == cplx(0.0));
    const std::vector<Point> apart{Point{0.1}, Point{0.9}};
    const cplx rec = kpoint_density_telescoping(f, apart, 5, params);
    const cplx orc = kpoint_oracle(f, apart);
    CHECK(std::abs(rec - orc) < 1e-3);
}

TEST_CASE("property: real repulsive densities stay between 0 and the activity") {
    Gen gen(31);
    for (int trial = 0; trial < 25; ++trial) {
        const auto p = share(gen.potential(1));
        const Region region = gen.region(1);
        const double lambda = gen.uniform(0.0, 2.5);
        const ActivityField f(p, region, lambda);
        const Point v = gen.point(1, region.lower()[0], region.upper()[0]);
        const auto est = density(f, v, gen.integer(0, 3), fast(6));
        CHECK(est.value.real() >= 0.0);
        CHECK(est.value.real() <= lambda + 1e-15);
        CHECK(std::abs(est.value.imag()) < 1e-12);
    }
}

TEST_CASE("property: recursion matches the oracle on small instances") {
    Gen gen(32);
    for (int trial = 0; trial < 6; ++trial) {
        const double r = gen.uniform(0.3, 0.8);
        const double lambda = gen.uniform(0.2, 1.5);
        const auto f = hard_rods(lambda, r);
        const Point v{gen.uniform(0.0, 1.0)};
        const cplx rec = density(f, v, 5, RecursionParams{}).value;
        const cplx orc = density_oracle(f, v);
        CHECK(std::abs(rec - orc) < 1e-3);
    }
}

TEST_CASE("containment callback is applied to every intermediate") {
    RecursionParams params = fast(8);
    params.containment = [](cplx rho) { return std::abs(rho) <= 1.0; };
    CHECK(density(hard_rods(1.0), Point{0.5}, 3, params).in_certified_region);
    params.containment = [](cplx rho) { return std::abs(rho) <= 0.5; };
    CHECK_FALSE(density(hard_rods(1.0), Point{0.5}, 3, params).in_certified_region);
    CHECK_FALSE(density(hard_rods(1.0), Point{0.5}, 3, fast(8)).in_certified_region);
}

TEST_CASE("per-level order schedule") {
    RecursionParams p;
    CHECK(order_at_level(p, 0) == 16);
    CHECK(order_at_level(p, 1) == 10);
    CHECK(order_at_level(p, 2) == 6);
    p.min_order = 4;
    CHECK(order_at_level(p, 10) == 4);
}

TEST_CASE("node budget is enforced") {
    RecursionParams p;
    p.node_budget = 100;
    CHECK_THROWS(density(hard_rods(1.0), Point{0.5}, 6, p));
}
