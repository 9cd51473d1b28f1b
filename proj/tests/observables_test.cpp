#include "gasrec/observables.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace gasrec;
using namespace gasrec::test;

TEST_CASE("pressure") {
    CHECK(pressure_finite_volume(hard_rods(0.0)) == 0.0);
    CHECK(pressure_finite_volume(ideal_gas(1.3, 2.0)) == doctest::Approx(1.3).epsilon(1e-6));
    CHECK(pressure_finite_volume(hard_rods(1.0)) == doctest::Approx(std::log(2.125)).epsilon(1e-12));
    CHECK(std::abs(pressure_finite_volume(hard_rods(1.0)) - 0.7538) < 1e-4);
    CHECK_THROWS(pressure_finite_volume(hard_rods(cplx(1.0, 0.5))));
}

TEST_CASE("pressure with the recursion engine") {
    ObservableParams params;
    params.engine = Engine::recursion;
    params.depth = 4;
    params.recursion.scheme.order_per_dimension = 12;
    CHECK(std::abs(pressure_finite_volume(hard_rods(1.0), params) - std::log(2.125)) < 1e-3);
    CHECK(pressure_finite_volume(ideal_gas(0.8), params) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("density from pressure") {
    CHECK(density_from_pressure(ideal_gas(1.0)) == doctest::Approx(1.0).epsilon(1e-6));
    const double rods = density_from_pressure(hard_rods(1.0));
    CHECK(std::abs(rods - 1.25 / 2.125) < 10.0 * 1e-6 + 1e-8);
    CHECK(density_from_pressure(hard_rods(0.0)) == 0.0);
    CHECK(density_from_pressure(hard_rods(1e-6)) < 2e-6);
    ObservableParams rich;
    rich.richardson = true;
    CHECK(std::abs(density_from_pressure(hard_rods(1.0), rich) - 1.25 / 2.125) < 1e-9);
}

TEST_CASE("property: finite-difference density tracks the oracle mean density") {
    Gen gen(61);
    for (int trial = 0; trial < 20; ++trial) {
        const double r = gen.uniform(0.2, 1.0);
        const double lambda = gen.uniform(0.1, 2.5);
        const auto f = hard_rods(lambda, r);
        const double h = 1e-3 * lambda;
        const double fd = density_from_pressure(f, h);
        CHECK(std::abs(fd - mean_density(f).value) < 10.0 * h * h + 1e-8);
    }
}

TEST_CASE("property: pressure is nondecreasing in the activity") {
    Gen gen(62);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = share(Potential::hard_core(1, gen.uniform(0.1, 1.0)));
        const Region region = gen.region(1);
        double prev = -1.0;
        for (int i = 0; i <= 12; ++i) {
            const double lambda = 0.25 * i;
            const double now = pressure_finite_volume(ActivityField(p, region, lambda));
            CHECK(now >= prev);
            prev = now;
        }
    }
}

TEST_CASE("integrated recursion density") {
    ObservableParams params;
    params.engine = Engine::recursion;
    params.depth = 4;
    params.recursion.scheme.order_per_dimension = 12;
    CHECK(std::abs(integrated_recursion_density(hard_rods(1.0), params) - 1.25 / 2.125) < 2e-3);
    CHECK(integrated_recursion_density(ideal_gas(0.6), params) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("packing constants") {
    CHECK(std::abs(packing_constants(2).critical_packing - 0.18276) < 5e-5);
    CHECK(packing_constants(2).critical_packing == doctest::Approx(0.1827639).epsilon(1e-6));
    CHECK(packing_constants(1).critical_packing == doctest::Approx(kE / (1.0 + kE) / 2.0).epsilon(1e-15));
    CHECK(packing_constants(1).critical_packing == doctest::Approx(0.365529).epsilon(1e-6));
    CHECK(kE / (1.0 + kE) == doctest::Approx(0.7310586).epsilon(1e-7));
    CHECK(packing_constants(2).reference_d2 == 0.18276);
}

TEST_CASE("packing density of the normalized model is 2^-d times the density") {
    for (int d = 1; d <= 3; ++d) {
        const auto p = Potential::hard_core(d, unit_volume_radius(d));
        const auto eta = packing_density(p, 0.37);
        REQUIRE(eta.has_value());
        CHECK(*eta == doctest::Approx(0.37 * std::pow(2.0, -d)).epsilon(1e-14));
    }
    CHECK_FALSE(packing_density(Potential::gaussian(1, 1.0, 1.0), 0.5).has_value());
}

TEST_CASE("thermo rows") {
    const auto t = thermo_point(hard_rods(1.0));
    CHECK(t.lambda == 1.0);
    CHECK(t.pressure == doctest::Approx(std::log(2.125)));
    CHECK(t.density == doctest::Approx(1.25 / 2.125).epsilon(1e-5));
    REQUIRE(t.packing_density.has_value());
    // In one dimension a rod of length r covers r.
    CHECK(*t.packing_density == doctest::Approx(0.5 * t.density));
    CHECK(t.truncation == 12);
    CHECK(thermo_csv_header() == "lambda,pressure,density,packing_density,engine,depth,K");
    const std::string row = thermo_csv_row(t);
    CHECK(row.rfind("1,0.753771802,", 0) == 0);
    CHECK(row.find(",oracle,") != std::string::npos);
    CHECK(parse_engine("recursion") == Engine::recursion);
    CHECK_THROWS(parse_engine("magic"));
}
