#include "gasrec/contraction.hpp"
#include "gasrec/oracle.hpp"
#include "support.hpp"

#include <doctest.h>

#include <vector>

using namespace gasrec;
using namespace gasrec::test;

TEST_CASE("series at zero activity") {
    const auto s = partition_series(hard_rods(0.0));
    CHECK(s.value == cplx(1.0));
}

TEST_CASE("ideal gas series is the exponential") {
    const auto s = partition_series(ideal_gas(1.0));
    CHECK(std::abs(s.value - kE) < 1e-6);
    CHECK(std::abs(s.value - kE) <= s.tail_estimate + 1e-12);
    const auto t = partition_series(ideal_gas(cplx(0.3, 0.4), 2.0));
    CHECK(std::abs(t.value - std::exp(cplx(0.6, 0.8))) < 1e-8);
}

TEST_CASE("hard-rod series") {
    const auto s = partition_series(hard_rods(1.0));
    REQUIRE(s.terms.size() == 13);
    CHECK(std::abs(s.terms[0] - 1.0) < 1e-15);
    CHECK(std::abs(s.terms[1] - 1.0) < 1e-14);
    CHECK(std::abs(s.terms[2] - 0.125) < 1e-12);
    for (std::size_t k = 3; k < s.terms.size(); ++k) CHECK(std::abs(s.terms[k]) < 1e-12);
    CHECK(std::abs(s.value - 2.125) < 1e-12);
    CHECK(s.tail_estimate < 1e-5);
}

TEST_CASE("closed-form hard rods") {
    CHECK(std::abs(hard_rod_partition(1.0, 0.5, 1.0, 12) - 2.125) < 1e-15);
    CHECK(hard_rod_partition(1.0, 0.5, 0.0, 12) == cplx(1.0));
    CHECK(std::abs(hard_rod_partition(1.0, 1.2, 1.0, 12) - 2.0) < 1e-15);
}

TEST_CASE("property: closed-form hard rods match nested quadrature") {
    Gen gen(51);
    for (int trial = 0; trial < 30; ++trial) {
        const double length = gen.uniform(0.5, 2.0);
        // At most three rods fit.
        const double r = gen.uniform(length / 3.0 + 1e-3, 1.5 * length);
        const cplx lambda(gen.uniform(0.0, 2.0), gen.uniform(-0.5, 0.5));
        const auto s = partition_series(hard_rods(lambda, r, length));
        CHECK(std::abs(s.value - hard_rod_partition(length, r, lambda, 12)) < 1e-8);
    }
}

TEST_CASE("property: coefficients respect the repulsive bound") {
    Gen gen(52);
    for (int trial = 0; trial < 8; ++trial) {
        const auto p = share(gen.potential(1));
        const Region region = gen.region(1);
        const ActivityField f(p, region, 1.0);
        OracleParams params;
        params.truncation = 6;
        params.samples_per_order = 1 << 11;
        const auto poly = partition_polynomial(f, params);
        const double v = region.volume();
        double fact = 1.0;
        CHECK(poly.coefficients[0] == doctest::Approx(1.0));
        CHECK(poly.coefficients[1] == doctest::Approx(v).epsilon(1e-12));
        for (std::size_t k = 0; k < poly.coefficients.size(); ++k) {
            if (k > 0) fact *= static_cast<double>(k);
            CHECK(poly.coefficients[k] >= -1e-12);
            CHECK(poly.coefficients[k] <= std::pow(v, static_cast<double>(k)) / fact + 1e-9);
        }
    }
}

TEST_CASE("density oracle") {
    const auto f = hard_rods(1.0);
    CHECK(std::abs(density_oracle(f, Point{0.5}) - 8.0 / 17.0) < 1e-12);
    CHECK(std::abs(density_oracle(f, Point{0.1}) - 1.4 / 2.125) < 1e-12);
    CHECK(density_oracle(f, Point{1.5}) == cplx(0.0));
    const auto tiny = hard_rods(1e-8);
    CHECK(std::abs(density_oracle(tiny, Point{0.3}) - 1e-8) < 1e-15);
}

TEST_CASE("k-point oracle") {
    const auto f = hard_rods(1.0);
    const std::vector<Point> one{Point{0.3}};
    CHECK(kpoint_oracle(f, one) == density_oracle(f, Point{0.3}));
    const std::vector<Point> overlap{Point{0.3}, Point{0.7}};
    CHECK(kpoint_oracle(f, overlap) == cplx(0.0));
    // Rods at 0.1 and 0.9 leave no room for a third, so the numerator is 1.
    const std::vector<Point> apart{Point{0.1}, Point{0.9}};
    CHECK(std::abs(kpoint_oracle(f, apart) - 1.0 / 2.125) < 1e-12);
}

TEST_CASE("mean density") {
    const auto zero = mean_density(hard_rods(0.0));
    CHECK(zero.value == 0.0);
    CHECK(zero.lower_bound == 0.0);
    CHECK(zero.margin == 0.0);

    // Truncation at K = 12 leaves a relative error of order 1.5^12 / 12!.
    const auto ideal = mean_density(ideal_gas(1.5));
    CHECK(ideal.value == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(ideal.lower_bound == 1.5);
    CHECK(std::abs(ideal.margin) < 1e-6);
    OracleParams deep;
    deep.truncation = 24;
    const auto exact = mean_density(ideal_gas(1.5), deep);
    CHECK(exact.value == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(std::abs(exact.margin) < 1e-13);

    const auto rods = mean_density(hard_rods(1.0));
    CHECK(rods.value == doctest::Approx(1.25 / 2.125).epsilon(1e-12));
    CHECK(rods.lower_bound == doctest::Approx(0.5));
    CHECK(rods.margin == doctest::Approx(1.25 / 2.125 - 0.5).epsilon(1e-10));
}

TEST_CASE("property: mean density never falls below the repulsive bound") {
    Gen gen(53);
    for (int trial = 0; trial < 6; ++trial) {
        const auto p = share(gen.potential(1));
        const ActivityField f(p, gen.region(1), 1.0);
        OracleParams params;
        params.truncation = 8;
        params.samples_per_order = 1 << 11;
        const auto poly = partition_polynomial(f, params);
        const double c = temperedness_constant(*p);
        const double crit = critical_activity(*p);
        for (int i = 0; i < 10; ++i) {
            const double lambda = crit * i / 10.0;
            if (lambda * f.support().volume() > 3.0) continue;
            CHECK(mean_density(poly, lambda, c).margin >= -1e-12);
        }
    }
}

TEST_CASE("partition zeros") {
    const std::vector<double> quad{1.0, 1.0, 0.125};
    const auto roots = partition_zeros(quad);
    REQUIRE(roots.size() == 2);
    CHECK(std::abs(roots[0] - (-4.0 - 2.0 * std::sqrt(2.0))) < 1e-12);
    CHECK(std::abs(roots[1] - (-4.0 + 2.0 * std::sqrt(2.0))) < 1e-12);
    const std::vector<double> lin{1.0, 1.0};
    const auto one = partition_zeros(lin);
    REQUIRE(one.size() == 1);
    CHECK(std::abs(one[0] + 1.0) < 1e-15);
    const std::vector<double> constant{1.0};
    CHECK(partition_zeros(constant).empty());
}

TEST_CASE("property: roots reinserted vanish") {
    Gen gen(54);
    for (int trial = 0; trial < 100; ++trial) {
        const int degree = gen.integer(1, 10);
        std::vector<double> c{1.0};
        double fact = 1.0;
        for (int k = 1; k <= degree; ++k) {
            fact *= k;
            c.push_back(gen.uniform(0.1, 2.0) * std::pow(gen.uniform(0.5, 2.0), k) / fact);
        }
        const auto roots = partition_zeros(c);
        REQUIRE(static_cast<int>(roots.size()) == degree);
        for (const auto& z : roots) {
            cplx value = 0.0;
            double scale = 0.0;
            for (int k = degree; k >= 0; --k) value = value * z + c[static_cast<std::size_t>(k)];
            for (int k = 0; k <= degree; ++k) scale += std::abs(c[static_cast<std::size_t>(k)]) * std::pow(std::abs(z), k);
            CHECK(std::abs(value) < 1e-9 * scale);
        }
    }
}

TEST_CASE("hard-rod zeros stay away from the subcritical segment") {
    for (double length : {1.0, 1.2, 1.35}) {
        const auto poly = partition_polynomial(hard_rods(1.0, 0.5, length));
        const double reach = critical_activity(Potential::hard_core(1, 0.5)) * 0.95;
        for (const auto& z : partition_zeros(poly)) CHECK(distance_to_segment(z, reach) > 0.1);
    }
}

TEST_CASE("polynomial serialization") {
    const auto poly = partition_polynomial(hard_rods(1.0));
    const auto back = parse_partition_polynomial(serialize(poly));
    REQUIRE(back.coefficients.size() == poly.coefficients.size());
    for (std::size_t k = 0; k < poly.coefficients.size(); ++k) {
        CHECK(back.coefficients[k] == doctest::Approx(poly.coefficients[k]).epsilon(1e-8));
    }
    CHECK(back.truncation == poly.truncation);
    CHECK(std::abs(poly(1.0) - 2.125) < 1e-12);
    CHECK(std::abs(poly.derivative(1.0) - 1.25) < 1e-12);
}

TEST_CASE("log Z bound") {
    const auto zero = logZ_bound_check(hard_rods(0.0), 1.0);
    CHECK(zero.holds);
    CHECK(zero.log_z == cplx(0.0));
    const auto cert = certify_neighborhood(2.0, 1.0);
    const auto rods = logZ_bound_check(hard_rods(1.0), cert.u2_modulus_bound);
    CHECK(rods.holds);
    CHECK(std::abs(rods.log_z - std::log(2.125)) < 1e-12);
    for (int i = 0; i < 8; ++i) {
        const double t = 2.0 * std::acos(-1.0) * i / 8.0;
        const cplx lambda = cplx(2.0) + cert.eps1 * std::polar(1.0, t);
        CHECK(logZ_bound_check(hard_rods(lambda), cert.u2_modulus_bound).holds);
    }
}

TEST_CASE("oracle errors") {
    OracleParams bad;
    bad.truncation = 0;
    CHECK_THROWS(partition_series(hard_rods(1.0), bad));
    // Z(-1.1716) vanishes for the hard-rod instance.
    const cplx root = -4.0 + 2.0 * std::sqrt(2.0);
    CHECK_THROWS_WITH(density_oracle(hard_rods(root), Point{0.5}), doctest::Contains("numerical zero"));
}

TEST_CASE("two-dimensional series runs and stays bounded") {
    const auto p = share(Potential::gaussian(2, 1.0, 0.2));
    const ActivityField f(p, Region::box(Point{0.0, 0.0}, Point{0.5, 0.5}), 1.0);
    OracleParams params;
    params.truncation = 6;
    params.samples_per_order = 1 << 12;
    const auto s = partition_series(f, params);
    CHECK(s.value.real() > 1.0);
    CHECK(s.value.real() < std::exp(0.25));
    CHECK(std::abs(s.value.imag()) < 1e-12);
}
