#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>

using namespace gasrec;
using namespace gasrec::test;

namespace {

// Romberg on [-L, L]; the integrand is negligible beyond L = 7.
double romberg_gaussian_cphi(double amplitude, double scale) {
    auto f = [&](double x) { return -std::expm1(-amplitude * std::exp(-(x / scale) * (x / scale))); };
    const double a = -7.0 * scale;
    const double b = 7.0 * scale;
    constexpr int kLevels = 14;
    double R[kLevels][kLevels]{};
    double h = b - a;
    R[0][0] = 0.5 * h * (f(a) + f(b));
    for (int i = 1; i < kLevels; ++i) {
        h *= 0.5;
        double sum = 0.0;
        for (long k = 1; k < (1L << i); k += 2) sum += f(a + static_cast<double>(k) * h);
        R[i][0] = 0.5 * R[i - 1][0] + h * sum;
        double pow4 = 1.0;
        for (int j = 1; j <= i; ++j) {
            pow4 *= 4.0;
            R[i][j] = R[i][j - 1] + (R[i][j - 1] - R[i - 1][j - 1]) / (pow4 - 1.0);
        }
    }
    return R[kLevels - 1][kLevels - 1];
}

}  // namespace

TEST_CASE("hard core evaluates to infinity inside the core") {
    const auto p = Potential::hard_core(1, 0.5);
    CHECK(p(Point{0.3}) == std::numeric_limits<double>::infinity());
    CHECK(p(Point{0.7}) == 0.0);
    CHECK(p.mayer(Point{0.3}) == 1.0);
    CHECK(p.mayer(Point{0.7}) == 0.0);
}

TEST_CASE("gaussian at the origin") {
    const auto p = Potential::gaussian(1, 1.0, 1.0);
    CHECK(p(Point{0.0}) == 1.0);
    CHECK(p.mayer(Point{0.0}) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(p.mayer(Point{0.0}) == doctest::Approx(0.6321206).epsilon(1e-7));
}

TEST_CASE("temperedness constant of hard cores") {
    CHECK(temperedness_constant(Potential::hard_core(1, 0.5)) == doctest::Approx(1.0).epsilon(1e-15));
    for (int d = 1; d <= 6; ++d) {
        CHECK(temperedness_constant(Potential::hard_core(d, unit_volume_radius(d))) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("gaussian temperedness agrees with a Romberg reference") {
    const double reference = romberg_gaussian_cphi(1.0, 1.0);
    CHECK(temperedness_constant(Potential::gaussian(1, 1.0, 1.0)) == doctest::Approx(reference).epsilon(1e-8));
    CHECK(critical_activity(Potential::gaussian(1, 1.0, 1.0)) == doctest::Approx(kE / reference).epsilon(1e-8));
    // Other amplitude and scale.
    const double ref2 = romberg_gaussian_cphi(2.5, 0.3);
    CHECK(temperedness_constant(Potential::gaussian(1, 2.5, 0.3)) == doctest::Approx(ref2).epsilon(1e-8));
}

TEST_CASE("critical activity") {
    CHECK(critical_activity(Potential::hard_core(1, 0.5)) == doctest::Approx(kE).epsilon(1e-15));
    CHECK(critical_activity(Potential::hard_core(1, 1.0)) == doctest::Approx(kE / 2.0).epsilon(1e-15));
    CHECK(critical_activity(Potential::ideal(2)) == std::numeric_limits<double>::infinity());
}

TEST_CASE("hard-core quadrature matches the ball volume") {
    for (int d = 1; d <= 3; ++d) {
        for (double r : {0.2, 0.5, 1.3}) {
            const auto p = Potential::hard_core(d, r);
            CHECK(temperedness_by_quadrature(p) == doctest::Approx(temperedness_constant(p)).epsilon(1e-8));
        }
    }
}

TEST_CASE("null potential") {
    const auto p = Potential::gaussian(2, 0.0, 1.0);
    CHECK(p.is_null());
    CHECK(temperedness_constant(p) == 0.0);
    Gen gen(11);
    for (int i = 0; i < 50; ++i) CHECK(p.mayer(gen.point(2, -2.0, 2.0)) == 0.0);
}

TEST_CASE("property: potentials are repulsive and symmetric with Mayer in [0, 1]") {
    Gen gen(1);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = gen.integer(1, 3);
        const Potential p = gen.potential(d);
        for (int k = 0; k < 20; ++k) {
            const Point x = gen.point(d, -1.5, 1.5);
            const Point minus_x = Point::origin(d) - x;
            const double phi = p(x);
            REQUIRE(phi >= 0.0);
            CHECK(p(minus_x) == phi);
            const double m = p.mayer(x);
            CHECK(m >= 0.0);
            CHECK(m <= 1.0);
            CHECK(p.mayer(minus_x) == m);
        }
        CHECK(std::isfinite(temperedness_constant(p)));
    }
}

TEST_CASE("tail bound is reported for infinite-range kinds") {
    const auto p = Potential::exponential_decay(1, 2.0, 0.3);
    const auto rep = temperedness_report(p);
    CHECK(rep.cutoff_radius > 0.0);
    CHECK(rep.tail_bound >= 0.0);
    CHECK(rep.tail_bound < 1e-9);
    CHECK(p.mayer_at_radius(rep.cutoff_radius) <= p.mayer_cutoff_tol() * 1.0001);
}

TEST_CASE("tabulated potentials") {
    const auto p = Potential::tabulated(1, {{0.0, 3.0}, {0.2, 1.0}, {0.4, 0.0}});
    CHECK(p.at_radius(0.1) == doctest::Approx(2.0));
    CHECK(p.at_radius(0.3) == doctest::Approx(0.5));
    CHECK(p.at_radius(0.9) == 0.0);
    CHECK(p.support_radius() == doctest::Approx(0.4));
    CHECK_THROWS_AS(Potential::tabulated(1, {{0.0, 1.0}, {0.0, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(Potential::tabulated(1, {{0.0, -1.0}, {1.0, 0.0}}), std::invalid_argument);

    const auto path = std::filesystem::temp_directory_path() / "gasrec_table_test.txt";
    {
        std::ofstream out(path);
        out << "# radius value\n0 3\n0.2 1  # knee\n\n0.4 0\n";
    }
    const auto loaded = load_tabulated_potential(path, 1);
    CHECK(loaded.table().size() == 3);
    CHECK(temperedness_constant(loaded) == doctest::Approx(temperedness_constant(p)).epsilon(1e-12));
    std::filesystem::remove(path);
    CHECK_THROWS(load_tabulated_potential("/nonexistent/table.txt", 1));
}

TEST_CASE("invalid parameters throw") {
    CHECK_THROWS_AS(Potential::hard_core(1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Potential::gaussian(1, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Potential::gaussian(1, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(parse_potential_kind("lennard-jones"), std::invalid_argument);
    CHECK(parse_potential_kind(to_string(PotentialKind::exponential_decay)) == PotentialKind::exponential_decay);
}
