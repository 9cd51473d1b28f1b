#include "gasrec/mc_validator.hpp"
#include "gasrec/oracle.hpp"
#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sstream>

using namespace gasrec;
using namespace gasrec::test;

TEST_CASE("SplitMix64 reference outputs") {
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
    CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
    CHECK(rng.next() == 0x06C45D188009454FULL);
    SplitMix64 jump(0);
    CHECK(jump.at(2) == 0x06C45D188009454FULL);
    CHECK(SplitMix64::stream_key(0, 0) != SplitMix64::stream_key(0, 1));
    CHECK(SplitMix64::stream_key(0, 0) != SplitMix64::stream_key(1, 0));
}

TEST_CASE("uniforms lie in [0, 1)") {
    SplitMix64 rng(99);
    double total = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        total += u;
    }
    CHECK(total / 100000.0 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("acceptance formulas and detailed balance") {
    CHECK(detailed_balance_unit_checks());
    CHECK(birth_acceptance(1.0, 1.0, 0, 1.0) == 1.0);
    CHECK(death_acceptance(1.0, 1.0, 1, 1.0) == 1.0);
    CHECK(birth_acceptance(1.0, 1.0, 1, 0.0) == 0.0);
    CHECK(death_acceptance(1.0, 1.0, 0, 1.0) == 0.0);
    // Acceptance ratio between one and two points equals the ratio of the
    // stationary weights, lambda |Lambda| exp(-dU) / 2.
    const double boltz = std::exp(-0.37);
    for (double lambda : {0.4, 1.7, 6.0}) {
        const double volume = 0.8;
        const double ratio = birth_acceptance(lambda, volume, 1, boltz) / death_acceptance(lambda, volume, 2, boltz);
        CHECK(ratio == doctest::Approx(lambda * volume * boltz / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("ideal gas mean count") {
    McConfig cfg;
    cfg.steps = 200000;
    const auto r = run_birth_death(ideal_gas(1.0), cfg);
    CHECK(std::abs(r.mean_count - 1.0) < 3.0 * r.mean_count_stderr);
}

TEST_CASE("hard rods mean count") {
    McConfig cfg;
    cfg.steps = 400000;
    const auto r = run_birth_death(hard_rods(1.0), cfg);
    CHECK(std::abs(r.mean_count - 1.25 / 2.125) < 3.0 * r.mean_count_stderr);
    CHECK(r.mean_count >= 0.5 - 3.0 * r.mean_count_stderr);
}

TEST_CASE("zero activity never adds a point") {
    McConfig cfg;
    cfg.steps = 10000;
    cfg.burn_in = 100;
    const auto r = run_birth_death(hard_rods(0.0), cfg);
    CHECK(r.mean_count == 0.0);
}

TEST_CASE("two seeds agree within combined errors") {
    McConfig a;
    a.steps = 300000;
    McConfig b = a;
    b.seed = 12345;
    const auto ra = run_birth_death(hard_rods(1.5), a);
    const auto rb = run_birth_death(hard_rods(1.5), b);
    const double combined = std::hypot(ra.mean_count_stderr, rb.mean_count_stderr);
    CHECK(std::abs(ra.mean_count - rb.mean_count) < 4.0 * combined);
}

TEST_CASE("property: density lower bound holds along an activity grid") {
    for (double lambda : {0.3, 1.0, 2.0}) {
        McConfig cfg;
        cfg.steps = 200000;
        cfg.seed = static_cast<std::uint64_t>(lambda * 10);
        const auto f = hard_rods(lambda, 0.4);
        const auto r = run_birth_death(f, cfg);
        CHECK(r.mean_count >= lambda / (1.0 + 0.8 * lambda) - 3.0 * r.mean_count_stderr);
    }
}

TEST_CASE("Poisson goodness of fit") {
    McConfig cfg;
    cfg.steps = 1000000;
    cfg.thinning = 20;
    const auto r = run_birth_death(ideal_gas(1.0), cfg);
    const auto fit = poisson_goodness_of_fit(r.chains.front().counts, 1.0);
    CHECK(fit.passed);
    CHECK(fit.degrees_of_freedom >= 3);
    // The hard-rod count distribution is far from Poisson.
    McConfig rods = cfg;
    const auto h = run_birth_death(hard_rods(1.0), rods);
    CHECK_FALSE(poisson_goodness_of_fit(h.chains.front().counts, h.mean_count).passed);
}

TEST_CASE("runs are reproducible and independent of the thread count") {
    McConfig cfg;
    cfg.steps = 50000;
    cfg.chains = 3;
    cfg.seed = 4;
    const auto one = run_birth_death(hard_rods(1.0), cfg);
    cfg.threads = 3;
    const auto three = run_birth_death(hard_rods(1.0), cfg);
    CHECK(chains_jsonl(one, cfg) == chains_jsonl(three, cfg));
    REQUIRE(one.chains.size() == 3);
    CHECK(one.chains[0].mean_count != one.chains[1].mean_count);
}

TEST_CASE("chains serialize as one JSON object per line") {
    McConfig cfg;
    cfg.steps = 20000;
    cfg.chains = 2;
    const auto r = run_birth_death(hard_rods(1.0), cfg);
    std::istringstream in(chains_jsonl(r, cfg));
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.contains("seed"));
        CHECK(j.contains("stream_key"));
        CHECK(j.contains("acceptance_rate"));
        CHECK(j["chain"].get<int>() == lines);
        ++lines;
    }
    CHECK(lines == 2);
}

TEST_CASE("probe density estimates the point density") {
    McConfig cfg;
    cfg.steps = 1000000;
    cfg.probe = Point{0.5};
    cfg.probe_radius = 0.05;
    const auto r = run_birth_death(hard_rods(1.0), cfg);
    // Averaged over the probe the density is flat near the center.
    CHECK(std::abs(r.probe_density - density_oracle(hard_rods(1.0), Point{0.5}).real()) <
          4.0 * r.probe_density_stderr + 0.02);
}

TEST_CASE("invalid configurations") {
    McConfig cfg;
    cfg.burn_in = cfg.steps;
    CHECK_THROWS(validate(cfg));
    McConfig chains;
    chains.chains = 0;
    CHECK_THROWS(validate(chains));
    McConfig ok;
    ok.steps = 1000;
    ok.burn_in = 10;
    CHECK_THROWS(run_birth_death(hard_rods(cplx(1.0, 0.1)), ok));
    CHECK_THROWS(run_birth_death(hard_rods(-1.0), ok));
    ok.probe = Point{0.1, 0.2};
    CHECK_THROWS(run_birth_death(hard_rods(1.0), ok));
}
