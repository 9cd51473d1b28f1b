#pragma once

#include "gasrec/activity.hpp"
#include "gasrec/potential.hpp"
#include "gasrec/region.hpp"

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <random>

namespace gasrec::test {

inline constexpr double kE = std::numbers::e;

inline std::shared_ptr<const Potential> share(Potential p) { return std::make_shared<const Potential>(std::move(p)); }

/// Rods of length r on [0, L] at constant activity lambda.
inline ActivityField hard_rods(cplx lambda = 1.0, double r = 0.5, double length = 1.0) {
    return ActivityField(share(Potential::hard_core(1, r)), Region::interval(0.0, length), lambda);
}

inline ActivityField ideal_gas(cplx lambda = 1.0, double length = 1.0) {
    return ActivityField(share(Potential::ideal(1)), Region::interval(0.0, length), lambda);
}

/// Small deterministic generator for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }
    cplx complex(double radius) { return {uniform(-radius, radius), uniform(-radius, radius)}; }

    Point point(int d, double lo, double hi) {
        Point p(d);
        for (int i = 0; i < d; ++i) p[i] = uniform(lo, hi);
        return p;
    }

    Potential potential(int d) {
        switch (integer(0, 3)) {
            case 0: return Potential::hard_core(d, uniform(0.05, 1.0));
            case 1: return Potential::gaussian(d, uniform(0.1, 3.0), uniform(0.1, 1.0));
            case 2: return Potential::exponential_decay(d, uniform(0.1, 3.0), uniform(0.05, 0.5));
            default: {
                const double r1 = uniform(0.05, 0.4);
                const double r2 = r1 + uniform(0.05, 0.4);
                const double v0 = uniform(1.0, 4.0);
                return Potential::tabulated(d, {{0.0, v0}, {r1, uniform(0.0, v0)}, {r2, 0.0}});
            }
        }
    }

    Region region(int d) {
        if (d == 1) {
            const double lo = uniform(-1.0, 0.5);
            return Region::interval(lo, lo + uniform(0.3, 1.5));
        }
        if (coin()) return Region::ball(point(d, -0.5, 0.5), uniform(0.3, 1.0));
        Point lo = point(d, -1.0, 0.0);
        Point hi = lo;
        for (int i = 0; i < d; ++i) hi[i] += uniform(0.3, 1.2);
        return Region::box(lo, hi);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace gasrec::test
