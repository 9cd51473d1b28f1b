#include "gasrec/mc_validator.hpp"

#include <json.hpp>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace gasrec {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

double round9(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return std::stod(buf);
}

double mean_of(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

// Standard error of the mean of `counts` from `batches` contiguous batches.
template <class T>
double batch_means_stderr(const std::vector<T>& counts, int batches) {
    const std::size_t b = static_cast<std::size_t>(std::max(2, batches));
    const std::size_t len = counts.size() / b;
    if (len == 0) return 0.0;
    std::vector<double> means(b, 0.0);
    for (std::size_t i = 0; i < b; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < len; ++j) s += counts[i * len + j];
        means[i] = s / static_cast<double>(len);
    }
    const double m = mean_of(means);
    double var = 0.0;
    for (double x : means) var += (x - m) * (x - m);
    return std::sqrt(var / static_cast<double>(b - 1) / static_cast<double>(b));
}

class Chain {
public:
    Chain(const ActivityField& f, const McConfig& cfg, int index)
        : f_(f), p_(f.potential()), region_(f.support()), cfg_(cfg),
          rng_(SplitMix64::stream_key(cfg.seed, static_cast<std::uint64_t>(index))) {
        result_.chain = index;
        result_.stream_key = rng_.key();
        result_.steps = cfg.steps;
        result_.histogram.assign(static_cast<std::size_t>(cfg.histogram_bins), 0.0);
        volume_ = region_.volume();
        if (cfg.probe) {
            if (cfg.probe->dimension() != region_.dimension()) {
                throw std::invalid_argument("probe dimension differs from region");
            }
            probe_volume_ = probe_volume();
            if (!(probe_volume_ > 0.0)) throw std::invalid_argument("probe ball misses the region");
        }
    }

    ChainResult run() {
        std::uint64_t accepted = 0;
        for (std::uint64_t step = 0; step < cfg_.steps; ++step) {
            if (rng_.uniform() < 0.5 ? birth() : death()) ++accepted;
            if (step >= cfg_.burn_in && (step - cfg_.burn_in) % cfg_.thinning == 0) record();
        }
        result_.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(cfg_.steps);
        double total = 0.0;
        for (int c : result_.counts) total += c;
        const double samples = static_cast<double>(result_.counts.size());
        result_.mean_count = samples > 0 ? total / samples : 0.0;
        result_.mean_count_stderr = batch_means_stderr(result_.counts, cfg_.batches);
        const double width = (region_.upper()[0] - region_.lower()[0]) / cfg_.histogram_bins;
        for (auto& h : result_.histogram) h = samples > 0 ? h / (samples * width) : 0.0;
        if (cfg_.probe) {
            double hits = 0.0;
            for (int c : probe_hits_) hits += c;
            result_.probe_density = samples > 0 ? hits / samples / probe_volume_ : 0.0;
            result_.probe_density_stderr = batch_means_stderr(probe_hits_, cfg_.batches) / probe_volume_;
        }
        return result_;
    }

private:
    double activity(const Point& x) const {
        const cplx a = f_(x);
        if (a.imag() != 0.0 || a.real() < 0.0) throw std::invalid_argument("activity must be real and nonnegative");
        return a.real();
    }

    Point uniform_point() {
        const int d = region_.dimension();
        for (;;) {
            Point x(d);
            for (int i = 0; i < d; ++i) {
                x[i] = region_.lower()[i] + (region_.upper()[i] - region_.lower()[i]) * rng_.uniform();
            }
            if (region_.contains(x)) return x;
        }
    }

    double boltzmann_with_others(const Point& x, std::size_t skip) const {
        double b = 1.0;
        for (std::size_t j = 0; j < points_.size() && b > 0.0; ++j) {
            if (j != skip) b *= p_.boltzmann_at_radius(dist(points_[j], x));
        }
        return b;
    }

    bool birth() {
        const Point x = uniform_point();
        const double u = rng_.uniform();
        const double a = activity(x);
        if (a == 0.0) return false;
        const double b = boltzmann_with_others(x, points_.size());
        if (u < birth_acceptance(a, volume_, points_.size(), b)) {
            points_.push_back(x);
            return true;
        }
        return false;
    }

    bool death() {
        const std::size_t n = points_.size();
        const std::uint64_t pick = rng_.next();
        const double u = rng_.uniform();
        if (n == 0) return false;
        const std::size_t i = static_cast<std::size_t>(pick % n);
        const double b = boltzmann_with_others(points_[i], i);
        if (u < death_acceptance(activity(points_[i]), volume_, n, b)) {
            points_[i] = points_.back();
            points_.pop_back();
            return true;
        }
        return false;
    }

    // Volume of the probe ball inside Lambda, by a fixed midpoint grid in d >= 2.
    double probe_volume() const {
        const Point& c = *cfg_.probe;
        const double r = cfg_.probe_radius;
        const int d = region_.dimension();
        if (d == 1) {
            return std::max(0.0, std::min(c[0] + r, region_.upper()[0]) - std::max(c[0] - r, region_.lower()[0]));
        }
        constexpr int n = 64;
        const double cell = 2.0 * r / n;
        double inside = 0.0;
        Point x(d);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                for (int k = 0; k < (d == 3 ? n : 1); ++k) {
                    x[0] = c[0] - r + (i + 0.5) * cell;
                    x[1] = c[1] - r + (j + 0.5) * cell;
                    if (d == 3) x[2] = c[2] - r + (k + 0.5) * cell;
                    if (dist(x, c) < r && region_.contains(x)) inside += 1.0;
                }
            }
        }
        return inside * std::pow(cell, d);
    }

    void record() {
        result_.counts.push_back(static_cast<int>(points_.size()));
        if (cfg_.probe) {
            int hits = 0;
            for (const auto& x : points_) hits += dist(x, *cfg_.probe) < cfg_.probe_radius ? 1 : 0;
            probe_hits_.push_back(hits);
        }
        const double lo = region_.lower()[0];
        const double width = (region_.upper()[0] - lo) / cfg_.histogram_bins;
        for (const auto& x : points_) {
            const int bin = std::clamp(static_cast<int>((x[0] - lo) / width), 0, cfg_.histogram_bins - 1);
            result_.histogram[static_cast<std::size_t>(bin)] += 1.0;
        }
    }

    const ActivityField& f_;
    const Potential& p_;
    const Region& region_;
    const McConfig& cfg_;
    SplitMix64 rng_;
    double volume_ = 0.0;
    double probe_volume_ = 0.0;
    std::vector<Point> points_;
    std::vector<int> probe_hits_;
    ChainResult result_;
};

}  // namespace

std::uint64_t SplitMix64::mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::at(std::uint64_t counter) const { return mix(key_ + (counter + 1) * kGolden); }

std::uint64_t SplitMix64::stream_key(std::uint64_t seed, std::uint64_t chain) {
    return mix(mix(seed + kGolden) ^ (chain * 0xD1B54A32D192ED03ULL));
}

void validate(const McConfig& cfg) {
    if (cfg.steps == 0) throw std::invalid_argument("steps must be positive");
    if (cfg.burn_in >= cfg.steps) throw std::invalid_argument("burn_in must be below steps");
    if (cfg.chains < 1) throw std::invalid_argument("chains must be positive");
    if (cfg.thinning == 0) throw std::invalid_argument("thinning must be positive");
    if (cfg.histogram_bins < 1) throw std::invalid_argument("histogram_bins must be positive");
    if (cfg.batches < 2) throw std::invalid_argument("batches must be at least 2");
    if (cfg.probe && !(cfg.probe_radius > 0.0)) throw std::invalid_argument("probe_radius must be positive");
}

double birth_acceptance(double lambda_x, double volume, std::size_t n, double boltzmann) {
    return std::min(1.0, lambda_x * volume * boltzmann / static_cast<double>(n + 1));
}

double death_acceptance(double lambda_x, double volume, std::size_t n, double boltzmann) {
    if (n == 0) return 0.0;
    const double denom = lambda_x * volume * boltzmann;
    if (denom == 0.0) return 1.0;
    return std::min(1.0, static_cast<double>(n) / denom);
}

McResult run_birth_death(const ActivityField& f, const McConfig& cfg) {
    validate(cfg);
    if (!(f.support().volume() > 0.0)) throw std::invalid_argument("zero-volume region");
    if (!f.is_real()) throw std::invalid_argument("activity must be real and nonnegative");

    McResult r;
    r.chains.resize(static_cast<std::size_t>(cfg.chains));
    auto work = [&](int c) { r.chains[static_cast<std::size_t>(c)] = Chain(f, cfg, c).run(); };
    const int threads = std::clamp(cfg.threads, 1, cfg.chains);
    if (threads == 1) {
        for (int c = 0; c < cfg.chains; ++c) work(c);
    } else {
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.chains));
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (int c = t; c < cfg.chains; c += threads) {
                    try {
                        work(c);
                    } catch (...) {
                        errors[static_cast<std::size_t>(c)] = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    r.histogram_lo = f.support().lower()[0];
    r.histogram_hi = f.support().upper()[0];
    r.density_histogram.assign(static_cast<std::size_t>(cfg.histogram_bins), 0.0);
    double var = 0.0;
    double probe_var = 0.0;
    for (const auto& c : r.chains) {
        r.mean_count += c.mean_count;
        var += c.mean_count_stderr * c.mean_count_stderr;
        r.probe_density += c.probe_density;
        probe_var += c.probe_density_stderr * c.probe_density_stderr;
        for (std::size_t i = 0; i < c.histogram.size(); ++i) r.density_histogram[i] += c.histogram[i];
    }
    const double n = static_cast<double>(r.chains.size());
    r.mean_count /= n;
    r.mean_count_stderr = std::sqrt(var) / n;
    r.probe_density /= n;
    r.probe_density_stderr = std::sqrt(probe_var) / n;
    for (auto& h : r.density_histogram) h /= n;
    return r;
}

bool detailed_balance_unit_checks() {
    auto flows_match = [](double lambda, double volume, std::size_t n, double pi_x, double boltzmann) {
        // x has n points and density pi_x; y adds one point with pair factor `boltzmann`.
        const double pi_y = pi_x * lambda * boltzmann;
        const double forward = pi_x * 0.5 / volume * birth_acceptance(lambda, volume, n, boltzmann);
        const double backward =
            pi_y * 0.5 / static_cast<double>(n + 1) * death_acceptance(lambda, volume, n + 1, boltzmann);
        if (forward == 0.0 && backward == 0.0) return true;
        return std::abs(forward / backward - 1.0) <= 1e-12;
    };
    bool ok = true;
    // Empty <-> single point in an ideal gas, at activities on both sides of |Lambda|^-1.
    ok = ok && flows_match(1.3, 2.0, 0, 1.0, 1.0);
    ok = ok && flows_match(0.2, 2.0, 0, 1.0, 1.0);
    // Single <-> pair with overlapping hard cores: births are refused.
    const Potential core = Potential::hard_core(1, 0.5);
    const double overlap = core.boltzmann_at_radius(0.2);
    ok = ok && birth_acceptance(1.0, 1.0, 1, overlap) == 0.0 && flows_match(1.0, 1.0, 1, 1.0, overlap);
    // Single <-> pair under a gaussian potential.
    const Potential soft = Potential::gaussian(1, 1.5, 0.4);
    for (double s : {0.05, 0.3, 0.7}) {
        const double b = soft.boltzmann_at_radius(s);
        ok = ok && flows_match(0.8, 1.0, 1, 0.8, b) && flows_match(4.0, 1.0, 1, 4.0, b);
    }
    return ok;
}

GoodnessOfFit poisson_goodness_of_fit(std::span<const int> counts, double mean, double alpha) {
    GoodnessOfFit g;
    if (counts.empty()) throw std::invalid_argument("no samples");
    if (!(mean > 0.0)) throw std::invalid_argument("Poisson mean must be positive");
    const double total = static_cast<double>(counts.size());
    int kmax = 0;
    for (int c : counts) kmax = std::max(kmax, c);
    std::vector<double> observed(static_cast<std::size_t>(kmax) + 1, 0.0);
    for (int c : counts) {
        if (c < 0) throw std::invalid_argument("negative count");
        observed[static_cast<std::size_t>(c)] += 1.0;
    }

    const boost::math::poisson_distribution<double> dist(mean);
    struct Cell {
        double expected;
        double observed;
    };
    std::vector<Cell> cells;
    Cell open{0.0, 0.0};
    double used = 0.0;
    for (int k = 0;; ++k) {
        const double e = total * boost::math::pdf(dist, k);
        open.expected += e;
        used += e;
        open.observed += k <= kmax ? observed[static_cast<std::size_t>(k)] : 0.0;
        const double rest = total - used;
        if (open.expected >= 5.0 && rest >= 5.0) {
            cells.push_back(open);
            open = {0.0, 0.0};
        }
        if (rest < 5.0 && k >= kmax) break;
    }
    // The remaining upper tail joins the open cell.
    open.expected += total - used;
    if (open.expected > 0.0 || open.observed > 0.0) {
        if (open.expected >= 5.0 || cells.empty()) {
            cells.push_back(open);
        } else {
            cells.back().expected += open.expected;
            cells.back().observed += open.observed;
        }
    }
    for (const auto& c : cells) g.statistic += (c.observed - c.expected) * (c.observed - c.expected) / c.expected;
    g.degrees_of_freedom = static_cast<int>(cells.size()) - 1;
    if (g.degrees_of_freedom < 1) {
        g.p_value = 1.0;
    } else {
        const boost::math::chi_squared_distribution<double> chi(g.degrees_of_freedom);
        g.p_value = boost::math::cdf(boost::math::complement(chi, g.statistic));
    }
    g.passed = g.p_value > alpha;
    return g;
}

std::string chains_jsonl(const McResult& r, const McConfig& cfg) {
    std::string out;
    for (const auto& c : r.chains) {
        nlohmann::ordered_json j;
        j["seed"] = cfg.seed;
        j["chain"] = c.chain;
        j["stream_key"] = c.stream_key;
        j["steps"] = c.steps;
        j["burn_in"] = cfg.burn_in;
        j["mean_count"] = round9(c.mean_count);
        j["stderr"] = round9(c.mean_count_stderr);
        j["acceptance_rate"] = round9(c.acceptance_rate);
        out += j.dump() + "\n";
    }
    return out;
}

}  // namespace gasrec
