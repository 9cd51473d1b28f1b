#include "gasrec/oracle.hpp"

#include "gasrec/quadrature.hpp"

#include <Eigen/Dense>
#include <boost/random/sobol.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

namespace gasrec {

namespace {

constexpr double kZeroThreshold = 1e-9;

double factorial(int k) { return std::tgamma(k + 1.0); }

// Radii at which the pair factor exp(-phi(x_i - y)) is non-smooth in y.
std::vector<double> kink_radii(const Potential& p) {
    if (p.is_null()) return {};
    switch (p.kind()) {
        case PotentialKind::hard_core:
            return {p.range()};
        case PotentialKind::exponential_decay:
            return {0.0};
        case PotentialKind::tabulated: {
            std::vector<double> out{0.0};
            for (const auto& row : p.table()) {
                if (row.radius > 0.0 && row.radius <= p.support_radius()) out.push_back(row.radius);
            }
            return out;
        }
        case PotentialKind::gaussian:
            return {};
    }
    return {};
}

double pair_factor(const Potential& p, std::span<const Point> xs, const Point& y) {
    double b = 1.0;
    for (const auto& x : xs) {
        b *= p.boltzmann_at_radius(dist(x, y));
        if (b == 0.0) return 0.0;
    }
    return b;
}

class NestedIntegrator {
public:
    NestedIntegrator(const ActivityField& f, const OracleParams& params)
        : f_(f), p_(f.potential()), region_(f.support()), radii_(kink_radii(f.potential())) {
        if (region_.dimension() == 1) {
            base_breaks_ = f.breakpoints_1d();
            order_ = params.nested_order_1d;
        } else {
            QuadratureScheme q;
            q.order_per_dimension = params.nested_order_nd;
            nodes_ = region_nodes(region_, q);
        }
    }

    // int_{Lambda^k} f^{(k)} exp(-U), without the 1/k!.
    cplx integrate(int k) {
        std::vector<Point> xs;
        xs.reserve(static_cast<std::size_t>(k));
        return level(k, xs, 1.0);
    }

private:
    cplx level(int k, std::vector<Point>& xs, cplx weight) {
        const int j = static_cast<int>(xs.size());
        if (j == k) return weight;
        cplx sum = 0.0;
        auto visit = [&](const Point& y, double w) {
            const cplx a = f_(y);
            if (a == 0.0) return;
            const double b = pair_factor(p_, xs, y);
            if (b == 0.0) return;
            xs.push_back(y);
            sum += w * level(k, xs, weight * a * b);
            xs.pop_back();
        };
        if (region_.dimension() != 1) {
            for (const auto& node : nodes_) visit(node.x, node.weight);
            return sum;
        }
        const double lo = region_.lower()[0];
        const double hi = region_.upper()[0];
        const auto& rule = rule_nodes(QuadratureRule::gauss_legendre, order_);
        for (const auto& piece : pieces(k, j, xs, lo, hi)) {
            const double half = 0.5 * (piece.second - piece.first);
            const double mid = 0.5 * (piece.second + piece.first);
            for (const auto& n : rule) visit(Point{mid + half * n.x}, half * n.w);
        }
        return sum;
    }

    // Remaining variables chain the pair kinks, so breakpoints are shifted by
    // up to as many multiples of each kink radius as there are variables left.
    std::vector<std::pair<double, double>> pieces(int k, int j, std::span<const Point> xs, double lo, double hi) const {
        std::vector<double> breaks = base_breaks_;
        const int left = k - j;
        for (double rho : radii_) {
            for (int m = -left; m <= left; ++m) {
                if (std::abs(m) < left) {
                    for (double b : base_breaks_) breaks.push_back(b + m * rho);
                }
                for (const auto& x : xs) breaks.push_back(x[0] + m * rho);
            }
        }
        const auto edges = piece_edges(lo, hi, breaks);
        std::vector<std::pair<double, double>> out;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) out.emplace_back(edges[i], edges[i + 1]);
        return out;
    }

    const ActivityField& f_;
    const Potential& p_;
    const Region& region_;
    std::vector<double> radii_;
    std::vector<double> base_breaks_;
    std::vector<WeightedNode> nodes_;
    int order_ = 16;
};

struct QmcEstimate {
    cplx mean;
    double stderr;
};

// Randomly shifted Sobol estimate of int_{Lambda^k} f^{(k)} exp(-U) over the
// bounding box of Lambda; the field vanishes outside the support.
QmcEstimate qmc_integral(const ActivityField& f, int k, const OracleParams& params) {
    const Region& region = f.support();
    const Potential& p = f.potential();
    const int d = region.dimension();
    const std::size_t dims = static_cast<std::size_t>(k * d);
    double box_volume = 1.0;
    for (int i = 0; i < d; ++i) box_volume *= region.upper()[i] - region.lower()[i];
    const double scale = std::pow(box_volume, k);

    const int shifts = std::max(1, params.shifts);
    const int per_shift = std::max(1, params.samples_per_order / shifts);
    std::mt19937_64 rng(params.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<cplx> estimates;
    std::vector<double> shift(dims);
    std::vector<double> u(dims);
    std::vector<Point> xs;
    for (int s = 0; s < shifts; ++s) {
        for (auto& v : shift) v = unit(rng);
        boost::random::sobol gen(dims);
        const double denom = static_cast<double>(gen.max()) + 1.0;
        cplx acc = 0.0;
        for (int n = 0; n < per_shift; ++n) {
            for (std::size_t i = 0; i < dims; ++i) {
                double v = static_cast<double>(gen()) / denom + shift[i];
                u[i] = v >= 1.0 ? v - 1.0 : v;
            }
            xs.clear();
            cplx value = 1.0;
            for (int a = 0; a < k && value != 0.0; ++a) {
                Point y(d);
                for (int i = 0; i < d; ++i) {
                    y[i] = region.lower()[i] + (region.upper()[i] - region.lower()[i]) * u[static_cast<std::size_t>(a * d + i)];
                }
                value *= f(y);
                if (value == 0.0) break;
                value *= pair_factor(p, xs, y);
                xs.push_back(y);
            }
            acc += value;
        }
        estimates.push_back(scale * acc / static_cast<double>(per_shift));
    }
    cplx mean = 0.0;
    for (const auto& e : estimates) mean += e;
    mean /= static_cast<double>(estimates.size());
    double var = 0.0;
    for (const auto& e : estimates) var += std::norm(e - mean);
    const double se = estimates.size() > 1 ? std::sqrt(var / (estimates.size() - 1) / estimates.size()) : 0.0;
    return {mean, se};
}

double tail_bound(double mass, int truncation) {
    // sum_{k > K} m^k / k! = e^m - sum_{k <= K} m^k / k!, summed directly to
    // avoid cancellation.
    double term = 1.0;
    for (int k = 1; k <= truncation; ++k) term *= mass / k;
    double tail = 0.0;
    for (int k = truncation + 1; k < truncation + 400; ++k) {
        term *= mass / k;
        tail += term;
        if (term < 1e-300 || term < 1e-18 * tail) break;
    }
    return tail;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

cplx horner(std::span<const double> c, cplx x) {
    cplx v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    return v;
}

cplx horner_derivative(std::span<const double> c, cplx x) {
    cplx v = 0.0;
    for (std::size_t i = c.size(); i-- > 1;) v = v * x + static_cast<double>(i) * c[i];
    return v;
}

}  // namespace

PartitionSeries partition_series(const ActivityField& f, const OracleParams& params) {
    if (params.truncation < 1) throw std::invalid_argument("truncation must be at least 1");
    PartitionSeries s;
    s.truncation = params.truncation;
    s.region_volume = f.support().volume();
    s.terms.assign(static_cast<std::size_t>(params.truncation) + 1, 0.0);
    s.term_stderr.assign(s.terms.size(), 0.0);
    s.terms[0] = 1.0;
    s.tail_estimate = tail_bound(f.sup_base() * s.region_volume, params.truncation);
    if (f.sup_base() == 0.0) return s;

    NestedIntegrator nested(f, params);
    for (int k = 1; k <= params.truncation; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        if (k <= 3) {
            s.terms[idx] = nested.integrate(k) / factorial(k);
        } else {
            const QmcEstimate e = qmc_integral(f, k, params);
            s.terms[idx] = e.mean / factorial(k);
            s.term_stderr[idx] = e.stderr / factorial(k);
        }
    }
    s.value = 0.0;
    for (const auto& t : s.terms) s.value += t;
    return s;
}

cplx PartitionPolynomial::operator()(cplx lambda) const { return horner(coefficients, lambda); }

cplx PartitionPolynomial::derivative(cplx lambda) const { return horner_derivative(coefficients, lambda); }

PartitionPolynomial partition_polynomial(const ActivityField& f, const OracleParams& params) {
    const PartitionSeries s = partition_series(f.with_constant_base(1.0), params);
    PartitionPolynomial poly;
    poly.truncation = s.truncation;
    poly.tail_estimate = s.tail_estimate;
    poly.region_volume = s.region_volume;
    for (std::size_t k = 0; k < s.terms.size(); ++k) {
        poly.coefficients.push_back(s.terms[k].real());
        poly.coefficient_stderr.push_back(s.term_stderr[k]);
    }
    return poly;
}

std::string serialize(const PartitionPolynomial& poly) {
    std::ostringstream out;
    for (double c : poly.coefficients) out << fmt(c) << '\n';
    out << "truncation = " << poly.truncation << '\n'
        << "tail_estimate = " << fmt(poly.tail_estimate) << '\n'
        << "region_volume = " << fmt(poly.region_volume) << '\n';
    return out.str();
}

PartitionPolynomial parse_partition_polynomial(const std::string& text) {
    PartitionPolynomial poly;
    std::istringstream in(text);
    std::string line;
    bool have_truncation = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            poly.coefficients.push_back(std::stod(line));
            continue;
        }
        std::string key = line.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        const std::string value = line.substr(eq + 1);
        if (key == "truncation") {
            poly.truncation = std::stoi(value);
            have_truncation = true;
        } else if (key == "tail_estimate") {
            poly.tail_estimate = std::stod(value);
        } else if (key == "region_volume") {
            poly.region_volume = std::stod(value);
        } else {
            throw std::invalid_argument("unknown polynomial key " + key);
        }
    }
    if (!have_truncation) throw std::invalid_argument("polynomial lacks truncation");
    if (poly.coefficients.size() != static_cast<std::size_t>(poly.truncation) + 1) {
        throw std::invalid_argument("coefficient count does not match truncation");
    }
    poly.coefficient_stderr.assign(poly.coefficients.size(), 0.0);
    return poly;
}

cplx hard_rod_partition(double length, double rod, cplx lambda, int truncation) {
    cplx z = 1.0;
    cplx power = 1.0;
    for (int k = 1; k <= truncation; ++k) {
        power *= lambda;
        const double free = std::max(length - (k - 1) * rod, 0.0);
        if (free == 0.0) break;
        z += power * std::pow(free, k) / factorial(k);
    }
    return z;
}

cplx kpoint_oracle(const ActivityField& f, std::span<const Point> points, const OracleParams& params) {
    if (points.empty()) throw std::invalid_argument("k-point density needs at least one point");
    cplx prefactor = 1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        prefactor *= f(points[i]);
        prefactor *= pair_factor(f.potential(), points.subspan(0, i), points[i]);
    }
    const cplx z = partition_series(f, params).value;
    if (std::abs(z) <= kZeroThreshold) throw std::domain_error("oracle at numerical zero of Z");
    if (prefactor == 0.0) return 0.0;
    ActivityField discounted = f;
    for (const auto& v : points) discounted = discounted.discount_at(v);
    return prefactor * partition_series(discounted, params).value / z;
}

cplx density_oracle(const ActivityField& f, const Point& v, const OracleParams& params) {
    return kpoint_oracle(f, std::span<const Point>(&v, 1), params);
}

MeanDensity mean_density(const PartitionPolynomial& poly, double lambda, double c_phi) {
    if (lambda < 0.0) throw std::invalid_argument("activity must be nonnegative");
    MeanDensity m;
    if (lambda == 0.0) return m;
    m.value = (lambda * poly.derivative(lambda) / (poly.region_volume * poly(lambda))).real();
    m.lower_bound = lambda / (1.0 + lambda * c_phi);
    m.margin = m.value - m.lower_bound;
    return m;
}

MeanDensity mean_density(const ActivityField& f, const OracleParams& params) {
    if (!f.is_constant() || f.constant_value().imag() != 0.0) {
        throw std::invalid_argument("mean density needs a real constant activity");
    }
    const double lambda = f.constant_value().real();
    if (lambda == 0.0) return {};
    return mean_density(partition_polynomial(f, params), lambda, temperedness_constant(f.potential()));
}

std::vector<cplx> partition_zeros(std::span<const double> coefficients) {
    std::size_t n = coefficients.size();
    while (n > 0 && coefficients[n - 1] == 0.0) --n;
    if (n <= 1) return {};
    const std::span<const double> c = coefficients.subspan(0, n);
    const int degree = static_cast<int>(n) - 1;

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -c[static_cast<std::size_t>(i)] / c[n - 1];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw std::runtime_error("companion eigenvalues did not converge");

    std::vector<cplx> roots;
    for (int i = 0; i < degree; ++i) {
        cplx x = solver.eigenvalues()[i];
        for (int it = 0; it < 50; ++it) {
            const cplx dp = horner_derivative(c, x);
            if (dp == 0.0) break;
            const cplx step = horner(c, x) / dp;
            x -= step;
            if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
        }
        roots.push_back(x);
    }
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return roots;
}

std::vector<cplx> partition_zeros(const PartitionPolynomial& poly) { return partition_zeros(poly.coefficients); }

LogZBound logZ_bound_check(const ActivityField& f, double c_bound, const OracleParams& params) {
    const cplx z = partition_series(f, params).value;
    if (std::abs(z) <= kZeroThreshold) throw std::domain_error("oracle at numerical zero of Z");
    LogZBound r;
    r.log_z = std::log(z);
    r.bound = c_bound * f.support().volume();
    r.holds = std::abs(r.log_z) <= r.bound;
    return r;
}

}  // namespace gasrec
