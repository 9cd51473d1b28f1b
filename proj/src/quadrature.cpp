#include "gasrec/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace gasrec {

namespace {

std::vector<Node1D> compute_gauss_legendre(int n) {
    std::vector<Node1D> nodes(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged root for the weight.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[static_cast<std::size_t>(i)] = {-x, w};
        nodes[static_cast<std::size_t>(n - 1 - i)] = {x, w};
    }
    if (n % 2 == 1) nodes[static_cast<std::size_t>(n / 2)].x = 0.0;
    return nodes;
}

std::vector<Node1D> compute_midpoint(int n) {
    std::vector<Node1D> nodes(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) nodes[static_cast<std::size_t>(i)] = {-1.0 + (2.0 * i + 1.0) / n, 2.0 / n};
    return nodes;
}

// Appends the nodes of `rule` mapped onto [a, b].
template <class Fn>
void for_each_mapped(const std::vector<Node1D>& rule, double a, double b, Fn&& fn) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (const auto& n : rule) fn(mid + half * n.x, half * n.w);
}

// Radial layer edges on [0, R]; hard cores keep an edge exactly at the core.
std::vector<double> radial_edges(double R, int layers) {
    std::vector<double> e;
    for (int i = 0; i <= layers; ++i) e.push_back(R * i / layers);
    e.back() = R;
    return e;
}

// Interior table radii, where a tabulated Mayer function has kinks.
std::vector<double> table_kinks(const Potential& p) {
    std::vector<double> out;
    if (p.kind() != PotentialKind::tabulated) return out;
    for (const auto& row : p.table()) {
        if (row.radius > 0.0 && row.radius < p.support_radius()) out.push_back(row.radius);
    }
    return out;
}

}  // namespace

std::string to_string(QuadratureRule rule) {
    return rule == QuadratureRule::gauss_legendre ? "gauss-legendre" : "midpoint";
}

QuadratureRule parse_quadrature_rule(const std::string& name) {
    if (name == "gauss-legendre") return QuadratureRule::gauss_legendre;
    if (name == "midpoint") return QuadratureRule::midpoint;
    throw std::invalid_argument("unknown quadrature rule '" + name + "'");
}

QuadratureScheme default_scheme(int dimension) {
    QuadratureScheme q;
    q.order_per_dimension = dimension == 1 ? 32 : (dimension == 2 ? 16 : 8);
    return q;
}

const std::vector<Node1D>& rule_nodes(QuadratureRule rule, int n) {
    if (n < 1) throw std::invalid_argument("quadrature order must be positive");
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::vector<Node1D>> cache;
    std::lock_guard lock(mu);
    auto key = std::make_pair(static_cast<int>(rule), n);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto nodes = rule == QuadratureRule::gauss_legendre ? compute_gauss_legendre(n) : compute_midpoint(n);
        it = cache.emplace(key, std::move(nodes)).first;
    }
    return it->second;
}

std::vector<double> piece_edges(double lo, double hi, std::span<const double> breakpoints) {
    std::vector<double> e{lo};
    const double eps = 1e-13 * std::max(1.0, hi - lo);
    for (double b : breakpoints) {
        if (b > lo + eps && b < hi - eps) e.push_back(b);
    }
    e.push_back(hi);
    std::sort(e.begin(), e.end());
    std::vector<double> out;
    out.reserve(e.size());
    for (double x : e) {
        if (out.empty() || x - out.back() > eps) out.push_back(x);
    }
    if (out.back() != hi) out.back() = hi;
    return out;
}

std::vector<WeightedNode> region_nodes(const Region& region, const QuadratureScheme& q,
                                       std::span<const double> breakpoints_1d) {
    const int d = region.dimension();
    const auto& rule = rule_nodes(q.rule, q.order_per_dimension);
    std::vector<WeightedNode> out;

    if (d == 1) {
        const auto edges = piece_edges(region.lower()[0], region.upper()[0], breakpoints_1d);
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            for_each_mapped(rule, edges[i], edges[i + 1], [&](double x, double w) {
                out.push_back({Point{x}, w});
            });
        }
        return out;
    }

    if (region.kind() == RegionKind::ball) {
        // Polar / spherical coordinates about the center.
        const auto& c = region.center();
        const double R = region.radius();
        const auto& ang = rule_nodes(QuadratureRule::midpoint, 2 * q.order_per_dimension);
        const auto redges = radial_edges(R, q.radial_layers);
        for (std::size_t l = 0; l + 1 < redges.size(); ++l) {
            for_each_mapped(rule, redges[l], redges[l + 1], [&](double s, double ws) {
                if (d == 2) {
                    for (const auto& a : ang) {
                        const double th = std::numbers::pi * (a.x + 1.0);
                        Point x{c[0] + s * std::cos(th), c[1] + s * std::sin(th)};
                        out.push_back({x, ws * s * std::numbers::pi * a.w});
                    }
                } else {
                    for (const auto& mu : rule) {
                        const double st = std::sqrt(std::max(0.0, 1.0 - mu.x * mu.x));
                        for (const auto& a : ang) {
                            const double ph = std::numbers::pi * (a.x + 1.0);
                            Point x{c[0] + s * st * std::cos(ph), c[1] + s * st * std::sin(ph), c[2] + s * mu.x};
                            out.push_back({x, ws * s * s * mu.w * std::numbers::pi * a.w});
                        }
                    }
                }
            });
        }
        return out;
    }

    // Tensor-product rule over a box.
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    const std::size_t n = rule.size();
    while (true) {
        Point x(d);
        double w = 1.0;
        for (int k = 0; k < d; ++k) {
            const double a = region.lower()[k];
            const double b = region.upper()[k];
            const auto& nd = rule[idx[static_cast<std::size_t>(k)]];
            x[k] = 0.5 * (a + b) + 0.5 * (b - a) * nd.x;
            w *= 0.5 * (b - a) * nd.w;
        }
        out.push_back({x, w});
        int k = 0;
        while (k < d && ++idx[static_cast<std::size_t>(k)] == n) idx[static_cast<std::size_t>(k++)] = 0;
        if (k == d) break;
    }
    return out;
}

std::vector<WeightedNode> mayer_ball_nodes(const Potential& p, const Point& v, const Region& region,
                                           const QuadratureScheme& q,
                                           std::span<const double> breakpoints_1d, const PieceFilter& keep) {
    std::vector<WeightedNode> out;
    const double R = p.support_radius();
    if (p.is_null() || R <= 0.0) return out;
    const int d = region.dimension();
    const auto& rule = rule_nodes(q.rule, q.order_per_dimension);

    if (d == 1) {
        const double lo = std::max(v[0] - R, region.lower()[0]);
        const double hi = std::min(v[0] + R, region.upper()[0]);
        if (!(hi > lo)) return out;
        std::vector<double> breaks(breakpoints_1d.begin(), breakpoints_1d.end());
        breaks.push_back(v[0]);
        // Soft potentials get radial layers on each side of v; a hard core's
        // Mayer function is constant inside the core.
        const int layers = p.is_hard_core() ? 1 : std::max(1, q.radial_layers);
        for (int l = 1; l < layers; ++l) {
            breaks.push_back(v[0] - R * l / layers);
            breaks.push_back(v[0] + R * l / layers);
        }
        for (double r : table_kinks(p)) {
            breaks.push_back(v[0] - r);
            breaks.push_back(v[0] + r);
        }
        const auto edges = piece_edges(lo, hi, breaks);
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            if (keep && !keep(edges[i], edges[i + 1])) continue;
            for_each_mapped(rule, edges[i], edges[i + 1], [&](double x, double w) {
                const double m = p.mayer_at_radius(std::abs(x - v[0]));
                if (m > 0.0) out.push_back({Point{x}, w * m});
            });
        }
        return out;
    }

    // d >= 2: polar / spherical shells around v, clipped to the region.
    const auto& ang = rule_nodes(QuadratureRule::midpoint, 2 * q.order_per_dimension);
    auto redges = radial_edges(R, std::max(1, q.radial_layers));
    const auto kinks = table_kinks(p);
    if (!kinks.empty()) {
        redges.insert(redges.end(), kinks.begin(), kinks.end());
        std::sort(redges.begin(), redges.end());
        redges.erase(std::unique(redges.begin(), redges.end()), redges.end());
    }
    for (std::size_t l = 0; l + 1 < redges.size(); ++l) {
        for_each_mapped(rule, redges[l], redges[l + 1], [&](double s, double ws) {
            const double m = p.mayer_at_radius(s);
            if (m == 0.0) return;
            if (d == 2) {
                for (const auto& a : ang) {
                    const double th = std::numbers::pi * (a.x + 1.0);
                    Point x{v[0] + s * std::cos(th), v[1] + s * std::sin(th)};
                    if (region.contains(x)) out.push_back({x, ws * s * std::numbers::pi * a.w * m});
                }
            } else {
                for (const auto& mu : rule) {
                    const double st = std::sqrt(std::max(0.0, 1.0 - mu.x * mu.x));
                    for (const auto& a : ang) {
                        const double ph = std::numbers::pi * (a.x + 1.0);
                        Point x{v[0] + s * st * std::cos(ph), v[1] + s * st * std::sin(ph), v[2] + s * mu.x};
                        if (region.contains(x)) {
                            out.push_back({x, ws * s * s * mu.w * std::numbers::pi * a.w * m});
                        }
                    }
                }
            }
        });
    }
    return out;
}

cplx integrate_region(const PointFunction& f, const Region& region, const QuadratureScheme& q,
                      std::span<const double> breakpoints_1d) {
    cplx sum = 0.0;
    for (const auto& n : region_nodes(region, q, breakpoints_1d)) sum += n.weight * f(n.x);
    return sum;
}

cplx integrate_mayer_ball(const PointFunction& f, const Potential& p, const Point& v, const Region& region,
                          const QuadratureScheme& q) {
    cplx sum = 0.0;
    for (const auto& n : mayer_ball_nodes(p, v, region, q)) sum += n.weight * f(n.x);
    return sum;
}

}  // namespace gasrec
