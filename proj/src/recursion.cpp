#include "gasrec/recursion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace gasrec {

namespace {

struct Context {
    const RecursionParams& params;
    std::atomic<std::uint64_t>& visited;
    bool contained = true;
    double max_abs = 0.0;
};

void observe(Context& ctx, cplx value) {
    ctx.max_abs = std::max(ctx.max_abs, std::abs(value));
    if (ctx.params.containment && ctx.contained && !ctx.params.containment(value)) ctx.contained = false;
}

void count_node(Context& ctx) {
    if (ctx.visited.fetch_add(1, std::memory_order_relaxed) + 1 > ctx.params.node_budget) {
        throw std::runtime_error("recursion budget exceeded");
    }
}

// Quadrature nodes of the Mayer ball around v, restricted to pieces where the
// activity does not vanish identically.
std::vector<WeightedNode> branch_nodes(const ActivityField& f, const Point& v, int level,
                                       const RecursionParams& params) {
    QuadratureScheme q = params.scheme;
    q.order_per_dimension = order_at_level(params, level);
    const Potential& p = f.potential();
    if (f.support().dimension() != 1) {
        return mayer_ball_nodes(p, v, f.support(), q);
    }
    std::vector<double> breaks = f.breakpoints_1d();
    if (p.is_hard_core()) {
        // The child density jumps in slope where a child's core edge crosses
        // an edge of the field.
        const std::size_t n = breaks.size();
        for (std::size_t i = 0; i < n; ++i) {
            breaks.push_back(breaks[i] - p.range());
            breaks.push_back(breaks[i] + p.range());
        }
    }
    // Zero sets of the field are unions of balls whose edges are breakpoints,
    // so the midpoint decides the whole piece.
    auto keep = [&f](double lo, double hi) { return f(Point{0.5 * (lo + hi)}) != 0.0; };
    return mayer_ball_nodes(p, v, f.support(), q, breaks, keep);
}

cplx evaluate(const ActivityField& f, const Point& v, int depth, int level, Context& ctx) {
    count_node(ctx);
    const cplx a = f(v);
    if (a == 0.0 || depth == 0) {
        observe(ctx, a);
        return a;
    }
    cplx exponent = 0.0;
    for (const auto& node : branch_nodes(f, v, level, ctx.params)) {
        if (node.weight < ctx.params.prune_tol) continue;
        exponent += node.weight * evaluate(f.restrict_toward(v, node.x), node.x, depth - 1, level + 1, ctx);
    }
    const cplx value = a * std::exp(-exponent);
    observe(ctx, value);
    return value;
}

struct RootResult {
    cplx value;
    bool contained;
    double max_abs;
    std::uint64_t nodes;
};

RootResult evaluate_root(const ActivityField& f, const Point& v, int depth, const RecursionParams& params) {
    std::atomic<std::uint64_t> visited{0};
    Context root{params, visited};
    count_node(root);
    const cplx a = f(v);
    if (a == 0.0 || depth == 0) {
        observe(root, a);
        return {a, root.contained, root.max_abs, visited.load()};
    }

    const auto nodes = branch_nodes(f, v, 0, params);
    std::vector<cplx> terms(nodes.size(), 0.0);
    const int threads = std::max(1, std::min<int>(params.threads, static_cast<int>(nodes.size())));
    std::vector<Context> contexts;
    contexts.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) contexts.push_back(Context{params, visited});

    auto work = [&](int t) {
        for (std::size_t i = static_cast<std::size_t>(t); i < nodes.size(); i += static_cast<std::size_t>(threads)) {
            if (nodes[i].weight < params.prune_tol) continue;
            terms[i] = nodes[i].weight *
                       evaluate(f.restrict_toward(v, nodes[i].x), nodes[i].x, depth - 1, 1,
                                contexts[static_cast<std::size_t>(t)]);
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    work(t);
                } catch (...) {
                    errors[static_cast<std::size_t>(t)] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    cplx exponent = 0.0;
    for (const auto& t : terms) exponent += t;
    const cplx value = a * std::exp(-exponent);
    observe(root, value);
    bool contained = root.contained;
    double max_abs = root.max_abs;
    for (const auto& c : contexts) {
        contained = contained && c.contained;
        max_abs = std::max(max_abs, c.max_abs);
    }
    return {value, contained, max_abs, visited.load()};
}

}  // namespace

int order_at_level(const RecursionParams& params, int level) {
    const double raw = params.scheme.order_per_dimension * std::pow(params.order_decay, level);
    return std::max({1, params.min_order, static_cast<int>(std::ceil(raw - 1e-9))});
}

cplx apply_F(cplx lambda, const PointFunction& rho, const Potential& p, const Point& v, const Region& region,
             const QuadratureScheme& q) {
    if (lambda == 0.0) return 0.0;
    return lambda * std::exp(-integrate_mayer_ball(rho, p, v, region, q));
}

DensityEstimate density(const ActivityField& f, const Point& v, int depth, const RecursionParams& params) {
    if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
    DensityEstimate est;
    est.depth = depth;
    est.scheme = params.scheme;
    const RootResult r = evaluate_root(f, v, depth, params);
    est.value = r.value;
    est.in_certified_region = params.containment ? r.contained : false;
    est.tree_nodes = r.nodes;
    est.max_abs_intermediate = r.max_abs;
    if (depth > 0) {
        RecursionParams plain = params;
        plain.containment = nullptr;
        est.last_step_delta = std::abs(r.value - evaluate_root(f, v, depth - 1, plain).value);
    }
    return est;
}

std::vector<DensityEstimate> density_sequence(const ActivityField& f, const Point& v, int max_depth,
                                              const RecursionParams& params) {
    if (max_depth < 0) throw std::invalid_argument("depth must be nonnegative");
    std::vector<DensityEstimate> out;
    for (int k = 0; k <= max_depth; ++k) {
        const RootResult r = evaluate_root(f, v, k, params);
        DensityEstimate est;
        est.value = r.value;
        est.depth = k;
        est.scheme = params.scheme;
        est.in_certified_region = params.containment ? r.contained : false;
        est.tree_nodes = r.nodes;
        est.max_abs_intermediate = r.max_abs;
        if (k > 0) est.last_step_delta = std::abs(r.value - out.back().value);
        out.push_back(est);
    }
    return out;
}

std::vector<double> outer_breakpoints_1d(const ActivityField& f, double center) {
    std::vector<double> base = f.breakpoints_1d();
    base.push_back(center);
    std::vector<double> out = base;
    const Potential& p = f.potential();
    if (p.is_hard_core()) {
        for (int k = 1; k <= 3; ++k) {
            for (double b : base) {
                out.push_back(b - k * p.range());
                out.push_back(b + k * p.range());
            }
        }
        // A core edge x +- k r meets the mirrored hat edge 2 center - x.
        for (int k = 1; k <= 6; ++k) {
            out.push_back(center - 0.5 * k * p.range());
            out.push_back(center + 0.5 * k * p.range());
        }
    }
    return out;
}

LogPartitionEstimate log_partition_via_identity(const ActivityField& f, const Point& center, int depth,
                                                const RecursionParams& params, const QuadratureScheme& outer) {
    LogPartitionEstimate est;
    est.depth = depth;
    est.in_certified_region = static_cast<bool>(params.containment);
    std::vector<double> breaks;
    if (f.support().dimension() == 1) breaks = outer_breakpoints_1d(f, center[0]);
    for (const auto& node : region_nodes(f.support(), outer, breaks)) {
        const RootResult r = evaluate_root(f.hat_at(node.x, center), node.x, depth, params);
        est.value += node.weight * r.value;
        est.tree_nodes += r.nodes;
        est.max_abs_intermediate = std::max(est.max_abs_intermediate, r.max_abs);
        est.in_certified_region = est.in_certified_region && r.contained;
    }
    return est;
}

LogPartitionEstimate log_partition_via_identity(const ActivityField& f, const Point& center, int depth,
                                                const RecursionParams& params) {
    return log_partition_via_identity(f, center, depth, params, params.scheme);
}

cplx kpoint_density_telescoping(const ActivityField& f, std::span<const Point> points, int depth,
                                const RecursionParams& params) {
    if (points.empty()) throw std::invalid_argument("k-point density needs at least one point");
    cplx product = 1.0;
    ActivityField current = f;
    for (const auto& v : points) {
        const cplx rho = evaluate_root(current, v, depth, params).value;
        product *= rho;
        if (product == 0.0) return 0.0;
        current = current.discount_at(v);
    }
    return product;
}

}  // namespace gasrec
