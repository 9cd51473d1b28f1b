#pragma once

#include "gasrec/activity.hpp"
#include "gasrec/quadrature.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace gasrec {

/// Tuning of the depth-truncated density recursion.
struct RecursionParams {
    /// Rule and order used at the root of the recursion tree.
    QuadratureScheme scheme{16};
    /// Level-j order is max(min_order, ceil(order * order_decay^j)). Errors made
    /// j levels down reach the root damped by the contraction, so deep levels
    /// can use coarser rules.
    double order_decay = 0.6;
    int min_order = 1;
    /// Branches with quadrature weight x Mayer factor below this are skipped.
    double prune_tol = 1e-10;
    /// Maximum number of tree nodes a single call may visit.
    std::uint64_t node_budget = 400'000'000;
    /// Execution contexts for the top tree level; the sum is taken in node order.
    int threads = 1;
    /// Optional membership test applied to every intermediate density value.
    std::function<bool(cplx)> containment;
};

/// Order used at recursion level `level` (root = 0).
int order_at_level(const RecursionParams& params, int level);

struct DensityEstimate {
    cplx value = 0.0;
    int depth = 0;
    QuadratureScheme scheme;
    /// |value(depth) - value(depth - 1)|; 0 at depth 0.
    double last_step_delta = 0.0;
    /// All intermediates passed `containment` (false when no test was given).
    bool in_certified_region = false;
    std::uint64_t tree_nodes = 0;
    double max_abs_intermediate = 0.0;
};

/// lambda * exp(-integral of rho(w) * mayer(v - w) over the Mayer ball around v).
cplx apply_F(cplx lambda, const PointFunction& rho, const Potential& p, const Point& v, const Region& region,
             const QuadratureScheme& q);

/// Depth-truncated density. Depth 0 is the activity at v; depth k applies F
/// to the depth-(k-1) densities of the restricted fields lambda_{v->w}.
DensityEstimate density(const ActivityField& f, const Point& v, int depth, const RecursionParams& params = {});

/// Densities for depths 0..max_depth.
std::vector<DensityEstimate> density_sequence(const ActivityField& f, const Point& v, int max_depth,
                                              const RecursionParams& params = {});

struct LogPartitionEstimate {
    cplx value = 0.0;
    int depth = 0;
    bool in_certified_region = false;
    std::uint64_t tree_nodes = 0;
    double max_abs_intermediate = 0.0;
};

/// log Z(f) as the integral over the support of the density at x of the
/// field annihilated inside the ball of radius dist(center, x) about `center`.
/// `outer` is the rule for the volume integral.
LogPartitionEstimate log_partition_via_identity(const ActivityField& f, const Point& center, int depth,
                                                const RecursionParams& params,
                                                const QuadratureScheme& outer);
LogPartitionEstimate log_partition_via_identity(const ActivityField& f, const Point& center, int depth,
                                                const RecursionParams& params = {});

/// k-point density as the product of one-point densities of the fields
/// discounted successively at v_1, ..., v_{j-1}.
cplx kpoint_density_telescoping(const ActivityField& f, std::span<const Point> points, int depth,
                                const RecursionParams& params = {});

/// Volume-integral breakpoints for the 1D outer integral: field breakpoints,
/// the hat center, and their shifts by multiples of the interaction range.
std::vector<double> outer_breakpoints_1d(const ActivityField& f, double center);

}  // namespace gasrec
