#pragma once

#include "gasrec/point.hpp"
#include "gasrec/potential.hpp"
#include "gasrec/region.hpp"

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace gasrec {

using cplx = std::complex<double>;
using PointFunction = std::function<cplx(const Point&)>;

enum class QuadratureRule { gauss_legendre, midpoint };

std::string to_string(QuadratureRule rule);
QuadratureRule parse_quadrature_rule(const std::string& name);

struct QuadratureScheme {
    int order_per_dimension = 32;
    QuadratureRule rule = QuadratureRule::gauss_legendre;
    /// Radial sub-layers of the Mayer support (soft potentials, d >= 2 balls).
    int radial_layers = 1;
};

/// Default orders: 32 nodes per dimension in d = 1, 16 in d = 2, 8 above.
QuadratureScheme default_scheme(int dimension);

struct Node1D {
    double x;
    double w;
};

/// Rule nodes on [-1, 1]. Gauss-Legendre tables are computed once and cached.
const std::vector<Node1D>& rule_nodes(QuadratureRule rule, int n);

struct WeightedNode {
    Point x;
    double weight;
};

/// Keeps or drops a 1D piece [lo, hi] before nodes are placed on it.
using PieceFilter = std::function<bool(double lo, double hi)>;

/// Quadrature nodes for integrals over Lambda. In d = 1 the interval is split
/// at every breakpoint inside it and each piece gets its own rule.
std::vector<WeightedNode> region_nodes(const Region& region, const QuadratureScheme& q,
                                       std::span<const double> breakpoints_1d = {});

/// Nodes for integral of f(w) * mayer(v - w) over the Mayer support around v
/// clipped to Lambda. Weights already include the Mayer factor; nodes outside
/// Lambda or with vanishing Mayer factor are dropped.
std::vector<WeightedNode> mayer_ball_nodes(const Potential& p, const Point& v, const Region& region,
                                           const QuadratureScheme& q,
                                           std::span<const double> breakpoints_1d = {},
                                           const PieceFilter& keep = {});

cplx integrate_region(const PointFunction& f, const Region& region, const QuadratureScheme& q,
                      std::span<const double> breakpoints_1d = {});

cplx integrate_mayer_ball(const PointFunction& f, const Potential& p, const Point& v,
                          const Region& region, const QuadratureScheme& q);

/// Sorted, de-duplicated breakpoints clipped to the open interval (lo, hi),
/// with lo and hi themselves at the ends.
std::vector<double> piece_edges(double lo, double hi, std::span<const double> breakpoints);

}  // namespace gasrec
