#pragma once

#include "gasrec/point.hpp"

#include <string>

namespace gasrec {

enum class RegionKind { interval, box, ball };

/// Bounded region Lambda with closed-form volume.
class Region {
public:
    static Region interval(double lo, double hi);
    /// Axis-parallel box [lo_0, hi_0] x ... in lo.dimension() dimensions.
    static Region box(const Point& lo, const Point& hi);
    static Region ball(const Point& center, double radius);

    RegionKind kind() const { return kind_; }
    int dimension() const { return lo_.dimension(); }
    double volume() const;
    double diameter() const;
    bool contains(const Point& x) const;

    /// Bounding box corners (exact for intervals and boxes).
    const Point& lower() const { return lo_; }
    const Point& upper() const { return hi_; }

    const Point& center() const { return center_; }
    double radius() const { return radius_; }

    std::string describe() const;

private:
    Region() = default;

    RegionKind kind_ = RegionKind::interval;
    Point lo_;
    Point hi_;
    Point center_;
    double radius_ = 0.0;
};

}  // namespace gasrec
