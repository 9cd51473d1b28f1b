#include "gasrec/region.hpp"

#include "gasrec/potential.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gasrec {

Region Region::interval(double lo, double hi) { return box(Point{lo}, Point{hi}); }

Region Region::box(const Point& lo, const Point& hi) {
    if (lo.dimension() != hi.dimension()) throw std::invalid_argument("box corner dimensions differ");
    for (int i = 0; i < lo.dimension(); ++i) {
        if (!(hi[i] > lo[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i])) {
            throw std::invalid_argument("region must have positive finite extent");
        }
    }
    Region r;
    r.kind_ = lo.dimension() == 1 ? RegionKind::interval : RegionKind::box;
    r.lo_ = lo;
    r.hi_ = hi;
    r.center_ = Point(lo.dimension());
    for (int i = 0; i < lo.dimension(); ++i) r.center_[i] = 0.5 * (lo[i] + hi[i]);
    return r;
}

Region Region::ball(const Point& center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("ball radius must be positive");
    Region r;
    r.kind_ = RegionKind::ball;
    r.center_ = center;
    r.radius_ = radius;
    r.lo_ = Point(center.dimension());
    r.hi_ = Point(center.dimension());
    for (int i = 0; i < center.dimension(); ++i) {
        r.lo_[i] = center[i] - radius;
        r.hi_[i] = center[i] + radius;
    }
    return r;
}

double Region::volume() const {
    if (kind_ == RegionKind::ball) return unit_ball_volume(dimension()) * std::pow(radius_, dimension());
    double v = 1.0;
    for (int i = 0; i < dimension(); ++i) v *= hi_[i] - lo_[i];
    return v;
}

double Region::diameter() const {
    if (kind_ == RegionKind::ball) return 2.0 * radius_;
    return dist(lo_, hi_);
}

bool Region::contains(const Point& x) const {
    if (x.dimension() != dimension()) return false;
    if (kind_ == RegionKind::ball) return dist(x, center_) <= radius_;
    for (int i = 0; i < dimension(); ++i) {
        if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
    }
    return true;
}

std::string Region::describe() const {
    std::ostringstream os;
    os.precision(9);
    if (kind_ == RegionKind::ball) {
        os << "ball(center=(";
        for (int i = 0; i < dimension(); ++i) os << (i ? "," : "") << center_[i];
        os << "), radius=" << radius_ << ")";
        return os.str();
    }
    os << (kind_ == RegionKind::interval ? "interval" : "box") << "(";
    for (int i = 0; i < dimension(); ++i) os << (i ? " x " : "") << "[" << lo_[i] << "," << hi_[i] << "]";
    os << ")";
    return os.str();
}

}  // namespace gasrec
