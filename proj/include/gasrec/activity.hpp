#pragma once

#include "gasrec/point.hpp"
#include "gasrec/potential.hpp"
#include "gasrec/region.hpp"

#include <complex>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace gasrec {

using cplx = std::complex<double>;

enum class ModMode { discount, annihilate };

/// Ball-shaped change of the activity: inside dist(center, x) < radius the
/// activity is multiplied by exp(-phi(center - x)) (discount) or set to 0.
struct Modification {
    Point center;
    double radius = std::numeric_limits<double>::infinity();
    ModMode mode = ModMode::discount;
};

/// Constant activity on an axis-parallel box of the base field.
struct ActivityBox {
    Point lo;
    Point hi;
    cplx value;
};

/// Complex activity function on a region: a base field (constant, or
/// piecewise constant over boxes) times an ordered stack of modifications.
/// Fields are immutable; every modifier returns a new field sharing the
/// existing stack as its tail.
class ActivityField {
public:
    ActivityField(std::shared_ptr<const Potential> potential, Region support, cplx lambda);
    /// Piecewise-constant base: the first box containing x wins, `background`
    /// applies elsewhere in the support.
    ActivityField(std::shared_ptr<const Potential> potential, Region support, std::vector<ActivityBox> boxes,
                  cplx background = 0.0);

    cplx operator()(const Point& x) const;

    ActivityField discount_at(const Point& v) const;
    /// lambda_{v->w}: discount around v restricted to dist(v, x) < dist(v, w).
    ActivityField restrict_toward(const Point& v, const Point& w) const;
    /// Annihilates the open ball of radius dist(center, x) around `center`.
    ActivityField hat_at(const Point& x, const Point& center) const;
    ActivityField hat_at(const Point& x) const { return hat_at(x, Point::origin(x.dimension())); }
    /// Boundary condition: one full discount per outside point.
    ActivityField apply_boundary(std::span<const Point> boundary) const;
    ActivityField with(const Modification& m) const;
    /// Same field with every base value multiplied by `factor`.
    ActivityField scaled(cplx factor) const;
    /// Same modifications on a constant base `lambda`.
    ActivityField with_constant_base(cplx lambda) const;

    const Potential& potential() const { return *potential_; }
    const std::shared_ptr<const Potential>& potential_ptr() const { return potential_; }
    const Region& support() const { return support_; }

    /// sup |base| over the support.
    double sup_base() const;
    /// True for a constant base without modifications.
    bool is_constant() const;
    bool has_boxes() const { return static_cast<bool>(boxes_); }
    /// Constant base value (meaningful when there are no boxes).
    cplx constant_value() const { return background_; }
    bool is_real() const;
    std::size_t modification_count() const { return mod_count_; }
    /// Modifications, most recent first.
    std::vector<Modification> modifications() const;

    /// Points of R where the field (d = 1) may be non-smooth: support ends, box
    /// edges, modification ball edges and discount centers.
    std::vector<double> breakpoints_1d() const;

private:
    struct StackNode {
        Modification mod;
        double effective_radius;
        std::shared_ptr<const StackNode> next;
    };

    cplx base_at(const Point& x) const;

    std::shared_ptr<const Potential> potential_;
    Region support_;
    std::shared_ptr<const std::vector<ActivityBox>> boxes_;
    cplx background_ = 0.0;
    std::shared_ptr<const StackNode> mods_;
    std::size_t mod_count_ = 0;
};

}  // namespace gasrec
