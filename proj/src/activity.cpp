#include "gasrec/activity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gasrec {

ActivityField::ActivityField(std::shared_ptr<const Potential> potential, Region support, cplx lambda)
    : potential_(std::move(potential)), support_(std::move(support)), background_(lambda) {
    if (!potential_) throw std::invalid_argument("activity field needs a potential");
    if (support_.dimension() != potential_->dimension()) {
        throw std::invalid_argument("region and potential dimensions differ");
    }
}

ActivityField::ActivityField(std::shared_ptr<const Potential> potential, Region support,
                             std::vector<ActivityBox> boxes, cplx background)
    : ActivityField(std::move(potential), std::move(support), background) {
    for (const auto& b : boxes) {
        if (b.lo.dimension() != support_.dimension() || b.hi.dimension() != support_.dimension()) {
            throw std::invalid_argument("activity box dimension differs from region");
        }
    }
    boxes_ = std::make_shared<const std::vector<ActivityBox>>(std::move(boxes));
}

cplx ActivityField::base_at(const Point& x) const {
    if (boxes_) {
        for (const auto& b : *boxes_) {
            bool inside = true;
            for (int i = 0; i < x.dimension() && inside; ++i) inside = x[i] >= b.lo[i] && x[i] < b.hi[i];
            if (inside) return b.value;
        }
    }
    return background_;
}

cplx ActivityField::operator()(const Point& x) const {
    if (!support_.contains(x)) return 0.0;
    cplx value = base_at(x);
    if (value == 0.0) return value;
    double factor = 1.0;
    for (const StackNode* n = mods_.get(); n != nullptr; n = n->next.get()) {
        const double s = dist(n->mod.center, x);
        if (!(s < n->effective_radius)) continue;
        if (n->mod.mode == ModMode::annihilate) return 0.0;
        factor *= potential_->boltzmann_at_radius(s);
        if (factor == 0.0) return 0.0;
    }
    return value * factor;
}

ActivityField ActivityField::with(const Modification& m) const {
    if (m.center.dimension() != support_.dimension()) {
        throw std::invalid_argument("modification center dimension differs from region");
    }
    if (!(m.radius >= 0.0)) throw std::invalid_argument("modification radius must be nonnegative");
    ActivityField out = *this;
    // Beyond the Mayer support a discount factor is 1.
    const double eff = m.mode == ModMode::discount ? std::min(m.radius, potential_->support_radius()) : m.radius;
    out.mods_ = std::make_shared<const StackNode>(StackNode{m, eff, mods_});
    out.mod_count_ = mod_count_ + 1;
    return out;
}

ActivityField ActivityField::discount_at(const Point& v) const {
    return with({v, std::numeric_limits<double>::infinity(), ModMode::discount});
}

ActivityField ActivityField::restrict_toward(const Point& v, const Point& w) const {
    if (v == w) throw std::invalid_argument("degenerate restriction");
    return with({v, dist(v, w), ModMode::discount});
}

ActivityField ActivityField::hat_at(const Point& x, const Point& center) const {
    return with({center, dist(center, x), ModMode::annihilate});
}

ActivityField ActivityField::apply_boundary(std::span<const Point> boundary) const {
    ActivityField out = *this;
    for (const auto& y : boundary) {
        if (support_.contains(y)) throw std::invalid_argument("boundary point inside region");
        out = out.discount_at(y);
    }
    return out;
}

ActivityField ActivityField::scaled(cplx factor) const {
    ActivityField out = *this;
    out.background_ *= factor;
    if (boxes_) {
        auto boxes = *boxes_;
        for (auto& b : boxes) b.value *= factor;
        out.boxes_ = std::make_shared<const std::vector<ActivityBox>>(std::move(boxes));
    }
    return out;
}

ActivityField ActivityField::with_constant_base(cplx lambda) const {
    ActivityField out = *this;
    out.boxes_.reset();
    out.background_ = lambda;
    return out;
}

double ActivityField::sup_base() const {
    double s = std::abs(background_);
    if (boxes_) {
        for (const auto& b : *boxes_) s = std::max(s, std::abs(b.value));
    }
    return s;
}

bool ActivityField::is_constant() const { return !boxes_ && !mods_; }

bool ActivityField::is_real() const {
    if (background_.imag() != 0.0) return false;
    if (boxes_) {
        for (const auto& b : *boxes_) {
            if (b.value.imag() != 0.0) return false;
        }
    }
    return true;
}

std::vector<Modification> ActivityField::modifications() const {
    std::vector<Modification> out;
    for (const StackNode* n = mods_.get(); n != nullptr; n = n->next.get()) out.push_back(n->mod);
    return out;
}

std::vector<double> ActivityField::breakpoints_1d() const {
    std::vector<double> b{support_.lower()[0], support_.upper()[0]};
    if (boxes_) {
        for (const auto& box : *boxes_) {
            b.push_back(box.lo[0]);
            b.push_back(box.hi[0]);
        }
    }
    const bool smooth_center = potential_->is_hard_core();
    for (const StackNode* n = mods_.get(); n != nullptr; n = n->next.get()) {
        const double c = n->mod.center[0];
        if (std::isfinite(n->effective_radius)) {
            b.push_back(c - n->effective_radius);
            b.push_back(c + n->effective_radius);
        }
        if (n->mod.mode == ModMode::discount && !smooth_center) b.push_back(c);
    }
    return b;
}

}  // namespace gasrec
