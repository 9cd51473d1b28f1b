#include "gasrec/potential.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace gasrec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Potential value below which 1 - exp(-phi) < tol.
double phi_threshold(double tol) { return -std::log1p(-tol); }

double sphere_area(int d) { return d * unit_ball_volume(d); }

}  // namespace

std::string to_string(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::hard_core: return "hard-core";
        case PotentialKind::gaussian: return "gaussian";
        case PotentialKind::exponential_decay: return "exponential-decay";
        case PotentialKind::tabulated: return "tabulated";
    }
    return "unknown";
}

PotentialKind parse_potential_kind(const std::string& name) {
    if (name == "hard-core") return PotentialKind::hard_core;
    if (name == "gaussian") return PotentialKind::gaussian;
    if (name == "exponential-decay") return PotentialKind::exponential_decay;
    if (name == "tabulated") return PotentialKind::tabulated;
    throw std::invalid_argument("unknown potential kind '" + name + "'");
}

Potential Potential::hard_core(int dimension, double diameter) {
    if (!(diameter > 0.0)) throw std::invalid_argument("hard-core diameter must be positive");
    Potential p;
    p.kind_ = PotentialKind::hard_core;
    p.dim_ = dimension;
    p.range_ = diameter;
    p.finish();
    return p;
}

Potential Potential::gaussian(int dimension, double amplitude, double scale, double mayer_cutoff_tol) {
    if (!(amplitude >= 0.0)) throw std::invalid_argument("amplitude must be nonnegative");
    if (!(scale > 0.0)) throw std::invalid_argument("range must be positive");
    Potential p;
    p.kind_ = PotentialKind::gaussian;
    p.dim_ = dimension;
    p.range_ = scale;
    p.amplitude_ = amplitude;
    p.cutoff_tol_ = mayer_cutoff_tol;
    p.finish();
    return p;
}

Potential Potential::exponential_decay(int dimension, double amplitude, double scale,
                                       double mayer_cutoff_tol) {
    Potential p = gaussian(dimension, amplitude, scale, mayer_cutoff_tol);
    p.kind_ = PotentialKind::exponential_decay;
    p.finish();
    return p;
}

Potential Potential::tabulated(int dimension, std::vector<TablePoint> table) {
    if (table.size() < 2) throw std::invalid_argument("tabulated potential needs at least two rows");
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (!(table[i].radius >= 0.0)) throw std::invalid_argument("table radius must be nonnegative");
        if (!(table[i].value >= 0.0) || !std::isfinite(table[i].value)) {
            throw std::invalid_argument("table values must be finite and nonnegative");
        }
        if (i > 0 && !(table[i].radius > table[i - 1].radius)) {
            throw std::invalid_argument("table radii must be strictly increasing");
        }
    }
    Potential p;
    p.kind_ = PotentialKind::tabulated;
    p.dim_ = dimension;
    p.table_ = std::move(table);
    p.range_ = p.table_.back().radius;
    p.finish();
    return p;
}

Potential Potential::ideal(int dimension) { return gaussian(dimension, 0.0, 1.0); }

void Potential::finish() {
    if (dim_ < 1) throw std::invalid_argument("dimension must be positive");
    switch (kind_) {
        case PotentialKind::hard_core:
            null_ = false;
            support_radius_ = range_;
            break;
        case PotentialKind::gaussian: {
            null_ = amplitude_ == 0.0;
            const double t = phi_threshold(cutoff_tol_);
            support_radius_ = (null_ || amplitude_ <= t)
                                  ? 0.0
                                  : range_ * std::sqrt(std::log(amplitude_ / t));
            break;
        }
        case PotentialKind::exponential_decay: {
            null_ = amplitude_ == 0.0;
            const double t = phi_threshold(cutoff_tol_);
            support_radius_ = (null_ || amplitude_ <= t) ? 0.0 : range_ * std::log(amplitude_ / t);
            break;
        }
        case PotentialKind::tabulated: {
            // Last radius carrying a positive value, or the next row if it exists.
            std::size_t last_pos = table_.size();
            for (std::size_t i = 0; i < table_.size(); ++i) {
                if (table_[i].value > 0.0) last_pos = i;
            }
            null_ = last_pos == table_.size();
            support_radius_ = null_ ? 0.0 : table_[std::min(last_pos + 1, table_.size() - 1)].radius;
            break;
        }
    }
}

double Potential::at_radius(double s) const {
    switch (kind_) {
        case PotentialKind::hard_core:
            return s < range_ ? kInf : 0.0;
        case PotentialKind::gaussian:
            if (null_) return 0.0;
            return amplitude_ * std::exp(-(s / range_) * (s / range_));
        case PotentialKind::exponential_decay:
            if (null_) return 0.0;
            return amplitude_ * std::exp(-s / range_);
        case PotentialKind::tabulated: {
            const auto& t = table_;
            if (s < t.front().radius) throw std::out_of_range("untabulated radius");
            if (s == t.back().radius) return t.back().value;
            if (s > t.back().radius) {
                // A table ending in 0 describes a finite-range potential.
                if (t.back().value == 0.0) return 0.0;
                throw std::out_of_range("untabulated radius");
            }
            auto hi = std::upper_bound(t.begin(), t.end(), s,
                                       [](double v, const TablePoint& tp) { return v < tp.radius; });
            auto lo = hi - 1;
            const double frac = (s - lo->radius) / (hi->radius - lo->radius);
            return lo->value + frac * (hi->value - lo->value);
        }
    }
    return 0.0;
}

double Potential::mayer_at_radius(double s) const {
    const double phi = at_radius(s);
    if (phi == 0.0) return 0.0;
    if (phi == kInf) return 1.0;
    return -std::expm1(-phi);
}

double Potential::boltzmann_at_radius(double s) const {
    const double phi = at_radius(s);
    if (phi == 0.0) return 1.0;
    if (phi == kInf) return 0.0;
    return std::exp(-phi);
}

Potential load_tabulated_potential(const std::filesystem::path& path, int dimension) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open potential table '" + path.string() + "'");
    std::vector<TablePoint> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double r = 0.0;
        double v = 0.0;
        if (!(ls >> r)) continue;
        if (!(ls >> v)) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
        }
        rows.push_back({r, v});
    }
    return Potential::tabulated(dimension, std::move(rows));
}

double unit_ball_volume(int d) {
    const double half = 0.5 * d;
    return std::exp(half * std::log(std::numbers::pi) - std::lgamma(half + 1.0));
}

double unit_volume_radius(int d) { return std::pow(1.0 / unit_ball_volume(d), 1.0 / d); }

double temperedness_by_quadrature(const Potential& p) {
    if (p.is_null()) return 0.0;
    const int d = p.dimension();
    auto integrand = [&](double s) { return p.mayer_at_radius(s) * std::pow(s, d - 1); };

    std::vector<double> breaks{0.0};
    if (p.kind() == PotentialKind::tabulated) {
        for (const auto& row : p.table()) {
            if (row.radius > 0.0 && row.radius < p.support_radius()) breaks.push_back(row.radius);
        }
    }
    breaks.push_back(p.support_radius());

    constexpr double kRelTol = 1e-8;
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double err = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            integrand, breaks[i], breaks[i + 1], 15, kRelTol * 1e-2, &err);
        total_err += err;
    }
    if (!std::isfinite(total) || total_err > kRelTol * std::abs(total)) {
        throw std::runtime_error("temperedness integral did not converge");
    }
    return sphere_area(d) * total;
}

TemperednessReport temperedness_report(const Potential& p) {
    TemperednessReport rep;
    rep.cutoff_radius = p.support_radius();
    if (p.is_hard_core()) {
        rep.value = unit_ball_volume(p.dimension()) * std::pow(p.range(), p.dimension());
        return rep;
    }
    rep.value = temperedness_by_quadrature(p);
    // 1 - exp(-phi) <= phi, so the tail of phi majorizes the Mayer tail.
    const int d = p.dimension();
    const double R = rep.cutoff_radius;
    const double a = p.amplitude();
    const double r = p.range();
    switch (p.kind()) {
        case PotentialKind::gaussian:
            if (!p.is_null()) {
                rep.tail_bound = sphere_area(d) * a * 0.5 * std::pow(r, d) *
                                 boost::math::tgamma(0.5 * d, (R / r) * (R / r));
            }
            break;
        case PotentialKind::exponential_decay:
            if (!p.is_null()) {
                rep.tail_bound = sphere_area(d) * a * std::pow(r, d) * boost::math::tgamma(double(d), R / r);
            }
            break;
        default:
            break;
    }
    return rep;
}

double temperedness_constant(const Potential& p) { return temperedness_report(p).value; }

double critical_activity(const Potential& p) {
    const double c = temperedness_constant(p);
    if (c == 0.0) return kInf;
    return std::numbers::e / c;
}

}  // namespace gasrec
