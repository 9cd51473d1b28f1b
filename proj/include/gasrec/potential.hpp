#pragma once

#include "gasrec/point.hpp"

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace gasrec {

enum class PotentialKind { hard_core, gaussian, exponential_decay, tabulated };

std::string to_string(PotentialKind kind);
PotentialKind parse_potential_kind(const std::string& name);

struct TablePoint {
    double radius;
    double value;
};

/// Repulsive, symmetric, tempered pair potential phi(x) = phi(|x|).
///
///   hard-core          +inf for |x| < range, 0 otherwise
///   gaussian           amplitude * exp(-(|x| / range)^2)
///   exponential-decay  amplitude * exp(-|x| / range)
///   tabulated          piecewise-linear in |x| through the table points
///
/// Infinite-range kinds are cut off at the radius where the Mayer function
/// drops below `mayer_cutoff_tol`; see `support_radius()`.
class Potential {
public:
    static constexpr double kDefaultCutoffTol = 1e-12;

    static Potential hard_core(int dimension, double diameter);
    static Potential gaussian(int dimension, double amplitude, double scale,
                              double mayer_cutoff_tol = kDefaultCutoffTol);
    static Potential exponential_decay(int dimension, double amplitude, double scale,
                                       double mayer_cutoff_tol = kDefaultCutoffTol);
    static Potential tabulated(int dimension, std::vector<TablePoint> table);
    /// phi == 0 (ideal gas); represented as a gaussian with zero amplitude.
    static Potential ideal(int dimension);

    PotentialKind kind() const { return kind_; }
    int dimension() const { return dim_; }
    double range() const { return range_; }
    double amplitude() const { return amplitude_; }
    double mayer_cutoff_tol() const { return cutoff_tol_; }
    const std::vector<TablePoint>& table() const { return table_; }

    bool is_hard_core() const { return kind_ == PotentialKind::hard_core; }
    /// True when phi vanishes identically.
    bool is_null() const { return null_; }

    /// phi as a function of the distance s = |x|.
    double at_radius(double s) const;
    double operator()(const Point& x) const { return at_radius(x.norm()); }

    /// 1 - exp(-phi), exactly 1 inside a hard core and exactly 0 where phi = 0.
    double mayer_at_radius(double s) const;
    double mayer(const Point& x) const { return mayer_at_radius(x.norm()); }

    /// exp(-phi), the Boltzmann factor of a pair at distance s.
    double boltzmann_at_radius(double s) const;

    /// Radius beyond which the Mayer function is treated as 0.
    double support_radius() const { return support_radius_; }

private:
    Potential() = default;
    void finish();

    PotentialKind kind_ = PotentialKind::hard_core;
    int dim_ = 1;
    double range_ = 0.0;
    double amplitude_ = 0.0;
    double cutoff_tol_ = kDefaultCutoffTol;
    std::vector<TablePoint> table_;
    double support_radius_ = 0.0;
    bool null_ = false;
};

/// Reads a two-column (radius, value) table; '#' starts a comment.
Potential load_tabulated_potential(const std::filesystem::path& path, int dimension);

double unit_ball_volume(int dimension);
/// Radius of the d-dimensional ball of volume 1.
double unit_volume_radius(int dimension);

struct TemperednessReport {
    double value = 0.0;
    /// Upper bound on the Mayer mass beyond the cutoff radius.
    double tail_bound = 0.0;
    double cutoff_radius = 0.0;
};

/// C_phi = integral of the Mayer function over R^d. Closed form for hard cores,
/// adaptive quadrature (relative tolerance 1e-8) for the rest.
double temperedness_constant(const Potential& p);
TemperednessReport temperedness_report(const Potential& p);
/// Always uses radial quadrature, also for hard cores.
double temperedness_by_quadrature(const Potential& p);

/// e / C_phi; +inf for the ideal gas.
double critical_activity(const Potential& p);

}  // namespace gasrec
