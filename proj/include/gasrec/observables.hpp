#pragma once

#include "gasrec/oracle.hpp"
#include "gasrec/recursion.hpp"

#include <optional>
#include <string>

namespace gasrec {

enum class Engine { recursion, oracle };

std::string to_string(Engine engine);
Engine parse_engine(const std::string& name);

struct ObservableParams {
    Engine engine = Engine::oracle;
    /// Recursion engine: depth, tree rules, volume rule and hat center
    /// (the origin when unset).
    int depth = 5;
    RecursionParams recursion;
    QuadratureScheme outer{8};
    std::optional<Point> hat_center;
    OracleParams oracle;
    /// Relative finite-difference step: h = relative_step * lambda.
    double relative_step = 1e-3;
    /// Combine steps h and h/2 to cancel the O(h^2) term.
    bool richardson = false;
};

/// (1/|Lambda|) log Z(f) for a real activity.
double pressure_finite_volume(const ActivityField& f, const ObservableParams& params = {});

/// lambda times the centered difference of the pressure in the constant base
/// activity lambda, with step `h`.
double density_from_pressure(const ActivityField& f, double h, const ObservableParams& params = {});
double density_from_pressure(const ActivityField& f, const ObservableParams& params = {});

/// (1/|Lambda|) int rho(x) dx with the recursion density, using `outer`.
double integrated_recursion_density(const ActivityField& f, const ObservableParams& params = {});

struct PackingConstants {
    /// e / (1 + e) 2^-d.
    double critical_packing = 0.0;
    double reference_d2 = 0.18276;
};

PackingConstants packing_constants(int dimension);

/// Fraction of space covered by the cores, density * V_d (r/2)^d; empty for
/// potentials without a hard core.
std::optional<double> packing_density(const Potential& p, double density);

struct ThermoPoint {
    double lambda = 0.0;
    double pressure = 0.0;
    double density = 0.0;
    std::optional<double> packing_density;
    Engine source = Engine::oracle;
    int depth = 0;
    int truncation = 0;
};

ThermoPoint thermo_point(const ActivityField& f, const ObservableParams& params = {});

/// "lambda,pressure,density,packing_density,engine,depth,K".
std::string thermo_csv_header();
std::string thermo_csv_row(const ThermoPoint& t);

}  // namespace gasrec
