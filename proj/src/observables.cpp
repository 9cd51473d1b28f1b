#include "gasrec/observables.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace gasrec {

namespace {

double constant_lambda(const ActivityField& f) {
    if (!f.is_real()) throw std::invalid_argument("observables need a real activity");
    if (f.has_boxes()) throw std::invalid_argument("observables need a constant base activity");
    return f.constant_value().real();
}

Point hat_center(const ActivityField& f, const ObservableParams& params) {
    return params.hat_center.value_or(Point::origin(f.support().dimension()));
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

}  // namespace

std::string to_string(Engine engine) { return engine == Engine::recursion ? "recursion" : "oracle"; }

Engine parse_engine(const std::string& name) {
    if (name == "recursion") return Engine::recursion;
    if (name == "oracle") return Engine::oracle;
    throw std::invalid_argument("unknown engine " + name);
}

double pressure_finite_volume(const ActivityField& f, const ObservableParams& params) {
    if (!f.is_real()) throw std::invalid_argument("observables need a real activity");
    const double volume = f.support().volume();
    if (f.sup_base() == 0.0) return 0.0;
    if (params.engine == Engine::oracle) {
        return std::log(partition_series(f, params.oracle).value.real()) / volume;
    }
    return log_partition_via_identity(f, hat_center(f, params), params.depth, params.recursion, params.outer)
               .value.real() /
           volume;
}

double density_from_pressure(const ActivityField& f, double h, const ObservableParams& params) {
    const double lambda = constant_lambda(f);
    if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    if (!(lambda - h > 0.0)) throw std::invalid_argument("finite-difference step reaches lambda <= 0");
    auto diff = [&](double step) {
        const double up = pressure_finite_volume(f.with_constant_base(lambda + step), params);
        const double down = pressure_finite_volume(f.with_constant_base(lambda - step), params);
        return (up - down) / (2.0 * step);
    };
    const double d = params.richardson ? (4.0 * diff(0.5 * h) - diff(h)) / 3.0 : diff(h);
    return lambda * d;
}

double density_from_pressure(const ActivityField& f, const ObservableParams& params) {
    const double lambda = constant_lambda(f);
    if (lambda == 0.0) return 0.0;
    return density_from_pressure(f, params.relative_step * lambda, params);
}

double integrated_recursion_density(const ActivityField& f, const ObservableParams& params) {
    std::vector<double> breaks;
    if (f.support().dimension() == 1) breaks = outer_breakpoints_1d(f, hat_center(f, params)[0]);
    double sum = 0.0;
    for (const auto& node : region_nodes(f.support(), params.outer, breaks)) {
        sum += node.weight * density(f, node.x, params.depth, params.recursion).value.real();
    }
    return sum / f.support().volume();
}

PackingConstants packing_constants(int dimension) {
    if (dimension < 1) throw std::invalid_argument("dimension must be positive");
    PackingConstants c;
    c.critical_packing = std::numbers::e / (1.0 + std::numbers::e) * std::pow(2.0, -dimension);
    return c;
}

std::optional<double> packing_density(const Potential& p, double density) {
    if (!p.is_hard_core()) return std::nullopt;
    return density * unit_ball_volume(p.dimension()) * std::pow(0.5 * p.range(), p.dimension());
}

ThermoPoint thermo_point(const ActivityField& f, const ObservableParams& params) {
    ThermoPoint t;
    t.lambda = constant_lambda(f);
    t.source = params.engine;
    t.depth = params.engine == Engine::recursion ? params.depth : 0;
    t.truncation = params.engine == Engine::oracle ? params.oracle.truncation : 0;
    t.pressure = pressure_finite_volume(f, params);
    t.density = density_from_pressure(f, params);
    t.packing_density = packing_density(f.potential(), t.density);
    return t;
}

std::string thermo_csv_header() { return "lambda,pressure,density,packing_density,engine,depth,K"; }

std::string thermo_csv_row(const ThermoPoint& t) {
    return fmt(t.lambda) + "," + fmt(t.pressure) + "," + fmt(t.density) + "," +
           (t.packing_density ? fmt(*t.packing_density) : std::string()) + "," + to_string(t.source) + "," +
           std::to_string(t.depth) + "," + std::to_string(t.truncation);
}

}  // namespace gasrec
