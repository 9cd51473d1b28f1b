#include "cli_app.hpp"

#include "gasrec/contraction.hpp"
#include "gasrec/mc_validator.hpp"
#include "gasrec/observables.hpp"
#include "gasrec/oracle.hpp"
#include "gasrec/recursion.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace gasrec::cli {

namespace {

namespace pt = boost::property_tree;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- output

using Cell = std::variant<std::monostate, double, std::int64_t, std::uint64_t, std::string, bool>;

std::string fmt9(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add(std::vector<Cell> row) {
        if (row.size() != columns_.size()) throw std::logic_error("row width differs from header");
        rows_.push_back(std::move(row));
    }

    std::string render(const std::string& format) const {
        std::ostringstream out;
        if (format == "csv") {
            for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
            out << '\n';
            for (const auto& row : rows_) {
                for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
                out << '\n';
            }
        } else {
            for (const auto& row : rows_) {
                nlohmann::ordered_json j;
                for (std::size_t i = 0; i < row.size(); ++i) j[columns_[i]] = json_cell(row[i]);
                out << j.dump() << '\n';
            }
        }
        return out.str();
    }

private:
    static std::string csv_cell(const Cell& c) {
        struct V {
            std::string operator()(std::monostate) const { return ""; }
            std::string operator()(double x) const { return fmt9(x); }
            std::string operator()(std::int64_t x) const { return std::to_string(x); }
            std::string operator()(std::uint64_t x) const { return std::to_string(x); }
            std::string operator()(const std::string& s) const { return s; }
            std::string operator()(bool b) const { return b ? "true" : "false"; }
        };
        return std::visit(V{}, c);
    }

    static nlohmann::ordered_json json_cell(const Cell& c) {
        struct V {
            nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
            nlohmann::ordered_json operator()(double x) const {
                if (!std::isfinite(x)) return nullptr;
                return std::stod(fmt9(x));
            }
            nlohmann::ordered_json operator()(std::int64_t x) const { return x; }
            nlohmann::ordered_json operator()(std::uint64_t x) const { return x; }
            nlohmann::ordered_json operator()(const std::string& s) const { return s; }
            nlohmann::ordered_json operator()(bool b) const { return b; }
        };
        return std::visit(V{}, c);
    }

    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

std::string point_label(const Point& p) {
    std::string s;
    for (int i = 0; i < p.dimension(); ++i) s += (i ? " " : "") + fmt9(p[i]);
    return s;
}

// ---------------------------------------------------------------- config

struct RunConfig {
    // [potential]
    std::string potential_kind = "hard-core";
    int dimension = 1;
    std::optional<double> range;
    double amplitude = 1.0;
    std::string table_path;
    double cutoff_tol = Potential::kDefaultCutoffTol;
    bool normalized = false;
    // [region]
    std::string region_kind;
    std::vector<double> lo, hi, center;
    double radius = 0.0;
    // [activity]
    double lambda_re = 1.0;
    double lambda_im = 0.0;
    std::vector<ActivityBox> boxes;
    std::vector<Point> boundary;
    // [engine]
    Engine engine = Engine::oracle;
    int depth = 5;
    RecursionParams recursion;
    int outer_order = 8;
    std::optional<Point> hat_center;
    OracleParams oracle;
    std::optional<double> lambda0;
    int grid_resolution = 256;
    bool containment = false;
    std::vector<double> lambdas;
    std::vector<Point> points;
    double relative_step = 1e-3;
    bool richardson = false;
    McConfig mc;
    // [output]
    std::string format = "csv";
    std::string path;

    std::shared_ptr<const Potential> potential;
    std::optional<Region> region;
    std::optional<ActivityField> field;
};

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"potential", {"kind", "dimension", "range", "amplitude", "table", "cutoff_tol", "normalized"}},
        {"region", {"kind", "lo", "hi", "center", "radius"}},
        {"activity", {"lambda", "lambda_imag", "boundary"}},
        {"engine",
         {"engine", "depth", "order", "order_decay", "min_order", "outer_order", "rule", "radial_layers",
          "prune_tol", "node_budget", "hat_center", "truncation", "samples_per_order", "shifts", "nested_order",
          "nested_order_nd", "lambda0", "grid_resolution", "containment", "lambdas", "points", "relative_step",
          "richardson", "mc_steps", "mc_burn_in", "mc_chains", "mc_thinning", "mc_bins", "mc_batches",
          "probe_radius", "seed", "threads"}},
        {"output", {"format", "path"}},
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

double to_double(const std::string& key, const std::string& text) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + text + "'");
    }
    if (trim(text.substr(pos)) != "") throw ConfigError(key + ": not a number: '" + text + "'");
    return v;
}

std::int64_t to_int(const std::string& key, const std::string& text) {
    const double v = to_double(key, text);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ConfigError(key + ": not an integer: '" + text + "'");
    return static_cast<std::int64_t>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(key + ": not a boolean: '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& part : split(text, ',')) out.push_back(to_double(key, part));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

Point to_point(const std::string& key, const std::string& text, int dimension) {
    const auto coords = to_list(key, text);
    if (static_cast<int>(coords.size()) != dimension) {
        throw ConfigError(key + ": expected " + std::to_string(dimension) + " coordinates");
    }
    Point p(dimension);
    for (int i = 0; i < dimension; ++i) p[i] = coords[static_cast<std::size_t>(i)];
    return p;
}

std::vector<Point> to_points(const std::string& key, const std::string& text, int dimension) {
    std::vector<Point> out;
    for (const auto& part : split(text, ';')) out.push_back(to_point(key, part, dimension));
    return out;
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {
        for (const auto& [section, body] : tree) {
            const auto it = known_keys().find(section);
            if (it == known_keys().end()) throw ConfigError("unknown section [" + section + "]");
            if (!body.data().empty() && body.empty()) throw ConfigError("key outside a section: " + section);
            for (const auto& [key, value] : body) {
                const bool box = section == "activity" && key.rfind("box", 0) == 0;
                if (!box && !it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
            }
        }
    }

    std::optional<std::string> get(const std::string& path) const {
        const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(path, '.'));
        if (!v) return std::nullopt;
        return trim(*v);
    }

    const pt::ptree& tree() const { return tree_; }

private:
    const pt::ptree& tree_;
};

template <class F>
void with(const Reader& r, const std::string& key, F&& f) {
    if (auto v = r.get(key)) f(*v);
}

RunConfig read_config(const std::string& path) {
    if (path.empty()) throw ConfigError("--config is required");
    if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path);
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    const Reader r(tree);
    RunConfig c;

    with(r, "potential.kind", [&](const std::string& v) { c.potential_kind = v; });
    with(r, "potential.dimension", [&](const std::string& v) { c.dimension = static_cast<int>(to_int("potential.dimension", v)); });
    if (c.dimension < 1 || c.dimension > kMaxDimension) {
        throw ConfigError("potential.dimension must be between 1 and " + std::to_string(kMaxDimension));
    }
    with(r, "potential.range", [&](const std::string& v) { c.range = to_double("potential.range", v); });
    with(r, "potential.amplitude", [&](const std::string& v) { c.amplitude = to_double("potential.amplitude", v); });
    with(r, "potential.table", [&](const std::string& v) { c.table_path = v; });
    with(r, "potential.cutoff_tol", [&](const std::string& v) { c.cutoff_tol = to_double("potential.cutoff_tol", v); });
    with(r, "potential.normalized", [&](const std::string& v) { c.normalized = to_bool("potential.normalized", v); });

    const int d = c.dimension;
    c.region_kind = d == 1 ? "interval" : "box";
    with(r, "region.kind", [&](const std::string& v) { c.region_kind = v; });
    with(r, "region.lo", [&](const std::string& v) { c.lo = to_list("region.lo", v); });
    with(r, "region.hi", [&](const std::string& v) { c.hi = to_list("region.hi", v); });
    with(r, "region.center", [&](const std::string& v) { c.center = to_list("region.center", v); });
    with(r, "region.radius", [&](const std::string& v) { c.radius = to_double("region.radius", v); });

    with(r, "activity.lambda", [&](const std::string& v) { c.lambda_re = to_double("activity.lambda", v); });
    with(r, "activity.lambda_imag", [&](const std::string& v) { c.lambda_im = to_double("activity.lambda_imag", v); });
    with(r, "activity.boundary", [&](const std::string& v) { c.boundary = to_points("activity.boundary", v, d); });
    if (const auto act = tree.get_child_optional("activity")) {
        for (const auto& [key, value] : *act) {
            if (key.rfind("box", 0) != 0) continue;
            const std::string name = "activity." + key;
            const auto parts = split(value.data(), '|');
            if (parts.size() != 3 && parts.size() != 4) throw ConfigError(name + ": expected lo | hi | re [| im]");
            ActivityBox b{to_point(name, parts[0], d), to_point(name, parts[1], d),
                          cplx(to_double(name, parts[2]), parts.size() == 4 ? to_double(name, parts[3]) : 0.0)};
            c.boxes.push_back(b);
        }
    }

    with(r, "engine.engine", [&](const std::string& v) {
        try {
            c.engine = parse_engine(v);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("engine.engine: ") + e.what());
        }
    });
    auto int_key = [&](const std::string& key, auto& target, std::int64_t min) {
        with(r, key, [&](const std::string& v) {
            const auto x = to_int(key, v);
            if (x < min) throw ConfigError(key + ": must be at least " + std::to_string(min));
            target = static_cast<std::remove_reference_t<decltype(target)>>(x);
        });
    };
    auto positive_key = [&](const std::string& key, double& target) {
        with(r, key, [&](const std::string& v) {
            target = to_double(key, v);
            if (!(target > 0.0)) throw ConfigError(key + ": must be positive");
        });
    };
    int_key("engine.depth", c.depth, 0);
    int_key("engine.order", c.recursion.scheme.order_per_dimension, 1);
    positive_key("engine.order_decay", c.recursion.order_decay);
    if (c.recursion.order_decay > 1.0) throw ConfigError("engine.order_decay: must not exceed 1");
    int_key("engine.min_order", c.recursion.min_order, 1);
    int_key("engine.outer_order", c.outer_order, 1);
    int_key("engine.radial_layers", c.recursion.scheme.radial_layers, 1);
    with(r, "engine.rule", [&](const std::string& v) {
        try {
            c.recursion.scheme.rule = parse_quadrature_rule(v);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("engine.rule: ") + e.what());
        }
    });
    with(r, "engine.prune_tol", [&](const std::string& v) {
        c.recursion.prune_tol = to_double("engine.prune_tol", v);
        if (c.recursion.prune_tol < 0.0) throw ConfigError("engine.prune_tol: must be nonnegative");
    });
    int_key("engine.node_budget", c.recursion.node_budget, 1);
    with(r, "engine.hat_center", [&](const std::string& v) { c.hat_center = to_point("engine.hat_center", v, d); });
    int_key("engine.truncation", c.oracle.truncation, 1);
    int_key("engine.samples_per_order", c.oracle.samples_per_order, 1);
    int_key("engine.shifts", c.oracle.shifts, 1);
    int_key("engine.nested_order", c.oracle.nested_order_1d, 1);
    int_key("engine.nested_order_nd", c.oracle.nested_order_nd, 1);
    with(r, "engine.lambda0", [&](const std::string& v) {
        c.lambda0 = to_double("engine.lambda0", v);
        if (*c.lambda0 < 0.0) throw ConfigError("engine.lambda0: must be nonnegative");
    });
    int_key("engine.grid_resolution", c.grid_resolution, 8);
    with(r, "engine.containment", [&](const std::string& v) { c.containment = to_bool("engine.containment", v); });
    with(r, "engine.lambdas", [&](const std::string& v) { c.lambdas = to_list("engine.lambdas", v); });
    with(r, "engine.points", [&](const std::string& v) { c.points = to_points("engine.points", v, d); });
    positive_key("engine.relative_step", c.relative_step);
    with(r, "engine.richardson", [&](const std::string& v) { c.richardson = to_bool("engine.richardson", v); });
    int_key("engine.mc_steps", c.mc.steps, 1);
    int_key("engine.mc_burn_in", c.mc.burn_in, 0);
    int_key("engine.mc_chains", c.mc.chains, 1);
    int_key("engine.mc_thinning", c.mc.thinning, 1);
    int_key("engine.mc_bins", c.mc.histogram_bins, 1);
    int_key("engine.mc_batches", c.mc.batches, 2);
    positive_key("engine.probe_radius", c.mc.probe_radius);
    int_key("engine.seed", c.mc.seed, 0);
    int_key("engine.threads", c.mc.threads, 1);

    with(r, "output.format", [&](const std::string& v) { c.format = v; });
    with(r, "output.path", [&](const std::string& v) { c.path = v; });
    return c;
}

// Builds the potential, region and activity field; every failure here is a
// configuration error.
void build(RunConfig& c) {
    const int d = c.dimension;
    try {
        const PotentialKind kind = parse_potential_kind(c.potential_kind);
        const bool needs_range = kind != PotentialKind::tabulated && !(kind == PotentialKind::hard_core && c.normalized);
        if (needs_range && !c.range) throw ConfigError("potential.range is required for " + c.potential_kind);
        switch (kind) {
            case PotentialKind::hard_core:
                c.potential = std::make_shared<const Potential>(
                    Potential::hard_core(d, c.normalized ? unit_volume_radius(d) : *c.range));
                break;
            case PotentialKind::gaussian:
                c.potential = std::make_shared<const Potential>(Potential::gaussian(d, c.amplitude, *c.range, c.cutoff_tol));
                break;
            case PotentialKind::exponential_decay:
                c.potential = std::make_shared<const Potential>(
                    Potential::exponential_decay(d, c.amplitude, *c.range, c.cutoff_tol));
                break;
            case PotentialKind::tabulated:
                if (c.table_path.empty()) throw ConfigError("potential.table is required for tabulated");
                if (!std::filesystem::exists(c.table_path)) throw ConfigError("table file not found: " + c.table_path);
                c.potential = std::make_shared<const Potential>(load_tabulated_potential(c.table_path, d));
                break;
        }

        if (c.region_kind == "interval" || c.region_kind == "box") {
            if (c.lo.empty() || c.hi.empty()) throw ConfigError("region.lo and region.hi are required");
            if (static_cast<int>(c.lo.size()) != d || static_cast<int>(c.hi.size()) != d) {
                throw ConfigError("region bounds need " + std::to_string(d) + " coordinates");
            }
            if (d == 1) {
                c.region = Region::interval(c.lo[0], c.hi[0]);
            } else {
                Point lo(d), hi(d);
                for (int i = 0; i < d; ++i) {
                    lo[i] = c.lo[static_cast<std::size_t>(i)];
                    hi[i] = c.hi[static_cast<std::size_t>(i)];
                }
                c.region = Region::box(lo, hi);
            }
        } else if (c.region_kind == "ball") {
            if (static_cast<int>(c.center.size()) != d) throw ConfigError("region.center needs " + std::to_string(d) + " coordinates");
            Point center(d);
            for (int i = 0; i < d; ++i) center[i] = c.center[static_cast<std::size_t>(i)];
            c.region = Region::ball(center, c.radius);
        } else {
            throw ConfigError("unknown region kind " + c.region_kind);
        }

        const cplx lambda(c.lambda_re, c.lambda_im);
        ActivityField f = c.boxes.empty() ? ActivityField(c.potential, *c.region, lambda)
                                          : ActivityField(c.potential, *c.region, c.boxes, lambda);
        c.field = f.apply_boundary(c.boundary);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    if (c.format != "csv" && c.format != "jsonl") throw ConfigError("output format must be csv or jsonl");
    const double nodes = (c.depth + 1.0) * std::pow(static_cast<double>(c.recursion.scheme.order_per_dimension), d);
    if (nodes >= static_cast<double>(c.recursion.node_budget)) {
        throw ConfigError("depth x order^d exceeds the node budget");
    }
    try {
        validate(c.mc);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("engine.mc: ") + e.what());
    }
    if (!c.path.empty()) {
        const auto parent = std::filesystem::path(c.path).parent_path();
        if (!parent.empty() && !std::filesystem::is_directory(parent)) {
            throw ConfigError("output directory does not exist: " + parent.string());
        }
    }
}

void require_constant_real(const RunConfig& c, const std::string& command) {
    if (!c.boxes.empty() || c.lambda_im != 0.0) {
        throw ConfigError(command + " needs a constant real activity");
    }
}

void require_nonnegative_real(const RunConfig& c, const std::string& command) {
    if (c.lambda_im != 0.0 || c.lambda_re < 0.0) throw ConfigError(command + " needs a real nonnegative activity");
    for (const auto& b : c.boxes) {
        if (b.value.imag() != 0.0 || b.value.real() < 0.0) {
            throw ConfigError(command + " needs a real nonnegative activity");
        }
    }
}

std::vector<Point> probe_points(const RunConfig& c) {
    if (!c.points.empty()) return c.points;
    const Region& r = *c.region;
    Point mid(r.dimension());
    for (int i = 0; i < r.dimension(); ++i) mid[i] = 0.5 * (r.lower()[i] + r.upper()[i]);
    return {mid};
}

ObservableParams observable_params(const RunConfig& c, Engine engine) {
    ObservableParams p;
    p.engine = engine;
    p.depth = c.depth;
    p.recursion = c.recursion;
    p.outer = QuadratureScheme{c.outer_order, c.recursion.scheme.rule, c.recursion.scheme.radial_layers};
    p.hat_center = c.hat_center;
    p.oracle = c.oracle;
    p.relative_step = c.relative_step;
    p.richardson = c.richardson;
    return p;
}

// ---------------------------------------------------------------- commands

std::string cmd_cphi(const RunConfig& c) {
    const auto report = temperedness_report(*c.potential);
    Table t({"c_phi", "critical_activity", "tail_bound", "cutoff_radius"});
    t.add({report.value, critical_activity(*c.potential), report.tail_bound, report.cutoff_radius});
    return t.render(c.format);
}

std::string cmd_certify(const RunConfig& c) {
    const double c_phi = temperedness_constant(*c.potential);
    if (!(c_phi > 0.0)) throw ConfigError("certify needs a potential with positive C_phi");
    const double lambda0 = c.lambda0.value_or(c.lambda_re);
    const ContractionCertificate cert = certify_neighborhood(lambda0, c_phi, c.grid_resolution);
    if (c.format == "csv") return serialize(cert);
    Table t({"lambda0", "c_phi", "eps1", "eps2", "eps3", "delta", "grid_resolution", "max_abs_gprime_on_grid",
             "max_abs_glambda_on_grid", "u2_modulus_bound", "passed"});
    t.add({cert.lambda0, cert.c_phi, cert.eps1, cert.eps2, cert.eps3, cert.delta,
           static_cast<std::int64_t>(cert.grid_resolution), cert.max_abs_gprime_on_grid, cert.max_abs_glambda_on_grid,
           cert.u2_modulus_bound, cert.passed});
    return t.render(c.format);
}

std::string cmd_density(const RunConfig& c) {
    RecursionParams params = c.recursion;
    std::optional<ContractionCertificate> cert;
    if (c.containment) {
        const double c_phi = temperedness_constant(*c.potential);
        if (!(c_phi > 0.0)) throw ConfigError("containment needs a potential with positive C_phi");
        cert = certify_neighborhood(c.lambda0.value_or(c.lambda_re), c_phi, c.grid_resolution);
        if (!cert->passed) throw std::runtime_error("certificate failed; containment is undefined");
        params.containment = [cert](cplx rho) { return in_u2(*cert, rho); };
    }
    Table t({"point", "depth", "density_re", "density_im", "last_step_delta", "tree_nodes", "in_certified_region"});
    for (const auto& v : probe_points(c)) {
        for (const auto& e : density_sequence(*c.field, v, c.depth, params)) {
            t.add({point_label(v), static_cast<std::int64_t>(e.depth), e.value.real(), e.value.imag(), e.last_step_delta,
                   static_cast<std::uint64_t>(e.tree_nodes), cert ? Cell(e.in_certified_region) : Cell{}});
        }
    }
    return t.render(c.format);
}

std::string cmd_pressure(const RunConfig& c) {
    require_constant_real(c, "pressure");
    const ObservableParams params = observable_params(c, c.engine);
    const std::vector<double> lambdas = c.lambdas.empty() ? std::vector<double>{c.lambda_re} : c.lambdas;
    for (double l : lambdas) {
        if (l < 0.0) throw ConfigError("pressure needs nonnegative activities");
    }
    Table t({"lambda", "pressure", "density", "packing_density", "engine", "depth", "K"});
    for (double l : lambdas) {
        const ThermoPoint p = thermo_point(c.field->with_constant_base(l), params);
        t.add({p.lambda, p.pressure, p.density, p.packing_density ? Cell(*p.packing_density) : Cell{},
               to_string(p.source), static_cast<std::int64_t>(p.depth), static_cast<std::int64_t>(p.truncation)});
    }
    return t.render(c.format);
}

std::string cmd_zeros(const RunConfig& c) {
    if (!c.boxes.empty()) throw ConfigError("zeros needs a constant base activity");
    const PartitionPolynomial poly = partition_polynomial(*c.field, c.oracle);
    const double crit = critical_activity(*c.potential);
    Table t({"index", "re", "im", "abs", "distance_to_critical_segment"});
    std::int64_t i = 0;
    for (const cplx& z : partition_zeros(poly)) {
        t.add({i++, z.real(), z.imag(), std::abs(z), distance_to_segment(z, crit)});
    }
    return t.render(c.format);
}

std::string cmd_oracle(const RunConfig& c) {
    const PartitionSeries s = partition_series(*c.field, c.oracle);
    Table t({"quantity", "re", "im", "stderr"});
    double var = 0.0;
    for (std::size_t k = 0; k < s.terms.size(); ++k) {
        t.add({"term_" + std::to_string(k), s.terms[k].real(), s.terms[k].imag(), s.term_stderr[k]});
        var += s.term_stderr[k] * s.term_stderr[k];
    }
    t.add({std::string("Z"), s.value.real(), s.value.imag(), std::sqrt(var)});
    t.add({std::string("tail_estimate"), s.tail_estimate, Cell{}, Cell{}});
    for (const auto& v : c.points) {
        const cplx rho = density_oracle(*c.field, v, c.oracle);
        t.add({"density@" + point_label(v), rho.real(), rho.imag(), Cell{}});
    }
    if (c.boxes.empty() && c.lambda_im == 0.0 && c.lambda_re >= 0.0 && c.field->modifications().empty()) {
        const MeanDensity m = mean_density(*c.field, c.oracle);
        t.add({std::string("mean_density"), m.value, Cell{}, Cell{}});
        t.add({std::string("mean_density_lower_bound"), m.lower_bound, Cell{}, Cell{}});
        t.add({std::string("mean_density_margin"), m.margin, Cell{}, Cell{}});
    }
    return t.render(c.format);
}

std::string cmd_mc(const RunConfig& c) {
    require_nonnegative_real(c, "mc");
    const McResult r = run_birth_death(*c.field, c.mc);
    if (c.format == "jsonl") return chains_jsonl(r, c.mc);
    Table t({"chain", "stream_key", "steps", "burn_in", "mean_count", "stderr", "acceptance_rate"});
    for (const auto& ch : r.chains) {
        t.add({static_cast<std::int64_t>(ch.chain), ch.stream_key, ch.steps, c.mc.burn_in, ch.mean_count,
               ch.mean_count_stderr, ch.acceptance_rate});
    }
    return t.render(c.format);
}

std::string cmd_compare(const RunConfig& c) {
    require_constant_real(c, "compare");
    require_nonnegative_real(c, "compare");
    if (!c.field->modifications().empty()) throw ConfigError("compare does not support boundary points");
    const Point v = probe_points(c).front();
    const ActivityField& f = *c.field;
    const double volume = c.region->volume();

    const double rec_point = density(f, v, c.depth, c.recursion).value.real();
    const double orc_point = density_oracle(f, v, c.oracle).real();
    McConfig mc = c.mc;
    mc.probe = v;
    const McResult sim = run_birth_death(f, mc);

    const ObservableParams rec = observable_params(c, Engine::recursion);
    const double rec_integrated = integrated_recursion_density(f, rec);
    const double rec_from_pressure = density_from_pressure(f, rec);
    const double rec_pressure = pressure_finite_volume(f, rec);
    const double orc_mean = mean_density(f, c.oracle).value;
    const double orc_pressure = pressure_finite_volume(f, observable_params(c, Engine::oracle));
    const double mc_mean = sim.mean_count / volume;
    const double mc_mean_se = sim.mean_count_stderr / volume;

    Table t({"quantity", "recursion", "oracle", "mc", "mc_stderr", "recursion_minus_oracle", "mc_minus_oracle"});
    t.add({"point_density@" + point_label(v), rec_point, orc_point, sim.probe_density, sim.probe_density_stderr,
           rec_point - orc_point, sim.probe_density - orc_point});
    t.add({std::string("mean_density_integrated"), rec_integrated, orc_mean, mc_mean, mc_mean_se,
           rec_integrated - orc_mean, mc_mean - orc_mean});
    t.add({std::string("mean_density_from_pressure"), rec_from_pressure, orc_mean, mc_mean, mc_mean_se,
           rec_from_pressure - orc_mean, mc_mean - orc_mean});
    t.add({std::string("pressure"), rec_pressure, orc_pressure, Cell{}, Cell{}, rec_pressure - orc_pressure, Cell{}});
    return t.render(c.format);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Densities, pressures and zero-free certificates for repulsive gasses"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_path;
    std::string format;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    app.add_option("--config", config_path, "configuration file");
    app.add_option("--out", out_path, "output file (default: stdout)");
    app.add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    app.add_option("--seed", seed, "Monte Carlo seed");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    std::optional<double> lambda0;
    std::optional<std::string> point;
    std::optional<int> depth;
    std::map<std::string, std::function<std::string(const RunConfig&)>> commands{
        {"cphi", cmd_cphi},       {"certify", cmd_certify}, {"density", cmd_density}, {"pressure", cmd_pressure},
        {"zeros", cmd_zeros},     {"oracle", cmd_oracle},   {"mc", cmd_mc},           {"compare", cmd_compare},
    };
    const std::map<std::string, std::string> help{
        {"cphi", "print C_phi and the critical activity e / C_phi"},
        {"certify", "certify a contraction neighborhood around lambda0"},
        {"density", "recursion density at the configured points, one row per depth"},
        {"pressure", "finite-volume pressure and density on an activity grid"},
        {"zeros", "complex zeros of the partition polynomial"},
        {"oracle", "truncated grand-canonical series"},
        {"mc", "birth-death Monte Carlo chains"},
        {"compare", "recursion, oracle and Monte Carlo side by side"},
    };
    for (const auto& [name, fn] : commands) {
        auto* sub = app.add_subcommand(name, help.at(name));
        sub->fallthrough();
        if (name == "certify") sub->add_option("--lambda0", lambda0, "center of the activity neighborhood");
        if (name == "density") {
            sub->add_option("--point", point, "evaluation point, coordinates separated by commas");
            sub->add_option("--depth", depth, "recursion depth")->check(CLI::NonNegativeNumber);
        }
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    std::string name;
    for (const auto* sub : app.get_subcommands()) name = sub->get_name();

    RunConfig config;
    try {
        config = read_config(config_path);
        if (!out_path.empty()) config.path = out_path;
        if (!format.empty()) config.format = format;
        if (seed) config.mc.seed = *seed;
        if (threads) {
            config.mc.threads = *threads;
            config.recursion.threads = *threads;
        }
        if (lambda0) {
            if (*lambda0 < 0.0) throw ConfigError("--lambda0 must be nonnegative");
            config.lambda0 = *lambda0;
        }
        if (point) config.points = {to_point("--point", *point, config.dimension)};
        if (depth) config.depth = *depth;
        build(config);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    std::string text;
    try {
        text = commands.at(name)(config);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }

    if (config.path.empty()) {
        out << text;
    } else {
        std::ofstream file(config.path, std::ios::binary | std::ios::trunc);
        file << text;
        if (!file) {
            err << "error: cannot write " << config.path << '\n';
            return kRuntimeError;
        }
    }
    return kSuccess;
}

}  // namespace gasrec::cli
