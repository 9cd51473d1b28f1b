#include "gasrec/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace gasrec {

namespace {

constexpr double kE = std::numbers::e;

const double kTop = std::log1p(kE);

cplx principal_log(cplx w) {
    if (w.imag() == 0.0 && w.real() <= 0.0) throw std::domain_error("outside principal domain");
    return std::log(w);
}

// 1 + C lambda e exp(-e^z), the argument of the logarithm in g.
cplx g_argument(cplx lambda, cplx z, double c_phi) { return 1.0 + c_phi * lambda * kE * std::exp(-std::exp(z)); }

std::vector<cplx> boundary(double s, double eps, int n) {
    std::vector<cplx> out(static_cast<std::size_t>(n));
    sample_neighborhood_boundary(s, eps, n, out);
    return out;
}

struct SweepResult {
    double max_abs = 0.0;
    bool right_half_plane = true;
};

// |g'| over boundary(N(top, eps2)) x boundary(N(lambda0, eps1)).
SweepResult sweep_gprime(double lambda0, double c_phi, double eps1, double eps2, int n) {
    SweepResult r;
    const auto zs = boundary(kTop, eps2, n);
    const auto ls = boundary(lambda0, eps1, n);
    for (const cplx& lambda : ls) {
        for (const cplx& z : zs) {
            const cplx den = g_argument(lambda, z, c_phi);
            if (!(den.real() > 0.0)) r.right_half_plane = false;
            r.max_abs = std::max(r.max_abs, std::abs(g_prime(lambda, z, c_phi)));
        }
    }
    return r;
}

// |dg/dlambda| over boundary(N(lambda0, eps1)) x [-eps2, top].
SweepResult sweep_glambda(double lambda0, double c_phi, double eps1, double eps2, int n) {
    SweepResult r;
    const auto ls = boundary(lambda0, eps1, n);
    for (int i = 0; i < n; ++i) {
        const double z = -eps2 + (kTop + eps2) * i / (n - 1);
        for (const cplx& lambda : ls) {
            const cplx den = g_argument(lambda, z, c_phi);
            if (!(den.real() > 0.0)) r.right_half_plane = false;
            r.max_abs = std::max(r.max_abs, std::abs(g_lambda_derivative(lambda, z, c_phi)));
        }
    }
    return r;
}

struct Attempt {
    bool ok = false;
    double eps1 = 0.0;
    double gprime = 0.0;
    double glambda = 0.0;
};

Attempt attempt(double lambda0, double c_phi, double delta, double eps2, int n) {
    Attempt a;
    // eps1 is tied to eps2 through the lambda-derivative bound; the maximum
    // over the larger lambda set N(lambda0, eps2) bounds the one we keep, and
    // the factor 2 absorbs the sampling gap between the two boundaries.
    const SweepResult wide = sweep_glambda(lambda0, c_phi, eps2, eps2, n);
    if (!wide.right_half_plane) return a;
    a.eps1 = eps2 * std::min(1.0, delta / (8.0 * std::max(wide.max_abs, 1e-300)));
    const SweepResult lam = sweep_glambda(lambda0, c_phi, a.eps1, eps2, n);
    const SweepResult gp = sweep_gprime(lambda0, c_phi, a.eps1, eps2, n);
    a.glambda = lam.max_abs;
    a.gprime = gp.max_abs;
    a.ok = lam.right_half_plane && gp.right_half_plane && gp.max_abs <= 1.0 - delta / 2.0 &&
           lam.max_abs <= delta * eps2 / (4.0 * a.eps1);
    return a;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

}  // namespace

cplx psi(cplx x, double c_phi) { return principal_log(1.0 + c_phi * x); }

cplx psi_inv(cplx z, double c_phi) { return (std::exp(z) - 1.0) / c_phi; }

cplx g(cplx lambda, cplx z, double c_phi) { return principal_log(g_argument(lambda, z, c_phi)); }

cplx g_prime(cplx lambda, cplx z, double c_phi) {
    const cplx ez = std::exp(z);
    const cplx t = c_phi * lambda * kE * std::exp(-ez);
    return -t * ez / (1.0 + t);
}

cplx g_lambda_derivative(cplx lambda, cplx z, double c_phi) {
    const cplx w = c_phi * kE * std::exp(-std::exp(z));
    return w / (1.0 + lambda * w);
}

double delta_bound(double lambda0, double c_phi) {
    if (!(c_phi > 0.0)) throw std::invalid_argument("temperedness constant must be positive");
    if (lambda0 < 0.0) throw std::invalid_argument("activity must be nonnegative");
    if (lambda0 >= kE / c_phi) throw std::domain_error("supercritical activity");
    const double beta_max = c_phi * kE * lambda0;
    auto objective = [](double beta) { return (1.0 - beta / (kE * kE)) / (1.0 + beta * kE); };
    double best = objective(beta_max);
    constexpr int points = 10'000;
    for (int i = 0; i < points; ++i) best = std::min(best, objective(beta_max * i / (points - 1)));
    return best;
}

double distance_to_segment(cplx z, double s) {
    const double x = std::clamp(z.real(), 0.0, s);
    return std::abs(z - cplx(x, 0.0));
}

void sample_neighborhood_boundary(double s, double eps, int n, std::span<cplx> out) {
    if (n <= 0) return;
    const double perimeter = 2.0 * s + 2.0 * std::numbers::pi * eps;
    for (int i = 0; i < n; ++i) {
        double t = perimeter * i / n;
        cplx p;
        if (t < s) {
            p = {t, -eps};
        } else if ((t -= s) < std::numbers::pi * eps) {
            const double a = -0.5 * std::numbers::pi + t / eps;
            p = cplx(s, 0.0) + std::polar(eps, a);
        } else if ((t -= std::numbers::pi * eps) < s) {
            p = {s - t, eps};
        } else {
            t -= s;
            const double a = 0.5 * std::numbers::pi + t / eps;
            p = std::polar(eps, a);
        }
        out[static_cast<std::size_t>(i)] = p;
    }
}

ContractionCertificate certify_neighborhood(double lambda0, double c_phi, int grid_resolution) {
    if (!(c_phi > 0.0)) throw std::invalid_argument("temperedness constant must be positive");
    if (lambda0 < 0.0) throw std::invalid_argument("activity must be nonnegative");
    if (grid_resolution < 8) throw std::invalid_argument("grid resolution must be at least 8");
    ContractionCertificate cert;
    cert.lambda0 = lambda0;
    cert.c_phi = c_phi;
    cert.grid_resolution = grid_resolution;
    const int n = grid_resolution;

    if (lambda0 >= kE / c_phi) {
        // No delta exists; report the real-section maximum that rules it out.
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const double lambda = lambda0 * i / (n - 1);
            for (int j = 0; j < n; ++j) {
                const double z = kTop * j / (n - 1);
                worst = std::max(worst, std::abs(g_prime(lambda, z, c_phi)));
            }
        }
        cert.max_abs_gprime_on_grid = worst;
        return cert;
    }

    cert.delta = delta_bound(lambda0, c_phi);
    double lo = 0.0;
    Attempt best;
    double hi = 1.0;
    Attempt top = attempt(lambda0, c_phi, cert.delta, hi, n);
    if (top.ok) {
        lo = hi;
        best = top;
    } else {
        // Geometric bisection: the admissible eps2 can be many orders below 1.
        double a = 1e-12;
        Attempt bottom = attempt(lambda0, c_phi, cert.delta, a, n);
        if (!bottom.ok) return cert;
        lo = a;
        best = bottom;
        for (int it = 0; it < 60 && hi / lo > 1.0 + 1e-6; ++it) {
            const double mid = std::sqrt(lo * hi);
            const Attempt m = attempt(lambda0, c_phi, cert.delta, mid, n);
            if (m.ok) {
                lo = mid;
                best = m;
            } else {
                hi = mid;
            }
        }
    }

    cert.eps2 = lo;
    cert.eps1 = best.eps1;
    cert.eps3 = cert.eps2 * (1.0 - cert.delta / 4.0);
    cert.max_abs_gprime_on_grid = best.gprime;
    cert.max_abs_glambda_on_grid = best.glambda;
    double modulus = 0.0;
    for (const cplx& z : boundary(kTop, cert.eps2, 4 * n)) modulus = std::max(modulus, std::abs(psi_inv(z, c_phi)));
    cert.u2_modulus_bound = modulus;
    cert.passed = true;
    return cert;
}

bool in_u2(const ContractionCertificate& cert, cplx rho) {
    const cplx w = 1.0 + cert.c_phi * rho;
    if (w.imag() == 0.0 && w.real() <= 0.0) return false;
    return distance_to_segment(std::log(w), kTop) <= cert.eps2;
}

bool in_activity_neighborhood(const ContractionCertificate& cert, cplx lambda) {
    return distance_to_segment(lambda, cert.lambda0) <= cert.eps1;
}

std::string serialize(const ContractionCertificate& cert) {
    std::ostringstream out;
    out << "lambda0 = " << fmt(cert.lambda0) << '\n'
        << "c_phi = " << fmt(cert.c_phi) << '\n'
        << "eps1 = " << fmt(cert.eps1) << '\n'
        << "eps2 = " << fmt(cert.eps2) << '\n'
        << "eps3 = " << fmt(cert.eps3) << '\n'
        << "delta = " << fmt(cert.delta) << '\n'
        << "grid_resolution = " << cert.grid_resolution << '\n'
        << "max_abs_gprime_on_grid = " << fmt(cert.max_abs_gprime_on_grid) << '\n'
        << "max_abs_glambda_on_grid = " << fmt(cert.max_abs_glambda_on_grid) << '\n'
        << "u2_modulus_bound = " << fmt(cert.u2_modulus_bound) << '\n'
        << "passed = " << (cert.passed ? "true" : "false") << '\n';
    return out.str();
}

ContractionCertificate parse_certificate(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto get = [&kv](const char* key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) throw std::invalid_argument(std::string("certificate lacks key ") + key);
        return it->second;
    };
    ContractionCertificate c;
    c.lambda0 = std::stod(get("lambda0"));
    c.c_phi = std::stod(get("c_phi"));
    c.eps1 = std::stod(get("eps1"));
    c.eps2 = std::stod(get("eps2"));
    c.eps3 = std::stod(get("eps3"));
    c.delta = std::stod(get("delta"));
    c.grid_resolution = std::stoi(get("grid_resolution"));
    c.max_abs_gprime_on_grid = std::stod(get("max_abs_gprime_on_grid"));
    c.max_abs_glambda_on_grid = std::stod(get("max_abs_glambda_on_grid"));
    c.u2_modulus_bound = std::stod(get("u2_modulus_bound"));
    const std::string& passed = get("passed");
    if (passed != "true" && passed != "false") throw std::invalid_argument("passed must be true or false");
    c.passed = passed == "true";
    return c;
}

bool convexity_probe(double radius, double eps, int samples) {
    if (samples <= 0) return true;
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&] {
        const double t = radius * unit(rng);
        const double rr = eps * std::sqrt(unit(rng));
        const double a = 2.0 * std::numbers::pi * unit(rng);
        return cplx(t, 0.0) + std::polar(rr, a);
    };
    for (int i = 0; i < samples; ++i) {
        const cplx z1 = draw();
        const cplx z2 = draw();
        const cplx m = 0.5 * (std::exp(z1) + std::exp(z2));
        if (m == 0.0) return false;
        const cplx base = std::log(m);
        double best = std::numeric_limits<double>::infinity();
        for (int k = -1; k <= 1; ++k) {
            best = std::min(best, distance_to_segment(base + cplx(0.0, 2.0 * std::numbers::pi * k), radius));
        }
        if (best > eps + 1e-9) return false;
    }
    return true;
}

cplx effective_coordinate(std::span<const cplx> z_values, std::span<const double> weights) {
    if (z_values.size() != weights.size()) throw std::invalid_argument("values and weights differ in length");
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("not a probability vector");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("not a probability vector");
    cplx sum = 0.0;
    for (std::size_t i = 0; i < z_values.size(); ++i) sum += weights[i] * std::exp(z_values[i]);
    return principal_log(sum);
}

}  // namespace gasrec
