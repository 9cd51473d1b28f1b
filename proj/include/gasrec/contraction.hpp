#pragma once

#include <complex>
#include <span>
#include <string>

namespace gasrec {

using cplx = std::complex<double>;

// Scalar machinery behind the zero-free region. In the coordinates
// z = psi(rho) = log(1 + C rho) the density map F acts on constant fields as
//
//   g_lambda(z) = log(1 + C lambda e * exp(-e^z)),
//
// whose derivative has modulus at most 1 at lambda = e / C and strictly less
// below it.

/// log(1 + C x), principal branch. Throws "outside principal domain" when
/// 1 + C x is a nonpositive real.
cplx psi(cplx x, double c_phi);
cplx psi_inv(cplx z, double c_phi);

cplx g(cplx lambda, cplx z, double c_phi);
/// d g_lambda / dz.
cplx g_prime(cplx lambda, cplx z, double c_phi);
/// d g_lambda / d lambda.
cplx g_lambda_derivative(cplx lambda, cplx z, double c_phi);

/// min over beta in [0, C e lambda0] of (1 - beta e^-2) / (1 + beta e), taken
/// over a 10^4-point beta grid and the right endpoint. The objective decreases
/// in beta, so the endpoint value is the minimum.
/// Throws "supercritical activity" for lambda0 >= e / C.
double delta_bound(double lambda0, double c_phi);

/// Distance from z to the segment [0, s].
double distance_to_segment(cplx z, double s);

struct ContractionCertificate {
    double lambda0 = 0.0;
    double c_phi = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;
    double eps3 = 0.0;
    double delta = 0.0;
    int grid_resolution = 0;
    /// max |g'| over the certified (z, lambda) set (over the real rectangle
    /// [0, log(1+e)] x [0, lambda0] when certification is refused).
    double max_abs_gprime_on_grid = 0.0;
    /// max |d g / d lambda| on N(lambda0, eps1) x [-eps2, log(1+e)].
    double max_abs_glambda_on_grid = 0.0;
    /// max |x| over the closure of U2 = psi^-1(N(log(1+e), eps2)).
    double u2_modulus_bound = 0.0;
    bool passed = false;
};

/// Bisection for eps1, eps2 such that on the closure of
/// N(log(1+e), eps2) x N(lambda0, eps1):
///   |g'| <= 1 - delta / 2   and   |d g / d lambda| <= delta eps2 / (4 eps1),
/// then eps3 = eps2 (1 - delta / 4). N(s, eps) is the eps-neighborhood of the
/// segment [0, s]. Both derivatives are analytic in each variable, so each
/// set is sampled on its boundary with `grid_resolution` points; the real
/// part of 1 + C lambda e exp(-e^z) must stay positive on every sample.
/// Grid evidence, not a proof.
ContractionCertificate certify_neighborhood(double lambda0, double c_phi, int grid_resolution = 256);

/// Whether rho lies in the closure of U2, i.e. psi(rho) within eps2 of
/// [0, log(1+e)].
bool in_u2(const ContractionCertificate& cert, cplx rho);
/// Whether lambda lies in the closure of N(lambda0, eps1).
bool in_activity_neighborhood(const ContractionCertificate& cert, cplx lambda);

/// Flat "key = value" block with every certificate field.
std::string serialize(const ContractionCertificate& cert);
ContractionCertificate parse_certificate(const std::string& text);

/// Samples pairs in the closure of N(radius, eps) and checks that the midpoint
/// of their exponentials has a preimage in the set (within 1e-9).
bool convexity_probe(double radius, double eps, int samples);

/// log of the weighted mean of exp(z_i); weights must sum to 1 within 1e-12.
cplx effective_coordinate(std::span<const cplx> z_values, std::span<const double> weights);

/// Points on the boundary of N(s, eps), `n` of them, evenly spread along the
/// two straight sides and the two half circles.
void sample_neighborhood_boundary(double s, double eps, int n, std::span<cplx> out);

}  // namespace gasrec
