#pragma once

#include "gasrec/activity.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gasrec {

/// Brute-force evaluation of the grand-canonical series
///
///   Z(f) = 1 + sum_k (1/k!) int_{Lambda^k} f(x_1) ... f(x_k) exp(-U(x)) dx.
struct OracleParams {
    /// Highest order K kept in the series.
    int truncation = 12;
    /// Gauss-Legendre nodes per piece for the nested integrals (orders <= 3) in d = 1.
    int nested_order_1d = 16;
    /// Nodes per dimension for the nested integrals in d >= 2.
    int nested_order_nd = 6;
    /// Sobol points per order for orders 4..K, split over `shifts` random shifts.
    int samples_per_order = 1 << 14;
    int shifts = 8;
    std::uint64_t seed = 0;
};

struct PartitionSeries {
    /// t_k = (1/k!) int f^{(k)} exp(-U), k = 0..K, so Z(s f) = sum s^k t_k.
    std::vector<cplx> terms;
    /// Standard error of each t_k (0 for the deterministic orders).
    std::vector<double> term_stderr;
    cplx value = 1.0;
    int truncation = 0;
    /// sum_{k > K} (sup|f| |Lambda|)^k / k!.
    double tail_estimate = 0.0;
    double region_volume = 0.0;
};

PartitionSeries partition_series(const ActivityField& f, const OracleParams& params = {});

/// Coefficients of lambda -> Z(lambda u), u = f with its base set to 1 and
/// its modifications kept.
struct PartitionPolynomial {
    std::vector<double> coefficients;
    std::vector<double> coefficient_stderr;
    int truncation = 0;
    /// Tail bound at lambda = 1.
    double tail_estimate = 0.0;
    double region_volume = 0.0;

    cplx operator()(cplx lambda) const;
    cplx derivative(cplx lambda) const;
};

PartitionPolynomial partition_polynomial(const ActivityField& f, const OracleParams& params = {});

/// One coefficient per line, then truncation, tail estimate and region volume.
std::string serialize(const PartitionPolynomial& poly);
PartitionPolynomial parse_partition_polynomial(const std::string& text);

/// Hard rods of length r in an interval of length L:
/// sum_{k <= K} lambda^k max(L - (k-1) r, 0)^k / k!.
cplx hard_rod_partition(double length, double rod, cplx lambda, int truncation);

/// f(v) Z(f discounted at v) / Z(f). Throws "oracle at numerical zero of Z"
/// when |Z(f)| <= 1e-9.
cplx density_oracle(const ActivityField& f, const Point& v, const OracleParams& params = {});

/// f(v_1)...f(v_k) exp(-U(v)) Z(f discounted at every v_i) / Z(f).
cplx kpoint_oracle(const ActivityField& f, std::span<const Point> points, const OracleParams& params = {});

struct MeanDensity {
    double value = 0.0;
    /// lambda / (1 + lambda C_phi).
    double lower_bound = 0.0;
    double margin = 0.0;
};

/// lambda Z'(lambda) / (|Lambda| Z(lambda)) for a constant real activity.
MeanDensity mean_density(const ActivityField& f, const OracleParams& params = {});
MeanDensity mean_density(const PartitionPolynomial& poly, double lambda, double c_phi);

/// All complex roots of sum c_k lambda^k (companion matrix, Newton polished),
/// sorted by real then imaginary part. Empty for degree 0.
std::vector<cplx> partition_zeros(std::span<const double> coefficients);
std::vector<cplx> partition_zeros(const PartitionPolynomial& poly);

struct LogZBound {
    bool holds = false;
    cplx log_z = 0.0;
    double bound = 0.0;
};

/// |log Z(f)| <= C |Lambda| with Z from the truncated series.
LogZBound logZ_bound_check(const ActivityField& f, double c_bound, const OracleParams& params = {});

}  // namespace gasrec
