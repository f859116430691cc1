#pragma once
// Reconstruction norms over a redundancy grid, analytic estimates, slope fits.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tfw/saf.hpp"

namespace tfw {

enum class NormMethod { svd, power };
double spectral_norm(const Eigen::MatrixXcd& A, NormMethod method = NormMethod::svd);

struct EstimateCoefficients {
    int sigma = 0;
    int c = 0;    // 2 (delta_b + delta_bbar), delta_b = 1 only for b = 0
    int eta = 0;  // (sigma + 1) mod 2
    double lambda = 0.0;
    double theta = 0.0;  // one-sided mean of (Dw)^b at the selected singularity
    double step = 0.0, step_dual = 0.0;    // jump magnitudes for b and 1 - b
    double gamma = 1.0, gamma_dual = 1.0;  // leading polynomial values
    int rho = 1;
    double xi = 0.0;  // selected singularity
};

// 2 zeta(s) = (2 pi)^s |B_s| / s!
double lambda_coefficient(int s);
EstimateCoefficients estimate_coefficients(const WarpMap& map, double b, const CoeffTable& table = default_coeff_table());
double estimate_saf(const WarpMap& map, const DomainSpec& spec, double b);
double estimate_swf(const WarpMap& map, const DomainSpec& spec, double b);
// SWF estimate including the tail product term when it dominates (sigma = 0, b = 1/2)
double estimate_swf_corrected(const WarpMap& map, const DomainSpec& spec, double b);

struct CurvePoint {
    double redundancy = 0.0;  // M / (N max Dw)
    int M = 0;
    bool swf_ok = false, saf_ok = false;
    double eps_hat = NAN;     // inverse-map operator against X^(b)
    double eps = NAN;         // X^(1-b) adjoint against X^(b)
    double veps = NAN;        // W^(1-b) adjoint against W^(b)
    double veps_tilde = NAN;  // dual against W^(b)
    double est_saf = NAN, est_swf = NAN;
    std::string note;
};

struct ErrorCurve {
    std::string map_name;
    int N = 0;
    double b = 0.5;
    int sigma = 0;
    std::vector<CurvePoint> points;
};

// nearest odd M >= redundancy * N * max Dw
int odd_M_for(double redundancy, int N, double max_dw);
std::vector<double> redundancy_grid(double lo, double step, double hi);
ErrorCurve measure_norms(std::shared_ptr<const WarpMap> map, int N, double b, const std::vector<double>& grid,
                         unsigned threads = 0, NormMethod method = NormMethod::svd);

enum class NormId { eps_hat, eps, veps, veps_tilde, est_saf, est_swf };
std::optional<NormId> norm_id(const std::string& name);
// least-squares slope of log(norm) against log(M) over points with redundancy in [lo, hi]
double slope_fit(const ErrorCurve& curve, NormId which, double lo, double hi);

void write_csv(std::ostream& os, const ErrorCurve& curve);

}  // namespace tfw
