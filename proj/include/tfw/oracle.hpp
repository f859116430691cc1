#pragma once
// Brute-force ground truth: Gauss-Legendre quadrature of the continuous operator and jet differentiation.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "tfw/domain.hpp"
#include "tfw/warp_map.hpp"

namespace tfw {

struct QuadratureRule {
    std::vector<double> x;
    std::vector<double> weight;
    int order = 20;
    int panels = 0;
};

// Panels split at every piece breakpoint; panel width keeps the phase change of
// e^{j2pi(mx - n w)} below pi/2 for |m| <= max_m, |n| <= max_n.
QuadratureRule make_quadrature(const WarpMap& map, double max_m, double max_n, int order = 20, double refine = 1.0);

// Integral over one period of (Dw)^b e^{j2pi(m x - n w(x))}
std::complex<double> W_entry(const WarpMap& map, int m, int n, double b, int order = 20, double refine = 1.0);

// Rows `ms`, columns `ns` of the continuous operator
Eigen::MatrixXcd dense_W(const WarpMap& map, const std::vector<int>& ms, const std::vector<int>& ns, double b,
                         int order = 20, double refine = 1.0);

struct TailMatrix {
    std::vector<int> rows;  // out-of-band m, |m| <= K_tail M, ascending
    Eigen::MatrixXcd E;     // rows x N
};

std::vector<int> tail_rows(const IndexSet& out, int K_tail);
std::vector<int> index_list(const IndexSet& s);

// In-band block L_M W L_N'
Eigen::MatrixXcd dense_band(const WarpMap& map, const DomainSpec& spec, double b);
TailMatrix dense_E(const WarpMap& map, const DomainSpec& spec, double b, int K_tail = 8);
// A(m, n) = sum_{k != 0} E(m + kM, n) over the stored tail rows
Eigen::MatrixXcd fold_tail(const TailMatrix& tail, const IndexSet& out);
Eigen::MatrixXcd dense_A(const WarpMap& map, const DomainSpec& spec, double b, int K_tail = 8);

// D^k [e^{a w} (Dw)^b] at x by jet arithmetic
std::complex<double> taylor_phi_deriv(const WarpMap& map, double x, std::complex<double> a, double b, int k,
                                      Side side = Side::two_sided);

}  // namespace tfw
