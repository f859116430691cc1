#pragma once
// Exact duals of the SAF operators by resumming the tail Neumann series in the compressed space.

#include <stdexcept>

#include <Eigen/Dense>

#include "tfw/saf.hpp"

namespace tfw {

struct DualError : std::runtime_error {
    double spectral_radius;
    DualError(const std::string& what, double rho) : std::runtime_error(what), spectral_radius(rho) {}
};

// Z with sum_{k>=1} (E_left^dag E_right)^k = H_left^dag Z H_right, E^dag E = H^dag G H
Eigen::MatrixXcd compute_Z(const Eigen::MatrixXcd& H_right, const Eigen::MatrixXcd& H_left, const Eigen::MatrixXcd& G,
                           double* spectral_radius = nullptr);

struct DualFactorization {
    double b = 0.5;      // exponent of the operator being inverted
    double b_dual = 0.5; // 1 - b
    Eigen::MatrixXcd H;       // stacked S_i V Q_i for b
    Eigen::MatrixXcd H_dual;  // same for 1 - b
    Eigen::MatrixXcd G;
    Eigen::MatrixXcd Z;       // sum_k (E^{b dag} E^{b_dual})^k = H^dag Z H_dual
    double spectral_radius = 0.0;
    // I + H^dag Z H_dual, N x N
    Eigen::MatrixXcd correction() const;
};

DualFactorization dual_factorization(const WarpMap& map, const DomainSpec& spec, double b, const SafOptions& opt = {});

// dual of W^{(b)}: W^{(1-b)} (I + H^dag Z H_dual), so that dual^dag W^{(b)} = I
OperatorMatrix dual_W_f(const WarpMap& map, const DomainSpec& spec, double b, const SafOptions& opt = {});
OperatorMatrix dual_W_t(const WarpMap& map, const DomainSpec& spec, double b, const SafOptions& opt = {});

}  // namespace tfw
