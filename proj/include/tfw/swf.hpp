#pragma once
// Sampled-warping-function operators: warped DFT, X_f, X_t and the inverse-map X_hat_t.

#include <complex>
#include <functional>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "tfw/domain.hpp"
#include "tfw/warp_map.hpp"

namespace tfw {

using cplx = std::complex<double>;

enum class OperatorKind { swf_time, swf_freq, swf_time_invmap, saf_time, saf_freq, dual_time, dual_freq, oracle };
std::string kind_name(OperatorKind k);

struct OperatorMatrix {
    Eigen::MatrixXcd entries;
    DomainSpec spec;
    OperatorKind kind = OperatorKind::oracle;
    double b = 0.5;
};

// Matrix-free operator; apply maps cols -> rows, adjoint maps rows -> cols.
struct LinearOp {
    Eigen::Index rows = 0, cols = 0;
    std::function<void(const cplx*, cplx*)> apply;
    std::function<void(const cplx*, cplx*)> adjoint;
};

Eigen::MatrixXcd materialize(const LinearOp& op);
Eigen::VectorXcd apply(const LinearOp& op, const Eigen::VectorXcd& x);
Eigen::VectorXcd apply_adjoint(const LinearOp& op, const Eigen::VectorXcd& y);

struct SwfError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// e^{j 2 pi t} with the integer part of t removed first
cplx turn(double t);

// F(k, n) = N^{-1/2} e^{-j2pi k n / N} over one index set
Eigen::MatrixXcd dft_matrix(const IndexSet& s);

// rows k in the input set, columns m in the output set
OperatorMatrix warped_dft(const WarpMap& map, const DomainSpec& spec, double b);
OperatorMatrix X_t(const WarpMap& map, const DomainSpec& spec, double b);
OperatorMatrix X_f(const WarpMap& map, const DomainSpec& spec, double b);
OperatorMatrix X_hat_t(const InverseMap& inv, const DomainSpec& spec, double b);

// NUFFT-based appliers with the same definitions
LinearOp X_t_op(const WarpMap& map, const DomainSpec& spec, double b);
LinearOp X_f_op(const WarpMap& map, const DomainSpec& spec, double b);

// throws SwfError unless the spec passes the SWF feasibility tests
void require_swf(const WarpMap& map, const DomainSpec& spec);
void require_tw(const DomainSpec& spec);

}  // namespace tfw
