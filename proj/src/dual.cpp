#include "tfw/dual.hpp"

#include <sstream>

namespace tfw {

Eigen::MatrixXcd compute_Z(const Eigen::MatrixXcd& H_right, const Eigen::MatrixXcd& H_left, const Eigen::MatrixXcd& G,
                           double* spectral_radius) {
    const Eigen::Index n = G.rows();
    if (H_right.rows() != n || H_left.rows() != n || G.cols() != n)
        throw std::invalid_argument("compressed sizes of H and G disagree");
    if (n == 0) {
        if (spectral_radius) *spectral_radius = 0.0;
        return Eigen::MatrixXcd(0, 0);
    }
    const Eigen::MatrixXcd K = H_right * H_left.adjoint() * G;
    const double rho = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(K, false).eigenvalues().cwiseAbs().maxCoeff();
    if (spectral_radius) *spectral_radius = rho;
    if (!(rho < 1.0)) {
        std::ostringstream os;
        os << "tail Neumann series diverges (spectral radius " << rho
           << "); the output band is too small for the map's slope";
        throw DualError(os.str(), rho);
    }
    // Z (I - K) = G
    const Eigen::MatrixXcd IK = Eigen::MatrixXcd::Identity(n, n) - K;
    return IK.transpose().fullPivLu().solve(G.transpose()).transpose();
}

Eigen::MatrixXcd DualFactorization::correction() const {
    const Eigen::Index N = H.cols();
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Identity(N, N);
    if (Z.size()) C += H.adjoint() * (Z * H_dual);
    return C;
}

DualFactorization dual_factorization(const WarpMap& map, const DomainSpec& spec, double b, const SafOptions& opt) {
    DualFactorization d;
    d.b = b;
    d.b_dual = 1.0 - b;
    TailFactorization tf(map, spec, b, opt);
    TailFactorization tf_dual(map, spec, d.b_dual, opt);
    d.H = tf.H();
    d.H_dual = tf_dual.H();
    d.G = tf.gram();
    d.Z = compute_Z(d.H_dual, d.H, d.G, &d.spectral_radius);
    return d;
}

OperatorMatrix dual_W_f(const WarpMap& map, const DomainSpec& spec, double b, const SafOptions& opt) {
    const DualFactorization d = dual_factorization(map, spec, b, opt);
    OperatorMatrix op = build_W_f(map, spec, d.b_dual, opt);
    if (d.Z.size()) op.entries = op.entries * d.correction();
    op.kind = OperatorKind::dual_freq;
    return op;
}

OperatorMatrix dual_W_t(const WarpMap& map, const DomainSpec& spec, double b, const SafOptions& opt) {
    require_tw(spec);
    const DualFactorization d = dual_factorization(map, spec, b, opt);
    OperatorMatrix op = build_W_t(map, spec, d.b_dual, opt);
    if (d.Z.size()) {
        const Eigen::MatrixXcd FN = dft_matrix(spec.input);
        op.entries = op.entries * (FN.adjoint() * d.correction().conjugate() * FN);
    }
    op.kind = OperatorKind::dual_time;
    return op;
}

}  // namespace tfw
