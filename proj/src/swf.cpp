#include "tfw/swf.hpp"

#include <cmath>
#include <memory>

#include "tfw/nufft.hpp"

namespace tfw {

std::string kind_name(OperatorKind k) {
    switch (k) {
        case OperatorKind::swf_time: return "swf_time";
        case OperatorKind::swf_freq: return "swf_freq";
        case OperatorKind::swf_time_invmap: return "swf_time_invmap";
        case OperatorKind::saf_time: return "saf_time";
        case OperatorKind::saf_freq: return "saf_freq";
        case OperatorKind::dual_time: return "dual_time";
        case OperatorKind::dual_freq: return "dual_freq";
        case OperatorKind::oracle: return "oracle";
    }
    return "unknown";
}

cplx turn(double t) {
    const double f = t - std::floor(t);
    return {std::cos(2.0 * M_PI * f), std::sin(2.0 * M_PI * f)};
}

Eigen::MatrixXcd materialize(const LinearOp& op) {
    Eigen::MatrixXcd A(op.rows, op.cols);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(op.cols), col(op.rows);
    for (Eigen::Index c = 0; c < op.cols; ++c) {
        e.setZero();
        e(c) = 1.0;
        op.apply(e.data(), col.data());
        A.col(c) = col;
    }
    return A;
}

Eigen::VectorXcd apply(const LinearOp& op, const Eigen::VectorXcd& x) {
    Eigen::VectorXcd y(op.rows);
    op.apply(x.data(), y.data());
    return y;
}

Eigen::VectorXcd apply_adjoint(const LinearOp& op, const Eigen::VectorXcd& y) {
    Eigen::VectorXcd x(op.cols);
    op.adjoint(y.data(), x.data());
    return x;
}

void require_swf(const WarpMap& map, const DomainSpec& spec) {
    auto r = check_feasibility(map, spec);
    if (!r.swf_feasible) throw InfeasibleError("SWF operator refused: " + r.summary(), r);
}

void require_tw(const DomainSpec& spec) {
    if (!spec.input.symmetric() || !spec.output.symmetric())
        throw SwfError("time-warping operators need odd N, M with symmetric index sets");
}

Eigen::MatrixXcd dft_matrix(const IndexSet& s) {
    const int N = s.N;
    Eigen::MatrixXcd F(N, N);
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) {
            const long long kn = static_cast<long long>(s.index(r)) * s.index(c);
            F(r, c) = scale * turn(-static_cast<double>(((kn % N) + N) % N) / N);
        }
    return F;
}

namespace {

struct Samples {
    std::vector<double> warped;  // w(x_t)
    std::vector<double> weight;  // (Dw(x_t))^b, one-sided mean on singular points
};

Samples sample(const WarpMap& map, const std::vector<double>& xs, double b) {
    Samples s;
    for (double x : xs) {
        s.warped.push_back(map.eval(x));
        s.weight.push_back(map.sample_weight(x, b));
    }
    return s;
}

std::vector<double> tw_grid(const IndexSet& out) {
    std::vector<double> xs;
    for (int m = out.first(); m <= out.last(); ++m) xs.push_back(static_cast<double>(m) / out.N);
    return xs;
}

std::vector<double> fw_grid(int M) {
    std::vector<double> xs;
    for (int t = 0; t < M; ++t) xs.push_back(static_cast<double>(t) / M);
    return xs;
}

}  // namespace

OperatorMatrix warped_dft(const WarpMap& map, const DomainSpec& spec, double b) {
    require_swf(map, spec);
    const int N = spec.N(), M = spec.M();
    const Samples s = sample(map, tw_grid(spec.output), b);
    OperatorMatrix op;
    op.spec = spec;
    op.kind = OperatorKind::swf_time;
    op.b = b;
    op.entries.resize(N, M);
    const double scale = 1.0 / std::sqrt(static_cast<double>(M));
    for (int c = 0; c < M; ++c)
        for (int r = 0; r < N; ++r) op.entries(r, c) = scale * s.weight[c] * turn(-spec.input.index(r) * s.warped[c]);
    return op;
}

OperatorMatrix X_t(const WarpMap& map, const DomainSpec& spec, double b) {
    require_tw(spec);
    OperatorMatrix op = warped_dft(map, spec, b);
    op.entries = op.entries.adjoint() * dft_matrix(spec.input);
    op.kind = OperatorKind::swf_time;
    return op;
}

OperatorMatrix X_f(const WarpMap& map, const DomainSpec& spec, double b) {
    require_swf(map, spec);
    const int N = spec.N(), M = spec.M();
    const Samples s = sample(map, fw_grid(M), b);
    // X_f = F_M^* F'_w: (1/M) sum_t e^{j2pi m t/M} (Dw_t)^b e^{-j2pi n w_t}
    Eigen::MatrixXcd L(M, M), R(M, N);
    for (int t = 0; t < M; ++t) {
        for (int r = 0; r < M; ++r) {
            const long long mt = static_cast<long long>(spec.output.index(r)) * t;
            L(r, t) = turn(static_cast<double>(((mt % M) + M) % M) / M);
        }
        for (int c = 0; c < N; ++c) R(t, c) = s.weight[t] * turn(-spec.input.index(c) * s.warped[t]);
    }
    OperatorMatrix op;
    op.spec = spec;
    op.kind = OperatorKind::swf_freq;
    op.b = b;
    op.entries = (L * R) / static_cast<double>(M);
    return op;
}

OperatorMatrix X_hat_t(const InverseMap& inv, const DomainSpec& spec, double b) {
    require_tw(spec);
    require_swf(inv.map(), spec);
    const int N = spec.N(), M = spec.M();
    // (MN)^{-1/2} (Dv(n/N))^b sum_{k in Z_M} e^{j2pi k (v(n/N) - p/M)}
    Eigen::MatrixXcd G(M, N);  // G(k, n) = (Dv)^b e^{j2pi k v(n/N)}
    for (int c = 0; c < N; ++c) {
        const double y = static_cast<double>(spec.input.index(c)) / N;
        const double v = inv.eval(y), a = inv.sample_weight(y, b);
        for (int r = 0; r < M; ++r) G(r, c) = a * turn(spec.output.index(r) * v);
    }
    OperatorMatrix op;
    op.spec = spec;
    op.kind = OperatorKind::swf_time_invmap;
    op.b = b;
    op.entries = dft_matrix(spec.output) * G / std::sqrt(static_cast<double>(N));
    return op;
}

LinearOp X_t_op(const WarpMap& map, const DomainSpec& spec, double b) {
    require_tw(spec);
    require_swf(map, spec);
    const int N = spec.N(), M = spec.M();
    auto s = std::make_shared<Samples>(sample(map, tw_grid(spec.output), b));
    auto uniform = std::make_shared<NufftPlan>(tw_grid(spec.input), spec.input.first(), N, -1);
    auto warped = std::make_shared<NufftPlan>(s->warped, spec.input.first(), N, +1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(M) * N);
    LinearOp op;
    op.rows = M;
    op.cols = N;
    // y_m = (MN)^{-1/2} (Dw_m)^b sum_k e^{j2pi k w_m} sum_n e^{-j2pi k n/N} x_n
    op.apply = [=](const cplx* x, cplx* y) {
        std::vector<cplx> X(static_cast<std::size_t>(N));
        uniform->type1(x, X.data());
        warped->type2(X.data(), y);
        for (int m = 0; m < M; ++m) y[m] *= scale * s->weight[m];
    };
    op.adjoint = [=](const cplx* y, cplx* x) {
        std::vector<cplx> u(static_cast<std::size_t>(M)), X(static_cast<std::size_t>(N));
        for (int m = 0; m < M; ++m) u[m] = std::conj(y[m]) * scale * s->weight[m];
        warped->type1(u.data(), X.data());
        uniform->type2(X.data(), x);
        for (int n = 0; n < N; ++n) x[n] = std::conj(x[n]);
    };
    return op;
}

LinearOp X_f_op(const WarpMap& map, const DomainSpec& spec, double b) {
    require_swf(map, spec);
    const int N = spec.N(), M = spec.M();
    auto s = std::make_shared<Samples>(sample(map, fw_grid(M), b));
    auto warped = std::make_shared<NufftPlan>(s->warped, spec.input.first(), N, -1);
    auto grid = std::make_shared<NufftPlan>(fw_grid(M), spec.output.first(), M, +1);
    LinearOp op;
    op.rows = M;
    op.cols = N;
    op.apply = [=](const cplx* x, cplx* y) {
        std::vector<cplx> u(static_cast<std::size_t>(M));
        warped->type2(x, u.data());
        for (int t = 0; t < M; ++t) u[t] *= s->weight[t] / M;
        grid->type1(u.data(), y);
    };
    op.adjoint = [=](const cplx* y, cplx* x) {
        // conj(X_f)^T y = conj(X_f^T conj(y))
        std::vector<cplx> yc(static_cast<std::size_t>(M)), u(static_cast<std::size_t>(M));
        for (int m = 0; m < M; ++m) yc[m] = std::conj(y[m]);
        grid->type2(yc.data(), u.data());
        for (int t = 0; t < M; ++t) u[t] *= s->weight[t] / M;
        warped->type1(u.data(), x);
        for (int n = 0; n < N; ++n) x[n] = std::conj(x[n]);
    };
    return op;
}

}  // namespace tfw
