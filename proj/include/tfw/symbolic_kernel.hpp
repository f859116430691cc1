#pragma once
// Exact derivative-expansion coefficients of e^{a w}(Dw)^b and the per-singularity kernels.

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "tfw/domain.hpp"
#include "tfw/rational.hpp"
#include "tfw/warp_map.hpp"

namespace tfw {

// Polynomial in k whose coefficients are polynomials in b: coeff[m] multiplies k^m.
struct BKPoly {
    std::vector<PolyQ> coeff;

    int degree_k() const { return static_cast<int>(coeff.size()) - 1; }
    PolyQ specialize_b(const Rational& b) const;  // polynomial in k
    Rational eval(const Rational& b, const Rational& k) const;
    BKPoly& operator+=(const BKPoly& o);
    std::string to_string() const;
    void trim();
};

// Multiply by (c0 + c1 k), c0 in Q[b], c1 rational.
BKPoly mul_linear(const BKPoly& p, const PolyQ& c0, const Rational& c1);
// Antidifference in k, coefficientwise over Q[b].
BKPoly antidifference_k(const BKPoly& p);

struct ExpansionTerm {
    int source = 0;     // sequence index at level l
    int generator = 0;  // m, the derivative order raised
    int target = 0;     // sequence index at level l+1
};

struct Level {
    int l = 0;
    // p[n][m-1] for m = 1..l+1
    std::vector<std::vector<int>> seqs;
    std::vector<BKPoly> gamma;
    // expansion that produced the next level (empty for the last level)
    std::vector<ExpansionTerm> expansion;
    std::vector<std::vector<int>> partition;  // next-level n -> expansion indices
};

std::vector<int> generators(const std::vector<int>& seq);

// Computes Ω_{l+1} with its index data; stores the expansion into `prev`.
Level enumerate_level(Level& prev);
// Fills next.gamma from prev and its expansion data.
void gamma_level(const Level& prev, Level& next);

class CoeffTable {
public:
    static constexpr int kDefaultMaxLevel = 12;
    explicit CoeffTable(int max_level = kDefaultMaxLevel);

    int max_level() const { return static_cast<int>(levels_.size()) - 1; }
    const Level& level(int l) const { return levels_.at(static_cast<std::size_t>(l)); }

    // gamma_{l,n}(k) for k = 0..kmax as doubles, exact until the final rounding; cached per b
    const std::vector<std::vector<std::vector<double>>>& gamma_values(double b, int kmax) const;

    nlohmann::json dump(int max_level, const Rational* b) const;

private:
    std::vector<Level> levels_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<double, int>, std::shared_ptr<std::vector<std::vector<std::vector<double>>>>> cache_;
};

const CoeffTable& default_coeff_table();

// beta_{l,n}: (Dw)^{b+p_1} prod_{m>1} (D^m w)^{p_m}, with jets d[0..] = w, Dw, D^2 w, ...
double beta_eval(const std::vector<int>& seq, const std::vector<double>& jet, double b);

double alpha_eval(const WarpMap& map, double xi, Side side, int k, int l, double b,
                  const CoeffTable& table = default_coeff_table());

struct KernelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct KernelMatrix {
    double xi = 0.0;
    int R = 0;
    double J_value = 0.0;
    double dw_ref = 1.0;     // larger one-sided Dw, used in J
    Eigen::MatrixXd K_plus;  // alpha_{i,i-k}(xi+) (Dw(xi+)/dw_ref)^k
    Eigen::MatrixXd K_minus;
    Eigen::MatrixXcd J;      // J^{-k} (-j pi M (1-mu_M))^{k-i-1}
    Eigen::MatrixXcd S;
};

int kernel_size(double J_value, double kernel_tol = 1e-12, int cap = 64);

// K^+ and K^- do not depend on M or N; cached per (map, xi, b, R)
struct OneSidedKernels {
    Eigen::MatrixXd plus, minus;
    double dw_plus = 1.0, dw_minus = 1.0;
};
OneSidedKernels one_sided_kernels(const WarpMap& map, double xi, double b, int R,
                                  const CoeffTable& table = default_coeff_table());

// R <= 0 picks kernel_size(J, kernel_tol)
KernelMatrix build_kernel_S(const WarpMap& map, double xi, const DomainSpec& spec, double b, int R = 0,
                            double kernel_tol = 1e-12, const CoeffTable& table = default_coeff_table());

}  // namespace tfw
