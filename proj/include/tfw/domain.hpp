#pragma once
// Index sets Z_{N,L} = {-L, ..., N-L-1}, domain specs and feasibility tests.

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfw/warp_map.hpp"

namespace tfw {

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IndexSet {
    int N = 1;
    int L = 0;
    double z_left = 0.0;
    double z_right = 1.0;
    double mu = 1.0;

    int first() const { return -L; }
    int last() const { return N - L - 1; }
    bool contains(int k) const { return k >= -L && k <= N - L - 1; }
    int position(int k) const { return k + L; }
    int index(int pos) const { return pos - L; }
    bool symmetric() const { return N % 2 == 1 && 2 * L == N - 1; }
};

IndexSet make_index_set(int N, int L);

enum class Mode { time_warping, frequency_warping };

struct DomainSpec {
    IndexSet input;   // size N
    IndexSet output;  // size M
    Mode mode = Mode::time_warping;
    double b = 0.5;

    int N() const { return input.N; }
    int M() const { return output.N; }
};

// Symmetric odd sets; throws for even sizes.
DomainSpec tw_spec(int N, int M, double b);
DomainSpec fw_spec(int N, int L_N, int M, int L_M, double b);

struct SingularityCheck {
    double xi = 0.0;
    double dw_right = 1.0;
    double dw_left = 1.0;
    double dw_used = 1.0;
    double J = 0.0;
    bool pass = false;
};

struct FeasibilityReport {
    int N = 0, M = 0, L_N = 0, L_M = 0;
    double mu_N = 0.0, mu_M = 0.0;
    double max_dw = 1.0;
    double redundancy = 0.0;  // M/N
    bool global_ok = false;
    double positive_ratio = 0.0;  // (M-L_M)/(N-L_N)
    double negative_ratio = 0.0;  // L_M/L_N
    bool positive_ok = false, negative_ok = false;
    double mu_form_plus = 0.0, mu_form_minus = 0.0;
    bool mu_form_ok = false;
    double seam_J = 0.0;
    std::vector<SingularityCheck> singularities;
    bool shape_ok = true;
    bool swf_feasible = false;
    bool saf_feasible = false;
    std::vector<std::string> messages;

    nlohmann::json to_json() const;
    std::string summary() const;
};

FeasibilityReport check_feasibility(const WarpMap& map, const DomainSpec& spec);

struct InfeasibleError : std::runtime_error {
    FeasibilityReport report;
    InfeasibleError(const std::string& what, FeasibilityReport r) : std::runtime_error(what), report(std::move(r)) {}
};

// Time-warping domain for a signal of length N; even N goes to N+1 points.
struct TwDomain {
    IndexSet set;
    int original_N = 0;
    bool resampled = false;
    // the bin -N/2 of an even-length DFT is shared evenly by -N/2 and +N/2
    std::vector<double> resample(const std::vector<double>& x) const;
};

TwDomain tw_domain(int N);

// positions of k -> -k; requires a symmetric set
std::vector<int> reverse_indexing(const IndexSet& set);

}  // namespace tfw
