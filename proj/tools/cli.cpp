#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tfw/domain.hpp"
#include "tfw/dual.hpp"
#include "tfw/error_analysis.hpp"
#include "tfw/io.hpp"
#include "tfw/oracle.hpp"
#include "tfw/saf.hpp"
#include "tfw/swf.hpp"
#include "tfw/symbolic_kernel.hpp"
#include "tfw/warp_map.hpp"

namespace tfw::cli {

namespace {

using nlohmann::json;

struct Config {
    std::string map = "exponential";
    int N = 33, M = 0, L_N = -1, L_M = -1;
    std::string mode = "tw";
    double b = 0.5;
    std::string method = "saf";
    std::string forward = "saf";
    std::string inverse = "dual";
    int R = 0;
    double kernel_tol = 1e-12;
    double dual_tol = 1e-10;
    std::string in, out, reference, save_input, format;
    std::uint64_t seed = 42;
    bool min_M = false;
    std::string grid = "1:0.25:10";
    unsigned threads = 0;
    std::string norm = "svd";
    int level = 2;
    std::string kernel_b = "sym";
    int m = 0, n = 0;
    int order = 20;
    double refine = 1.0;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::shared_ptr<const WarpMap> load_map(const std::string& name) {
    if (std::filesystem::is_regular_file(name)) {
        std::ifstream is(name);
        json j;
        try {
            j = json::parse(is);
        } catch (const json::exception& e) {
            throw IoError("cannot parse map file '" + name + "': " + e.what());
        }
        return std::make_shared<const WarpMap>(WarpMap::from_json(j));
    }
    if (name == "identity") return std::make_shared<const WarpMap>(WarpMap::identity());
    if (name == "exponential" || name == "exp") return std::make_shared<const WarpMap>(WarpMap::exponential());
    if (name == "c1_seam") return std::make_shared<const WarpMap>(WarpMap::c1_seam());
    if (name == "atan_tan") return std::make_shared<const WarpMap>(WarpMap::atan_tan(2.0));
    throw UsageError("--map '" + name + "' is neither a file nor a builtin (identity, exponential, c1_seam, atan_tan)");
}

DomainSpec resolve_spec(const Config& c) {
    if (c.M <= 0) throw UsageError("--M is required");
    if (c.mode == "tw") {
        if (c.L_N >= 0 || c.L_M >= 0) throw UsageError("--LN/--LM apply to --mode fw only");
        return tw_spec(c.N, c.M, c.b);
    }
    return fw_spec(c.N, c.L_N >= 0 ? c.L_N : c.N / 2, c.M, c.L_M >= 0 ? c.L_M : c.M / 2, c.b);
}

FeasibilityReport echo(const WarpMap& map, const DomainSpec& spec, std::ostream& err) {
    FeasibilityReport rep = check_feasibility(map, spec);
    json s = spec_to_json(spec);
    s["map"] = map.name();
    err << "spec " << s.dump() << '\n' << "feasibility " << rep.to_json().dump() << '\n';
    return rep;
}

Format output_format(const Config& c, const std::string& path) {
    return c.format.empty() ? format_for_path(path) : parse_format(c.format);
}

bool time_mode(const DomainSpec& spec) { return spec.mode == Mode::time_warping; }

SafOptions saf_options(const Config& c) {
    SafOptions o;
    o.R = c.R;
    o.kernel_tol = c.kernel_tol;
    return o;
}

// forward operator for exponent b
OperatorMatrix forward_op(const WarpMap& map, const DomainSpec& spec, double b, const std::string& method, const Config& c) {
    if (method == "swf") return time_mode(spec) ? X_t(map, spec, b) : X_f(map, spec, b);
    return time_mode(spec) ? build_W_t(map, spec, b, saf_options(c)) : build_W_f(map, spec, b, saf_options(c));
}

Eigen::VectorXcd random_signal(int N, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXcd x(N);
    for (int i = 0; i < N; ++i) x(i) = dist(rng);
    return x;
}

void write_json(const json& j, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << j.dump(2) << '\n';
        return;
    }
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os << j.dump(2) << '\n';
}

int cmd_check(const Config& c, std::ostream& out, std::ostream& err) {
    auto map = load_map(c.map);
    Config probe = c;
    if (c.min_M) {
        // smallest feasible M for the method, scanning odd M in tw mode
        const int step = c.mode == "tw" ? 2 : 1;
        int M = c.M > 0 ? c.M : c.N;
        if (step == 2 && M % 2 == 0) ++M;
        for (;; M += step) {
            probe.M = M;
            const auto rep = check_feasibility(*map, resolve_spec(probe));
            if (c.method == "swf" ? rep.swf_feasible : rep.saf_feasible) break;
            if (M > 64 * c.N) throw UsageError("no feasible M found below 64 N");
        }
    }
    const DomainSpec spec = resolve_spec(probe);
    const FeasibilityReport rep = echo(*map, spec, err);
    json j = rep.to_json();
    j["method"] = c.method;
    out << j.dump(2) << '\n';
    const bool ok = c.method == "swf" ? rep.swf_feasible : rep.saf_feasible;
    if (!ok) err << rep.summary() << '\n';
    return ok ? kExitOk : kExitInfeasible;
}

int cmd_apply(const Config& c, std::ostream& out, std::ostream& err) {
    auto map = load_map(c.map);
    const DomainSpec spec = resolve_spec(c);
    echo(*map, spec, err);
    const Eigen::VectorXcd x = c.in.empty() ? random_signal(spec.N(), c.seed) : read_signal(c.in);
    if (x.size() != spec.N())
        throw UsageError("input has " + std::to_string(x.size()) + " samples, expected N = " + std::to_string(spec.N()));
    if (!c.save_input.empty()) write_signal(c.save_input, x, output_format(c, c.save_input));
    const OperatorMatrix F = forward_op(*map, spec, c.b, c.method, c);
    const Eigen::VectorXcd y = F.entries * x;
    write_signal(c.out, y, output_format(c, c.out));
    out << json{{"operator", kind_name(F.kind)}, {"input_samples", x.size()}, {"output_samples", y.size()}}.dump() << '\n';
    return kExitOk;
}

int cmd_invert(const Config& c, std::ostream& out, std::ostream& err) {
    auto map = load_map(c.map);
    const DomainSpec spec = resolve_spec(c);
    echo(*map, spec, err);
    const Eigen::VectorXcd y = read_signal(c.in);
    if (y.size() != spec.M())
        throw UsageError("input has " + std::to_string(y.size()) + " samples, expected M = " + std::to_string(spec.M()));
    if (c.inverse == "dual" && c.forward != "saf") throw UsageError("--method dual inverts the saf forward operator");
    if (c.inverse == "invmap" && !time_mode(spec)) throw UsageError("--method invmap needs --mode tw");

    const OperatorMatrix F = forward_op(*map, spec, c.b, c.forward, c);
    Eigen::MatrixXcd L;
    if (c.inverse == "transpose") {
        L = forward_op(*map, spec, 1.0 - c.b, c.forward, c).entries.adjoint();
    } else if (c.inverse == "invmap") {
        InverseMap inv(map);
        L = X_hat_t(inv, spec, c.b).entries.adjoint();
    } else {
        L = (time_mode(spec) ? dual_W_t(*map, spec, c.b, saf_options(c)) : dual_W_f(*map, spec, c.b, saf_options(c)))
                .entries.adjoint();
    }
    const Eigen::VectorXcd x_rec = L * y;
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(spec.N(), spec.N());
    const double op_res = spectral_norm(L * F.entries - I);

    json r = {{"method", c.inverse}, {"forward", kind_name(F.kind)}, {"operator_residual", op_res}};
    if (c.inverse == "dual") r["within_dual_tol"] = op_res <= c.dual_tol;
    if (!c.reference.empty()) {
        const Eigen::VectorXcd x = read_signal(c.reference);
        if (x.size() != x_rec.size()) throw UsageError("reference length does not match N");
        r["signal_residual"] = (x_rec - x).norm() / std::max(x.norm(), 1e-300);
    }
    if (!c.out.empty()) write_signal(c.out, x_rec, output_format(c, c.out));
    out << r.dump() << '\n';
    return kExitOk;
}

int cmd_build(const Config& c, std::ostream& out, std::ostream& err) {
    auto map = load_map(c.map);
    const DomainSpec spec = resolve_spec(c);
    echo(*map, spec, err);
    OperatorMatrix op;
    if (c.method == "dual")
        op = time_mode(spec) ? dual_W_t(*map, spec, c.b, saf_options(c)) : dual_W_f(*map, spec, c.b, saf_options(c));
    else
        op = forward_op(*map, spec, c.b, c.method, c);
    write_matrix(c.out, op, output_format(c, c.out));
    out << json{{"kind", kind_name(op.kind)}, {"rows", op.entries.rows()}, {"cols", op.entries.cols()}}.dump() << '\n';
    return kExitOk;
}

std::vector<double> parse_grid(const std::string& g) {
    std::vector<double> v;
    std::stringstream ss(g);
    std::string part;
    while (std::getline(ss, part, ':')) {
        try {
            v.push_back(std::stod(part));
        } catch (const std::exception&) {
            throw UsageError("--grid expects lo:step:hi");
        }
    }
    if (v.size() != 3 || v[1] <= 0 || v[2] < v[0] || v[0] <= 0) throw UsageError("--grid expects lo:step:hi with 0 < lo <= hi, step > 0");
    return redundancy_grid(v[0], v[1], v[2]);
}

int cmd_curves(const Config& c, std::ostream& out, std::ostream& err) {
    auto map = load_map(c.map);
    const auto grid = parse_grid(c.grid);
    json s = {{"map", map->name()}, {"N", c.N}, {"b", c.b}, {"mode", "tw"}, {"points", grid.size()}};
    err << "spec " << s.dump() << '\n';
    const ErrorCurve curve =
        measure_norms(map, c.N, c.b, grid, c.threads, c.norm == "power" ? NormMethod::power : NormMethod::svd);
    for (const auto& p : curve.points)
        if (!p.note.empty()) err << "r=" << format_double(p.redundancy) << " M=" << p.M << ": " << p.note << '\n';

    const Format f = c.out.empty() ? (c.format == "json" ? Format::json : Format::csv) : output_format(c, c.out);
    std::ostringstream body;
    if (f == Format::json) {
        json pts = json::array();
        auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
        for (const auto& p : curve.points)
            pts.push_back({{"redundancy", p.redundancy}, {"M", p.M}, {"eps_hat", num(p.eps_hat)}, {"eps", num(p.eps)},
                           {"veps", num(p.veps)}, {"veps_tilde", num(p.veps_tilde)}, {"est_saf", num(p.est_saf)},
                           {"est_swf", num(p.est_swf)}});
        body << json{{"map", curve.map_name}, {"N", curve.N}, {"b", curve.b}, {"sigma", curve.sigma}, {"points", pts}}.dump(2)
             << '\n';
    } else if (f == Format::csv) {
        write_csv(body, curve);
    } else {
        throw UsageError("curves support --format csv or json");
    }
    if (c.out.empty()) {
        out << body.str();
    } else {
        std::ofstream os(c.out);
        if (!os) throw IoError("cannot open '" + c.out + "' for writing");
        os << body.str();
    }
    return kExitOk;
}

int cmd_kernel_dump(const Config& c, std::ostream& out, std::ostream&) {
    if (c.level < 0 || c.level > 20) throw UsageError("--level must be in [0, 20]");
    std::unique_ptr<Rational> b;
    if (c.kernel_b != "sym") {
        try {
            b = std::make_unique<Rational>(c.kernel_b);
            b->canonicalize();
        } catch (const std::exception&) {
            throw UsageError("--b must be sym or a rational such as 0, 1, 1/2");
        }
    }
    const CoeffTable local(std::max(c.level, 1));
    const CoeffTable& table = c.level <= CoeffTable::kDefaultMaxLevel ? default_coeff_table() : local;
    write_json(table.dump(c.level, b.get()), c.out, out);
    return kExitOk;
}

int cmd_oracle_entry(const Config& c, std::ostream& out, std::ostream&) {
    auto map = load_map(c.map);
    const auto v = W_entry(*map, c.m, c.n, c.b, c.order, c.refine);
    out << json{{"map", map->name()}, {"m", c.m}, {"n", c.n}, {"b", c.b}, {"re", v.real()}, {"im", v.imag()}}.dump() << '\n';
    return kExitOk;
}

int cmd_oracle_matrix(const Config& c, std::ostream& out, std::ostream& err) {
    auto map = load_map(c.map);
    const DomainSpec spec = resolve_spec(c);
    echo(*map, spec, err);
    OperatorMatrix op;
    op.entries = dense_band(*map, spec, c.b);
    op.spec = spec;
    op.kind = OperatorKind::oracle;
    op.b = c.b;
    write_matrix(c.out, op, output_format(c, c.out));
    out << json{{"kind", kind_name(op.kind)}, {"rows", op.entries.rows()}, {"cols", op.entries.cols()}}.dump() << '\n';
    return kExitOk;
}

int cmd_map_info(const Config& c, std::ostream& out, std::ostream&) {
    auto map = load_map(c.map);
    json sing = json::array();
    for (const auto& s : map->singularities())
        sing.push_back({{"xi", s.xi}, {"sigma", s.sigma}, {"dw_right", s.dw_right}, {"dw_left", s.dw_left}});
    out << json{{"name", map->name()},     {"source", map->source()}, {"sigma", map->sigma()},
                {"max_dw", map->max_dw()}, {"min_dw", map->min_dw()}, {"singularities", sing}}
                   .dump(2)
        << '\n';
    return kExitOk;
}

void add_map(CLI::App* app, Config& c) {
    app->add_option("--map", c.map, "map JSON file or builtin name (identity, exponential, c1_seam, atan_tan)")
        ->capture_default_str();
}

void add_b(CLI::App* app, Config& c) {
    app->add_option("--b", c.b, "exponent b in [0, 1]")->check(CLI::Range(0.0, 1.0))->capture_default_str();
}

void add_domain(CLI::App* app, Config& c) {
    add_map(app, c);
    app->add_option("--N", c.N, "input length")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--M", c.M, "output length")->check(CLI::PositiveNumber);
    app->add_option("--LN", c.L_N, "negative input indices (fw mode)")->check(CLI::NonNegativeNumber);
    app->add_option("--LM", c.L_M, "negative output indices (fw mode)")->check(CLI::NonNegativeNumber);
    app->add_option("--mode", c.mode, "tw or fw")->check(CLI::IsMember({"tw", "fw"}))->capture_default_str();
    add_b(app, c);
}

void add_saf(CLI::App* app, Config& c) {
    app->add_option("--R", c.R, "kernel size, 0 derives it from --kernel-tol")->check(CLI::Range(0, 64));
    app->add_option("--kernel-tol", c.kernel_tol, "kernel truncation tolerance")->check(CLI::PositiveNumber);
}

void add_format(CLI::App* app, Config& c) {
    app->add_option("--format", c.format, "csv, binary or json; default from the file extension")
        ->check(CLI::IsMember({"csv", "binary", "json"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Config c;
    CLI::App app{"Warped time/frequency operators"};
    app.name("tfw");
    app.require_subcommand(0, 1);

    auto* check = app.add_subcommand("check", "feasibility report as JSON; exit 2 when infeasible for --method");
    add_domain(check, c);
    check->add_option("--method", c.method, "swf or saf")->check(CLI::IsMember({"swf", "saf"}))->capture_default_str();
    check->add_flag("--min-M", c.min_M, "search the smallest feasible M starting at --M (or N)");

    auto* warp = app.add_subcommand("warp", "operators and signals");
    warp->require_subcommand(0, 1);
    auto* apply_cmd = warp->add_subcommand("apply", "warp a signal");
    add_domain(apply_cmd, c);
    add_saf(apply_cmd, c);
    add_format(apply_cmd, c);
    apply_cmd->add_option("--method", c.method, "swf or saf")->check(CLI::IsMember({"swf", "saf"}))->capture_default_str();
    apply_cmd->add_option("--in", c.in, "input signal; a seeded random real signal when omitted");
    apply_cmd->add_option("--seed", c.seed, "seed of the random input")->capture_default_str();
    apply_cmd->add_option("--save-input", c.save_input, "write the input signal here");
    apply_cmd->add_option("--out", c.out, "output signal")->required();

    auto* invert = warp->add_subcommand("invert", "reconstruct a signal and report residuals");
    add_domain(invert, c);
    add_saf(invert, c);
    add_format(invert, c);
    invert->add_option("--method", c.inverse, "transpose, invmap or dual")
        ->check(CLI::IsMember({"transpose", "invmap", "dual"}))
        ->capture_default_str();
    invert->add_option("--forward", c.forward, "forward operator used by apply: swf or saf")
        ->check(CLI::IsMember({"swf", "saf"}))
        ->capture_default_str();
    invert->add_option("--in", c.in, "warped signal")->required();
    invert->add_option("--reference", c.reference, "original signal for the signal residual");
    invert->add_option("--out", c.out, "reconstructed signal");
    invert->add_option("--dual-tol", c.dual_tol, "tolerance reported for the dual")->check(CLI::PositiveNumber);

    auto* build = warp->add_subcommand("build", "write an operator matrix");
    add_domain(build, c);
    add_saf(build, c);
    add_format(build, c);
    build->add_option("--method", c.method, "swf, saf or dual")->check(CLI::IsMember({"swf", "saf", "dual"}))->capture_default_str();
    build->add_option("--out", c.out, "matrix path; binary adds a .json sidecar")->required();

    auto add_curves = [&](CLI::App* cmd) {
        add_map(cmd, c);
        cmd->add_option("--N", c.N, "input length")->check(CLI::PositiveNumber)->capture_default_str();
        add_b(cmd, c);
        add_format(cmd, c);
        cmd->add_option("--grid", c.grid, "redundancy grid lo:step:hi")->capture_default_str();
        cmd->add_option("--out", c.out, "output file; stdout when omitted");
        cmd->add_option("--threads", c.threads, "worker threads, 0 for all cores");
        cmd->add_option("--norm", c.norm, "svd or power")->check(CLI::IsMember({"svd", "power"}))->capture_default_str();
    };
    auto* warp_curves = warp->add_subcommand("curves", "reconstruction error curves");
    add_curves(warp_curves);
    auto* curves = app.add_subcommand("curves", "reconstruction error curves");
    add_curves(curves);

    auto* kernel = app.add_subcommand("kernel", "symbolic kernel tables");
    kernel->require_subcommand(0, 1);
    auto* dump = kernel->add_subcommand("dump", "beta exponents and gamma polynomials as JSON");
    dump->add_option("--level", c.level, "highest level")->capture_default_str();
    dump->add_option("--b", c.kernel_b, "sym, 0, 1 or a rational p/q")->capture_default_str();
    dump->add_option("--out", c.out, "output file; stdout when omitted");

    auto* oracle = app.add_subcommand("oracle", "dense quadrature reference");
    oracle->require_subcommand(0, 1);
    auto* entry = oracle->add_subcommand("entry", "one continuous-operator entry");
    add_map(entry, c);
    add_b(entry, c);
    entry->add_option("--m", c.m, "output frequency")->required();
    entry->add_option("--n", c.n, "input frequency")->required();
    entry->add_option("--order", c.order, "Gauss-Legendre order")->check(CLI::Range(2, 200))->capture_default_str();
    entry->add_option("--refine", c.refine, "panel refinement factor")->check(CLI::PositiveNumber)->capture_default_str();
    auto* matrix = oracle->add_subcommand("matrix", "band-limited dense operator");
    add_domain(matrix, c);
    add_format(matrix, c);
    matrix->add_option("--out", c.out, "matrix path")->required();

    auto* map_cmd = app.add_subcommand("map", "map utilities");
    map_cmd->require_subcommand(0, 1);
    auto* info = map_cmd->add_subcommand("info", "singularities and slope range");
    add_map(info, c);

    std::vector<const char*> argv{"tfw"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ExtrasError& e) {
        err << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitError;
    }

    try {
        if (check->parsed()) return cmd_check(c, out, err);
        if (apply_cmd->parsed()) return cmd_apply(c, out, err);
        if (invert->parsed()) return cmd_invert(c, out, err);
        if (build->parsed()) return cmd_build(c, out, err);
        if (warp_curves->parsed() || curves->parsed()) return cmd_curves(c, out, err);
        if (dump->parsed()) return cmd_kernel_dump(c, out, err);
        if (entry->parsed()) return cmd_oracle_entry(c, out, err);
        if (matrix->parsed()) return cmd_oracle_matrix(c, out, err);
        if (info->parsed()) return cmd_map_info(c, out, err);
    } catch (const InfeasibleError& e) {
        err << e.what() << '\n';
        return kExitInfeasible;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    err << app.help();
    return kExitError;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace tfw::cli
