#include "tfw/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace tfw {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
        std::memcpy(&v, b, sizeof(T));
    }
    return v;
}

void put_doubles(std::ostream& os, const std::complex<double>* p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double re = to_little(p[i].real()), im = to_little(p[i].imag());
        os.write(reinterpret_cast<const char*>(&re), 8);
        os.write(reinterpret_cast<const char*>(&im), 8);
    }
}

void get_doubles(std::istream& is, std::complex<double>* p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double re, im;
        is.read(reinterpret_cast<char*>(&re), 8);
        is.read(reinterpret_cast<char*>(&im), 8);
        if (!is) throw IoError("truncated binary data");
        p[i] = {to_little(re), to_little(im)};
    }
}

std::ofstream open_out(const std::string& path, bool binary) {
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    return os;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::complex<double> json_complex(const nlohmann::json& v) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
    throw IoError("expected a number or [re, im]");
}

nlohmann::json complex_json(std::complex<double> z) { return nlohmann::json::array({z.real(), z.imag()}); }

}  // namespace

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

Format parse_format(const std::string& s) {
    if (s == "binary") return Format::binary;
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw IoError("unknown format '" + s + "'");
}

Format format_for_path(const std::string& path) {
    auto ends = [&](const char* ext) {
        const std::size_t n = std::strlen(ext);
        return path.size() >= n && path.compare(path.size() - n, n, ext) == 0;
    };
    if (ends(".csv")) return Format::csv;
    if (ends(".json")) return Format::json;
    return Format::binary;
}

void write_signal(const std::string& path, const Eigen::VectorXcd& x, Format f) {
    if (f == Format::binary) {
        auto os = open_out(path, true);
        os.write(kSignalMagic, 8);
        const std::uint64_t n = to_little(static_cast<std::uint64_t>(x.size()));
        os.write(reinterpret_cast<const char*>(&n), 8);
        put_doubles(os, x.data(), static_cast<std::size_t>(x.size()));
    } else if (f == Format::csv) {
        auto os = open_out(path, false);
        os << "re,im\n";
        for (Eigen::Index i = 0; i < x.size(); ++i) os << format_double(x(i).real()) << ',' << format_double(x(i).imag()) << '\n';
    } else {
        nlohmann::json j = nlohmann::json::array();
        for (Eigen::Index i = 0; i < x.size(); ++i) j.push_back(complex_json(x(i)));
        auto os = open_out(path, false);
        os << j.dump() << '\n';
    }
    if (!std::ofstream(path, std::ios::app)) throw IoError("write to '" + path + "' failed");
}

Eigen::VectorXcd read_signal(const std::string& path) {
    const std::string data = slurp(path);
    if (data.size() >= 16 && std::memcmp(data.data(), kSignalMagic, 8) == 0) {
        std::uint64_t n;
        std::memcpy(&n, data.data() + 8, 8);
        n = to_little(n);
        if (data.size() != 16 + 16 * n) throw IoError("signal '" + path + "' length does not match its header");
        std::istringstream is(data.substr(16));
        Eigen::VectorXcd x(static_cast<Eigen::Index>(n));
        get_doubles(is, x.data(), n);
        return x;
    }
    const auto first = data.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && data[first] == '[') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(data);
        } catch (const nlohmann::json::exception& e) {
            throw IoError("bad JSON signal '" + path + "': " + e.what());
        }
        Eigen::VectorXcd x(static_cast<Eigen::Index>(j.size()));
        for (std::size_t i = 0; i < j.size(); ++i) x(static_cast<Eigen::Index>(i)) = json_complex(j[i]);
        return x;
    }
    std::vector<std::complex<double>> v;
    std::istringstream is(data);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (lineno == 1 && line.find_first_of("0123456789") == std::string::npos) continue;  // header
        std::istringstream ls(line);
        std::string a, b;
        std::getline(ls, a, ',');
        std::getline(ls, b, ',');
        try {
            std::size_t used = 0;
            const double re = std::stod(a, &used);
            const double im = b.empty() ? 0.0 : std::stod(b);
            v.emplace_back(re, im);
        } catch (const std::exception&) {
            throw IoError("bad CSV signal line " + std::to_string(lineno) + " in '" + path + "'");
        }
    }
    return Eigen::Map<Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::json spec_to_json(const DomainSpec& spec) {
    return {{"mode", spec.mode == Mode::time_warping ? "tw" : "fw"},
            {"N", spec.N()},
            {"L_N", spec.input.L},
            {"M", spec.M()},
            {"L_M", spec.output.L},
            {"b", spec.b}};
}

void write_matrix(const std::string& path, const OperatorMatrix& op, Format f) {
    nlohmann::json meta = {{"kind", kind_name(op.kind)},
                           {"b", op.b},
                           {"rows", op.entries.rows()},
                           {"cols", op.entries.cols()},
                           {"spec", spec_to_json(op.spec)},
                           {"layout", "row-major complex128 little-endian"}};
    const Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = op.entries;
    if (f == Format::binary) {
        {
            auto os = open_out(path, true);
            put_doubles(os, rm.data(), static_cast<std::size_t>(rm.size()));
            if (!os) throw IoError("write to '" + path + "' failed");
        }
        auto js = open_out(path + ".json", false);
        js << meta.dump(2) << '\n';
    } else if (f == Format::csv) {
        auto os = open_out(path, false);
        for (Eigen::Index r = 0; r < rm.rows(); ++r) {
            for (Eigen::Index c = 0; c < rm.cols(); ++c)
                os << (c ? "," : "") << format_double(rm(r, c).real()) << ',' << format_double(rm(r, c).imag());
            os << '\n';
        }
        auto js = open_out(path + ".json", false);
        meta["layout"] = "csv rows of interleaved re,im";
        js << meta.dump(2) << '\n';
    } else {
        nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
        for (Eigen::Index r = 0; r < rm.rows(); ++r) {
            nlohmann::json a = nlohmann::json::array(), b = nlohmann::json::array();
            for (Eigen::Index c = 0; c < rm.cols(); ++c) {
                a.push_back(rm(r, c).real());
                b.push_back(rm(r, c).imag());
            }
            re.push_back(a);
            im.push_back(b);
        }
        meta["layout"] = "json";
        meta["re"] = re;
        meta["im"] = im;
        auto os = open_out(path, false);
        os << meta.dump() << '\n';
    }
}

namespace {
OperatorKind kind_from(const std::string& s) {
    for (auto k : {OperatorKind::swf_time, OperatorKind::swf_freq, OperatorKind::swf_time_invmap, OperatorKind::saf_time,
                   OperatorKind::saf_freq, OperatorKind::dual_time, OperatorKind::dual_freq, OperatorKind::oracle})
        if (kind_name(k) == s) return k;
    throw IoError("unknown operator kind '" + s + "'");
}

DomainSpec spec_from(const nlohmann::json& j) {
    const double b = j.at("b").get<double>();
    if (j.at("mode") == "tw") return tw_spec(j.at("N"), j.at("M"), b);
    DomainSpec s = fw_spec(j.at("N"), j.at("L_N"), j.at("M"), j.at("L_M"), b);
    return s;
}
}  // namespace

OperatorMatrix read_matrix(const std::string& path) {
    try {
        const bool is_json = format_for_path(path) == Format::json;
        nlohmann::json meta = nlohmann::json::parse(slurp(is_json ? path : path + ".json"));
        OperatorMatrix op;
        op.kind = kind_from(meta.at("kind"));
        op.b = meta.at("b");
        op.spec = spec_from(meta.at("spec"));
        const Eigen::Index rows = meta.at("rows"), cols = meta.at("cols");
        Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
        if (is_json) {
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index c = 0; c < cols; ++c) rm(r, c) = {meta["re"][r][c].get<double>(), meta["im"][r][c].get<double>()};
        } else if (format_for_path(path) == Format::csv) {
            std::istringstream is(slurp(path));
            std::string line, cell;
            for (Eigen::Index r = 0; r < rows; ++r) {
                if (!std::getline(is, line)) throw IoError("matrix CSV '" + path + "' has too few rows");
                std::istringstream ls(line);
                for (Eigen::Index c = 0; c < cols; ++c) {
                    double re, im;
                    if (!std::getline(ls, cell, ',')) throw IoError("short CSV row");
                    re = std::stod(cell);
                    if (!std::getline(ls, cell, ',')) throw IoError("short CSV row");
                    im = std::stod(cell);
                    rm(r, c) = {re, im};
                }
            }
        } else {
            const std::string data = slurp(path);
            if (data.size() != static_cast<std::size_t>(16 * rows * cols))
                throw IoError("matrix '" + path + "' size does not match its sidecar");
            std::istringstream is(data);
            get_doubles(is, rm.data(), static_cast<std::size_t>(rm.size()));
        }
        op.entries = rm;
        return op;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad matrix metadata for '" + path + "': " + e.what());
    }
}

}  // namespace tfw
