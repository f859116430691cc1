#pragma once
// Signal and matrix files: little-endian complex128 binary, CSV, JSON.

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "json.hpp"
#include "tfw/swf.hpp"

namespace tfw {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Format { binary, csv, json };
Format parse_format(const std::string& s);
// by extension: .csv, .json, anything else binary
Format format_for_path(const std::string& path);

// 8-byte magic followed by the sample count as uint64
inline constexpr char kSignalMagic[8] = {'T', 'F', 'W', 'S', 'I', 'G', '0', '1'};

void write_signal(const std::string& path, const Eigen::VectorXcd& x, Format f);
// detects the binary header, otherwise parses JSON or CSV
Eigen::VectorXcd read_signal(const std::string& path);

nlohmann::json spec_to_json(const DomainSpec& spec);
// binary writes path (raw row-major complex128) and path + ".json"
void write_matrix(const std::string& path, const OperatorMatrix& op, Format f);
OperatorMatrix read_matrix(const std::string& path);

// 17 significant digits
std::string format_double(double v);

}  // namespace tfw
