#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "matchbench/market.hpp"

namespace matchbench {

// 17 significant digits, '.' decimal separator, no locale.
std::string format_double(double v);

// Header x1..x_dx,y1..y_dy then one couple per row (RFC 4180, no quoting
// needed for numeric fields).
void write_sample_csv(std::ostream& os, const MatchedSample& sample);
void write_sample_csv(const std::filesystem::path& path, const MatchedSample& sample);
MatchedSample read_sample_csv(std::istream& is);
MatchedSample read_sample_csv(const std::filesystem::path& path);

// Dense numeric matrix, one row per line; an optional non-numeric header
// line is skipped.
MatrixXd read_matrix_csv(const std::filesystem::path& path);

nlohmann::json matrix_to_json(const MatrixXd& m);
MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& field);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Thrown when a file cannot be opened or written; the CLI exits with 1.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace matchbench
