#include "matchbench/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "matchbench/errors.hpp"

namespace matchbench {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_sample_csv(std::ostream& os, const MatchedSample& sample) {
  for (Eigen::Index j = 0; j < sample.dx(); ++j) os << (j ? "," : "") << 'x' << (j + 1);
  for (Eigen::Index j = 0; j < sample.dy(); ++j) os << ",y" << (j + 1);
  os << '\n';
  std::string line;
  for (Eigen::Index i = 0; i < sample.n(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < sample.dx(); ++j) {
      if (j) line += ',';
      line += format_double(sample.xs(i, j));
    }
    for (Eigen::Index j = 0; j < sample.dy(); ++j) {
      line += ',';
      line += format_double(sample.ys(i, j));
    }
    line += '\n';
    os << line;
  }
}

void write_sample_csv(const std::filesystem::path& path, const MatchedSample& sample) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  write_sample_csv(os, sample);
  if (!os) throw IoError("failed writing " + path.string());
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

}  // namespace

MatchedSample read_sample_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("sample CSV is empty");
  const auto header = split_fields(line);
  Eigen::Index dx = 0, dy = 0;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& h = header[c];
    const bool is_x = !h.empty() && h[0] == 'x';
    const bool is_y = !h.empty() && h[0] == 'y';
    if (is_x && dy == 0 && h == "x" + std::to_string(dx + 1)) {
      ++dx;
    } else if (is_y && h == "y" + std::to_string(dy + 1)) {
      ++dy;
    } else {
      throw ConfigError("sample CSV header: unexpected column '" + h + "' at position " + std::to_string(c + 1) +
                        " (expected x1..x_dx,y1..y_dy)");
    }
  }
  if (dx == 0 || dy == 0) throw ConfigError("sample CSV header needs at least one x and one y column");

  std::vector<double> values;
  std::size_t rows = 0, line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (static_cast<Eigen::Index>(fields.size()) != dx + dy) {
      throw ConfigError("sample CSV line " + std::to_string(line_no) + ": expected " + std::to_string(dx + dy) +
                        " fields, got " + std::to_string(fields.size()));
    }
    for (const auto& f : fields) {
      double v = 0.0;
      if (!parse_double(f, v)) {
        throw ConfigError("sample CSV line " + std::to_string(line_no) + ": '" + f + "' is not a number");
      }
      values.push_back(v);
    }
    ++rows;
  }
  MatchedSample s;
  s.xs.resize(static_cast<Eigen::Index>(rows), dx);
  s.ys.resize(static_cast<Eigen::Index>(rows), dy);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto* row = values.data() + r * static_cast<std::size_t>(dx + dy);
    for (Eigen::Index j = 0; j < dx; ++j) s.xs(static_cast<Eigen::Index>(r), j) = row[j];
    for (Eigen::Index j = 0; j < dy; ++j) s.ys(static_cast<Eigen::Index>(r), j) = row[dx + j];
  }
  return s;
}

MatchedSample read_sample_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path.string());
  return read_sample_csv(is);
}

MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    std::vector<double> row;
    bool numeric = true;
    for (const auto& f : fields) {
      double v = 0.0;
      if (!parse_double(f, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;  // header
      throw ConfigError(path.string() + " line " + std::to_string(line_no) + ": non-numeric entry");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError(path.string() + " line " + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(path.string() + " holds no matrix rows");
  MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

nlohmann::json matrix_to_json(const MatrixXd& m) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    j.push_back(row);
  }
  return j;
}

MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError("config field '" + field + "': expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ConfigError("config field '" + field + "': rows must be non-empty arrays");
  MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw ConfigError("config field '" + field + "[" + std::to_string(i) + "]': ragged row");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[i][c].is_number()) {
        throw ConfigError("config field '" + field + "[" + std::to_string(i) + "][" + std::to_string(c) +
                          "]': expected a number");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
    }
  }
  return m;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << text;
  if (!os) throw IoError("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace matchbench
