#pragma once

// File formats:
//   model JSON   {"A": [[...]], "B": ..., "C": ..., "D": ...}   (row-major)
//   supply JSON  {"N": .., "m": .., "p": .., "blocks": {"0,0": [[...]], ...}}
//   trajectory CSV with header  k,u_1..u_m,y_1..y_p  and optional JSON
//   sidecar {"m": .., "p": .., "origin": ..}.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ddd/errors.hpp"
#include "ddd/linalg.hpp"
#include "ddd/lti.hpp"
#include "ddd/supply_rate.hpp"
#include "ddd/trajectory.hpp"

namespace ddd::io {

using json = nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// 17 significant digits: reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  if (len <= 0 || len >= static_cast<int>(sizeof buf)) throw FormatError("cannot format number");
  return {buf, static_cast<std::size_t>(len)};
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j))) throw FormatError("refusing to serialize non-finite entry");
      row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j, const std::string& name) {
  if (!j.is_array()) throw FormatError(name + ": expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) throw FormatError(name + ": expected nested arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw FormatError(name + ": ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw FormatError(name + ": non-numeric entry");
      m(i, c) = v.get<double>();
      if (!std::isfinite(m(i, c))) throw NumericalError(name + ": non-finite entry");
    }
  }
  return m;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
  if (!out) throw FormatError("write failed for " + path);
}

// --- models ---------------------------------------------------------------

inline json model_to_json(const StateSpaceModel& m) {
  return {{"A", matrix_to_json(m.A())},
          {"B", matrix_to_json(m.B())},
          {"C", matrix_to_json(m.C())},
          {"D", matrix_to_json(m.D())}};
}

inline StateSpaceModel model_from_json(const json& j) {
  for (const char* key : {"A", "B", "C", "D"})
    if (!j.contains(key)) throw FormatError(std::string("model is missing \"") + key + "\"");
  return {matrix_from_json(j["A"], "A"), matrix_from_json(j["B"], "B"),
          matrix_from_json(j["C"], "C"), matrix_from_json(j["D"], "D")};
}

inline StateSpaceModel read_model(const std::string& path) { return model_from_json(read_json_file(path)); }

inline void write_model(const std::string& path, const StateSpaceModel& m) {
  write_text_file(path, model_to_json(m).dump(2) + "\n");
}

// --- supply rates -----------------------------------------------------------

inline json supply_to_json(const SupplyRate& s) {
  json blocks = json::object();
  for (const auto& [ij, b] : s.upper_blocks())
    blocks[std::to_string(ij.first) + "," + std::to_string(ij.second)] = matrix_to_json(b);
  return {{"N", s.depth()}, {"m", s.inputs()}, {"p", s.outputs()}, {"blocks", blocks}};
}

inline SupplyRate supply_from_json(const json& j) {
  for (const char* key : {"N", "m", "p", "blocks"})
    if (!j.contains(key)) throw FormatError(std::string("supply is missing \"") + key + "\"");
  std::map<SupplyRate::BlockIndex, Matrix> blocks;
  for (const auto& [key, value] : j["blocks"].items()) {
    int i = 0, k = 0;
    char comma = 0;
    std::istringstream ks(key);
    if (!(ks >> i >> comma >> k) || comma != ',' || !ks.eof())
      throw FormatError("bad block key \"" + key + "\", expected \"i,j\"");
    blocks.emplace(SupplyRate::BlockIndex{i, k}, matrix_from_json(value, "block " + key));
  }
  return {j["N"].get<int>(), j["m"].get<Eigen::Index>(), j["p"].get<Eigen::Index>(), blocks};
}

inline SupplyRate read_supply(const std::string& path) { return supply_from_json(read_json_file(path)); }

inline void write_supply(const std::string& path, const SupplyRate& s) {
  write_text_file(path, supply_to_json(s).dump(2) + "\n");
}

// --- trajectories -------------------------------------------------------------

inline std::string trajectory_to_csv(const Trajectory& t) {
  std::string out = "k";
  for (Eigen::Index i = 1; i <= t.inputs(); ++i) out += ",u_" + std::to_string(i);
  for (Eigen::Index i = 1; i <= t.outputs(); ++i) out += ",y_" + std::to_string(i);
  out += '\n';
  for (Eigen::Index k = 0; k < t.length(); ++k) {
    out += std::to_string(k);
    for (Eigen::Index i = 0; i < t.inputs(); ++i) out += ',' + format_double(t.u()(i, k));
    for (Eigen::Index i = 0; i < t.outputs(); ++i) out += ',' + format_double(t.y()(i, k));
    out += '\n';
  }
  return out;
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, std::size_t line_no) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError("line " + std::to_string(line_no) + ": cannot parse \"" + std::string(s) + "\"");
  if (!std::isfinite(v)) throw NumericalError("line " + std::to_string(line_no) + ": non-finite value");
  return v;
}

}  // namespace detail

inline Trajectory trajectory_from_csv(const std::string& text, Eigen::Index origin = 0) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty trajectory file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string header_line = line;
  const auto header = detail::split(header_line, ',');
  if (header.empty() || header[0] != "k") throw FormatError("header must start with \"k\"");
  Eigen::Index m = 0, p = 0;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string expect_u = "u_" + std::to_string(m + 1);
    const std::string expect_y = "y_" + std::to_string(p + 1);
    if (p == 0 && header[c] == expect_u) {
      ++m;
    } else if (header[c] == expect_y) {
      ++p;
    } else {
      throw FormatError("unexpected header column \"" + std::string(header[c]) + "\"");
    }
  }
  if (m < 1 || p < 1) throw FormatError("trajectory needs at least one u_ and one y_ column");

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split(line, ',');
    if (cells.size() != header.size())
      throw FormatError("line " + std::to_string(line_no) + ": wrong number of columns");
    const double k = detail::parse_double(cells[0], line_no);
    if (k != static_cast<double>(rows.size()))
      throw FormatError("line " + std::to_string(line_no) + ": sample index out of sequence");
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) row.push_back(detail::parse_double(cells[c], line_no));
    rows.push_back(std::move(row));
  }
  const auto t = static_cast<Eigen::Index>(rows.size());
  Matrix u(m, t), y(p, t);
  for (Eigen::Index k = 0; k < t; ++k) {
    const auto& row = rows[static_cast<std::size_t>(k)];
    for (Eigen::Index i = 0; i < m; ++i) u(i, k) = row[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i < p; ++i) y(i, k) = row[static_cast<std::size_t>(m + i)];
  }
  return {u, y, origin};
}

inline json trajectory_sidecar(const Trajectory& t) {
  return {{"m", t.inputs()}, {"p", t.outputs()}, {"origin", t.origin()}};
}

inline void write_trajectory(const std::string& path, const Trajectory& t) {
  write_text_file(path, trajectory_to_csv(t));
}

/// Reads `path`; if `path + ".json"` exists it supplies the origin and is
/// checked against the CSV dimensions.
inline Trajectory read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  Eigen::Index origin = 0;
  const std::string sidecar = path + ".json";
  std::ifstream side(sidecar);
  json meta;
  if (side) {
    meta = read_json_file(sidecar);
    origin = meta.value("origin", Eigen::Index{0});
  }
  Trajectory t = trajectory_from_csv(buf.str(), origin);
  if (side && ((meta.contains("m") && meta["m"].get<Eigen::Index>() != t.inputs()) ||
               (meta.contains("p") && meta["p"].get<Eigen::Index>() != t.outputs())))
    throw FormatError(sidecar + ": dimensions disagree with " + path);
  return t;
}

}  // namespace ddd::io
