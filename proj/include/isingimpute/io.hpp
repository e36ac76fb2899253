#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isingimpute/dataset.hpp"
#include "isingimpute/fit.hpp"
#include "isingimpute/model.hpp"
#include "isingimpute/recovery.hpp"

namespace isingimpute {

using json = nlohmann::json;

// Shortest decimal representation that round-trips to the same double; used
// for every numeric cell the tool writes.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot open '" + path.string() + "' for writing");
  }
  out << content;
  if (!out) throw ValidationError("failed writing '" + path.string() + "'");
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// FNV-1a 64-bit content digest, hex encoded; enough to detect any content
// change between runs.
inline std::string digest_hex(const std::string& content) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const unsigned char c : content) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  static const char* hexdigits = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) {
    buf[15 - i] = hexdigits[(h >> (4 * i)) & 0xF];
  }
  buf[16] = '\0';
  return std::string(buf);
}

inline std::string digest_file(const std::filesystem::path& path) {
  return digest_hex(read_text_file(path));
}

// ---------------------------------------------------------------------------
// Dataset CSV: header item_1,...,item_J; cells 0, 1, or NA (case sensitive).

inline std::string dataset_to_csv(const ObservedDataset& data) {
  std::ostringstream out;
  for (int j = 0; j < data.n_items(); ++j) {
    out << (j ? "," : "") << "item_" << (j + 1);
  }
  out << '\n';
  for (int i = 0; i < data.n_rows(); ++i) {
    for (int j = 0; j < data.n_items(); ++j) {
      if (j) out << ',';
      const std::int8_t v = data.cells()(i, j);
      out << (v == -1 ? "NA" : v == 1 ? "1" : "0");
    }
    out << '\n';
  }
  return out.str();
}

inline void write_dataset_csv(const std::filesystem::path& path,
                              const ObservedDataset& data) {
  write_text_file(path, dataset_to_csv(data));
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (const char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

}  // namespace detail

// Parses a dataset CSV. Rows with every cell NA mirror the preprocessing of
// screened survey data: they carry no information and are dropped, with the
// count reported through dropped_rows when requested.
inline ObservedDataset parse_dataset_csv(const std::string& content,
                                         int* dropped_rows = nullptr) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("dataset CSV is empty");
  }
  const auto header = detail::split_csv_line(line);
  const int dim = static_cast<int>(header.size());
  for (int j = 0; j < dim; ++j) {
    if (header[static_cast<std::size_t>(j)] !=
        "item_" + std::to_string(j + 1)) {
      throw ValidationError("dataset CSV header must be item_1,...,item_J");
    }
  }
  std::vector<std::int8_t> cells;
  int n_rows = 0;
  int dropped = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (static_cast<int>(fields.size()) != dim) {
      throw ValidationError("dataset CSV row " + std::to_string(n_rows + 1) +
                            " has wrong field count");
    }
    std::vector<std::int8_t> row(static_cast<std::size_t>(dim));
    int missing = 0;
    for (int j = 0; j < dim; ++j) {
      const std::string& f = fields[static_cast<std::size_t>(j)];
      if (f == "0") {
        row[static_cast<std::size_t>(j)] = 0;
      } else if (f == "1") {
        row[static_cast<std::size_t>(j)] = 1;
      } else if (f == "NA") {
        row[static_cast<std::size_t>(j)] = -1;
        ++missing;
      } else {
        throw ValidationError("dataset CSV cell '" + f +
                              "' is not 0, 1 or NA");
      }
    }
    if (missing == dim) {
      ++dropped;
      continue;
    }
    cells.insert(cells.end(), row.begin(), row.end());
    ++n_rows;
  }
  if (n_rows == 0) throw ValidationError("dataset CSV has no usable rows");
  if (dropped_rows) *dropped_rows = dropped;
  CellMatrix m(n_rows, dim);
  for (int i = 0; i < n_rows; ++i) {
    for (int j = 0; j < dim; ++j) {
      m(i, j) = cells[static_cast<std::size_t>(i) * dim + j];
    }
  }
  return ObservedDataset(std::move(m));
}

inline ObservedDataset read_dataset_csv(const std::filesystem::path& path,
                                        int* dropped_rows = nullptr) {
  return parse_dataset_csv(read_text_file(path), dropped_rows);
}

// ---------------------------------------------------------------------------
// Matrix JSON: {"dim": J, "values": [[...], ...]}.

inline json matrix_to_json(const IsingMatrix& s) {
  json values = json::array();
  for (int i = 0; i < s.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < s.dim(); ++j) row.push_back(s(i, j));
    values.push_back(std::move(row));
  }
  return json{{"dim", s.dim()}, {"values", std::move(values)}};
}

inline IsingMatrix matrix_from_json(const json& j) {
  const int dim = j.at("dim").get<int>();
  MatrixXd values(dim, dim);
  const auto& rows = j.at("values");
  if (static_cast<int>(rows.size()) != dim) {
    throw ValidationError("matrix JSON row count mismatch");
  }
  for (int r = 0; r < dim; ++r) {
    if (static_cast<int>(rows[r].size()) != dim) {
      throw ValidationError("matrix JSON column count mismatch");
    }
    for (int c = 0; c < dim; ++c) values(r, c) = rows[r][c].get<double>();
  }
  return IsingMatrix(values, 1e-12);
}

// ---------------------------------------------------------------------------
// Retained-draw CSV: chain,draw,s_1_1,s_2_1,...  (half-vector order).

inline std::string draws_to_csv(const FitResult& result, int dim) {
  std::ostringstream out;
  out << "chain,draw";
  for (int j = 0; j < dim; ++j) {
    for (int i = j; i < dim; ++i) {
      out << ",s_" << (i + 1) << '_' << (j + 1);
    }
  }
  out << '\n';
  for (std::size_t c = 0; c < result.per_parameter_chains.size(); ++c) {
    const MatrixXd& chain = result.per_parameter_chains[c];
    for (Eigen::Index r = 0; r < chain.rows(); ++r) {
      out << c << ',' << r;
      for (Eigen::Index p = 0; p < chain.cols(); ++p) {
        out << ',' << format_double(chain(r, p));
      }
      out << '\n';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// DOT network export: undirected graph, one edge per |estimate| above the
// visualization threshold, colored blue for positive and orange for negative
// weights, thickness scaled by magnitude.

inline std::string network_to_dot(const IsingMatrix& s, double threshold) {
  std::ostringstream out;
  out << "graph ising {\n  node [shape=circle];\n";
  for (int j = 0; j < s.dim(); ++j) {
    out << "  item_" << (j + 1) << ";\n";
  }
  for (int j = 0; j < s.dim(); ++j) {
    for (int l = j + 1; l < s.dim(); ++l) {
      const double w = s(j, l);
      if (std::abs(w) <= threshold) continue;
      out << "  item_" << (j + 1) << " -- item_" << (l + 1) << " [weight="
          << format_double(w) << ", color="
          << (w > 0.0 ? "blue" : "orange") << ", penwidth="
          << format_double(1.0 + 2.0 * std::abs(w)) << "];\n";
    }
  }
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Restricted-distribution CSV for the recover command: column `pattern`
// holds a J-character 0/1 string per retained pattern, plus one row with the
// 2-character pattern "00" carrying the aggregate (Y_1, Y_2) = (0, 0) mass.

inline RestrictedDistribution parse_restricted_csv(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line) ||
      detail::split_csv_line(line) != std::vector<std::string>{"pattern",
                                                               "prob"}) {
    throw ValidationError("restricted CSV header must be pattern,prob");
  }
  RestrictedDistribution r;
  bool saw_00 = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 2) {
      throw ValidationError("restricted CSV rows need pattern,prob");
    }
    const std::string& pattern = fields[0];
    const double prob = std::stod(fields[1]);
    if (pattern == "00") {
      saw_00 = true;
      r.prob_00 = prob;
      continue;
    }
    std::uint32_t bits = 0;
    for (std::size_t j = 0; j < pattern.size(); ++j) {
      if (pattern[j] == '1') {
        bits |= std::uint32_t{1} << j;
      } else if (pattern[j] != '0') {
        throw ValidationError("restricted CSV pattern must be 0/1 string");
      }
    }
    if (r.dim == 0) {
      r.dim = static_cast<int>(pattern.size());
    } else if (r.dim != static_cast<int>(pattern.size())) {
      throw ValidationError("restricted CSV patterns have mixed lengths");
    }
    r.probs_a[bits] = prob;
  }
  if (!saw_00) throw ValidationError("restricted CSV is missing the 00 row");
  return r;
}

inline std::string restricted_to_csv(const RestrictedDistribution& r) {
  std::ostringstream out;
  out << "pattern,prob\n";
  for (const auto& [bits, prob] : r.probs_a) {
    std::string pattern(static_cast<std::size_t>(r.dim), '0');
    for (int j = 0; j < r.dim; ++j) {
      if ((bits >> j) & 1u) pattern[static_cast<std::size_t>(j)] = '1';
    }
    out << pattern << ',' << format_double(prob) << '\n';
  }
  out << "00," << format_double(r.prob_00) << '\n';
  return out.str();
}

}  // namespace isingimpute
