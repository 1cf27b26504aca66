#pragma once

// Plain-text matrix exchange: one row per line, comma separated, no header.

#include <Eigen/Dense>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lcr/error.hpp"

namespace lcr::csv {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end)
    fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  return value;
}

}  // namespace detail

inline Eigen::MatrixXd read_matrix(std::istream& in) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = detail::trim(line);
    if (view.empty()) continue;
    std::size_t count = 0;
    while (true) {
      const auto comma = view.find(',');
      values.push_back(detail::parse_number(view.substr(0, comma), line_no));
      ++count;
      if (comma == std::string_view::npos) break;
      view.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": ragged row (" + std::to_string(count) +
                                      " fields, expected " + std::to_string(cols) + ")");
    }
    ++rows;
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(Eigen::Index(i), Eigen::Index(j)) = values[i * cols + j];
  return m;
}

inline Eigen::MatrixXd read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  return read_matrix(in);
}

/// Labels are a single-column matrix.
inline Eigen::VectorXd read_vector_file(const std::string& path) {
  Eigen::MatrixXd m = read_matrix_file(path);
  if (m.cols() != 1 && m.rows() > 0)
    fail(ErrorCode::ParseError, path + ": expected a single column, got " + std::to_string(m.cols()));
  return m.rows() == 0 ? Eigen::VectorXd() : Eigen::VectorXd(m.col(0));
}

/// Shortest text that round-trips to the same double.
inline std::string format_number(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

template <class Derived>
void write_matrix(std::ostream& out, const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_number(m(i, j));
    }
    out << '\n';
  }
}

template <class Derived>
void write_matrix_file(const std::string& path, const Eigen::MatrixBase<Derived>& m) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ParseError, "cannot write " + path);
  write_matrix(out, m);
}

}  // namespace lcr::csv
