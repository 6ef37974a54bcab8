#include "celltherm/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <system_error>

#include "celltherm/types.hpp"

namespace celltherm {

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw NumericalError("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::string format_optional(double value) {
  return std::isnan(value) ? std::string() : format_double(value);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_csv_field(const std::string& field, const std::string& where) {
  if (field.empty()) return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DomainError("malformed number '" + field + "' at " + where);
  }
  return value;
}

void write_field_csv(const std::string& path, const Eigen::MatrixXd& field,
                     const Eigen::VectorXd& radii, const Eigen::VectorXd& heights) {
  if (field.rows() != radii.size() || field.cols() != heights.size()) {
    throw DomainError("write_field_csv: field shape does not match coordinates");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open '" + path + "' for writing");
  out << "r_z";
  for (Eigen::Index j = 0; j < heights.size(); ++j) out << ',' << format_double(heights(j));
  out << '\n';
  for (Eigen::Index i = 0; i < radii.size(); ++i) {
    out << format_double(radii(i));
    for (Eigen::Index j = 0; j < heights.size(); ++j) out << ',' << format_double(field(i, j));
    out << '\n';
  }
}

}  // namespace celltherm
