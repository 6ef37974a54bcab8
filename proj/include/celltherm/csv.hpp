#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace celltherm {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

// Empty string for NaN (used for absent optional measurements).
std::string format_optional(double value);

// Splits one CSV record on commas; no quoting (the formats here never need it).
std::vector<std::string> split_csv_line(const std::string& line);

// Parses a double field; empty means NaN. Throws DomainError with the given
// location string on malformed input.
double parse_csv_field(const std::string& field, const std::string& where);

// Field grid dump: header row carries the z coordinates, first column the
// r coordinates, body holds field(i, j) at (r_i, z_j).
void write_field_csv(const std::string& path, const Eigen::MatrixXd& field,
                     const Eigen::VectorXd& radii, const Eigen::VectorXd& heights);

}  // namespace celltherm
