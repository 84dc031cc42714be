#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "krotov/core.hpp"

namespace krotov::io {

// Plain-text formats:
//   complex matrix: one line per row, each entry written as "re im"
//   state set:      M x N complex matrix, column k holds |phi_k>
//   field:          two columns "t value", one line per interval midpoint
//   real table:     whitespace-separated columns; '#' starts a comment

void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);

void write_states(std::ostream& out, const StateSet& states);
StateSet read_states(std::istream& in);

void write_field(std::ostream& out, const TimeGrid& grid, const RealVector& values);
/// Returns the values column; `times` receives the first column when non-null.
RealVector read_field(std::istream& in, std::vector<double>* times = nullptr);

/// Rows of real numbers; every row must have the same number of columns.
std::vector<std::vector<double>> read_table(std::istream& in);
std::vector<std::vector<double>> read_table_file(const std::string& path);

void save_matrix(const std::string& path, const Matrix& m);
Matrix load_matrix(const std::string& path);

}  // namespace krotov::io
