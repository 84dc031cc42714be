#include "krotov/io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace krotov::io {
namespace {

constexpr int kDigits = std::numeric_limits<double>::max_digits10;

std::vector<std::vector<double>> parse_rows(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream ls(line);
    std::vector<double> row;
    std::string token;
    while (ls >> token) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(token, &used));
        if (used != token.size()) {
          throw std::invalid_argument(token);
        }
      } catch (const std::exception&) {
        throw Error("line " + std::to_string(line_no) + ": not a number: '" + token + "'");
      }
    }
    if (row.empty()) {
      continue;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error("line " + std::to_string(line_no) + ": expected " +
                  std::to_string(rows.front().size()) + " columns, found " +
                  std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_matrix(std::ostream& out, const Matrix& m) {
  out << std::setprecision(kDigits);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) {
        out << "  ";
      }
      out << m(r, c).real() << ' ' << m(r, c).imag();
    }
    out << '\n';
  }
}

Matrix read_matrix(std::istream& in) {
  const auto rows = parse_rows(in);
  if (rows.empty()) {
    return Matrix();
  }
  if (rows.front().size() % 2 != 0) {
    throw Error("read_matrix: odd number of columns, expected 're im' pairs");
  }
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = static_cast<Eigen::Index>(rows.front().size() / 2);
  Matrix m(n_rows, n_cols);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < n_cols; ++c) {
      m(r, c) = Complex(row[static_cast<std::size_t>(2 * c)],
                        row[static_cast<std::size_t>(2 * c + 1)]);
    }
  }
  return m;
}

void write_states(std::ostream& out, const StateSet& states) {
  if (states.empty()) {
    return;
  }
  Matrix m(states.front().size(), static_cast<Eigen::Index>(states.size()));
  for (std::size_t k = 0; k < states.size(); ++k) {
    m.col(static_cast<Eigen::Index>(k)) = states[k];
  }
  write_matrix(out, m);
}

StateSet read_states(std::istream& in) {
  const Matrix m = read_matrix(in);
  StateSet states;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    states.emplace_back(m.col(c));
  }
  return states;
}

void write_field(std::ostream& out, const TimeGrid& grid, const RealVector& values) {
  if (static_cast<std::size_t>(values.size()) != grid.n_steps()) {
    throw Error("write_field: field length does not match the grid");
  }
  out << std::setprecision(kDigits);
  for (std::size_t j = 0; j < grid.n_steps(); ++j) {
    out << grid.midpoint(j) << ' ' << values[static_cast<Eigen::Index>(j)] << '\n';
  }
}

RealVector read_field(std::istream& in, std::vector<double>* times) {
  const auto rows = parse_rows(in);
  if (!rows.empty() && rows.front().size() != 2) {
    throw Error("read_field: expected two columns 't value'");
  }
  RealVector values(static_cast<Eigen::Index>(rows.size()));
  if (times) {
    times->clear();
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    values[static_cast<Eigen::Index>(i)] = rows[i][1];
    if (times) {
      times->push_back(rows[i][0]);
    }
  }
  return values;
}

std::vector<std::vector<double>> read_table(std::istream& in) { return parse_rows(in); }

std::vector<std::vector<double>> read_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open '" + path + "'");
  }
  try {
    return parse_rows(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

void save_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write '" + path + "'");
  }
  write_matrix(out, m);
}

Matrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open '" + path + "'");
  }
  return read_matrix(in);
}

}  // namespace krotov::io
