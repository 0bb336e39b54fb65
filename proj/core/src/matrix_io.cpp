#include "dsm/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "dsm/errors.hpp"

namespace dsm::io {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& token, std::size_t line) {
  const std::string t = trim(token);
  double value = 0.0;
  const auto* begin = t.data();
  const auto* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (t.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::Input,
                "line " + std::to_string(line) + ": cannot parse number '" + t + "'");
  }
  return value;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Input, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Input, "cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

Matrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw Error(ErrorKind::Input, "empty MatrixMarket stream");
  std::istringstream banner(lower(line));
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%matrixmarket" || object != "matrix") {
    throw Error(ErrorKind::Input, "missing %%MatrixMarket matrix banner");
  }
  if (format != "coordinate" && format != "array") {
    throw Error(ErrorKind::Input, "unsupported MatrixMarket format '" + format + "'");
  }
  if (field != "real" && field != "integer" && field != "double") {
    throw Error(ErrorKind::Input, "unsupported MatrixMarket field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric") {
    throw Error(ErrorKind::Input, "unsupported MatrixMarket symmetry '" + symmetry + "'");
  }

  // Data lines, comments removed.
  std::vector<std::pair<std::size_t, std::string>> data;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '%') continue;
    data.emplace_back(line_no, t);
  }
  if (data.empty()) throw Error(ErrorKind::Input, "MatrixMarket size line missing");

  std::istringstream size_line(data.front().second);
  long rows = 0, cols = 0, nnz = 0;
  size_line >> rows >> cols;
  if (format == "coordinate") size_line >> nnz;
  if (!size_line || rows < 1 || cols < 1) {
    throw Error(ErrorKind::Input, "invalid MatrixMarket size line");
  }
  const bool symmetric = symmetry != "general";
  const double mirror = symmetry == "skew-symmetric" ? -1.0 : 1.0;
  if (symmetric && rows != cols) {
    throw Error(ErrorKind::Input, "symmetric MatrixMarket matrix must be square");
  }

  Matrix m = Matrix::Zero(rows, cols);
  if (format == "coordinate") {
    if (static_cast<long>(data.size()) - 1 != nnz) {
      throw Error(ErrorKind::Input, "MatrixMarket entry count does not match header");
    }
    for (std::size_t k = 1; k < data.size(); ++k) {
      std::istringstream entry(data[k].second);
      long i = 0, j = 0;
      std::string value;
      entry >> i >> j >> value;
      if (!entry || i < 1 || j < 1 || i > rows || j > cols) {
        throw Error(ErrorKind::Input,
                    "line " + std::to_string(data[k].first) + ": invalid coordinate entry");
      }
      const double x = parse_double(value, data[k].first);
      m(i - 1, j - 1) += x;
      if (symmetric && i != j) m(j - 1, i - 1) += mirror * x;
    }
  } else {
    std::size_t k = 1;
    for (long j = 0; j < cols; ++j) {
      const long first_row = symmetric ? j + (symmetry == "skew-symmetric" ? 1 : 0) : 0;
      for (long i = first_row; i < rows; ++i) {
        if (k >= data.size()) throw Error(ErrorKind::Input, "MatrixMarket array data truncated");
        const double x = parse_double(data[k].second, data[k].first);
        ++k;
        m(i, j) = x;
        if (symmetric && i != j) m(j, i) = mirror * x;
      }
    }
    if (k != data.size()) throw Error(ErrorKind::Input, "trailing data in MatrixMarket array");
  }
  if (!m.allFinite()) throw Error(ErrorKind::Input, "MatrixMarket matrix has non-finite entries");
  return m;
}

Matrix read_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const Matrix& m, const std::string& comment) {
  out << "%%MatrixMarket matrix array real general\n";
  if (!comment.empty()) {
    std::istringstream lines(comment);
    std::string l;
    while (std::getline(lines, l)) out << "% " << l << '\n';
  }
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) out << format_double(m(i, j)) << '\n';
  }
}

void write_matrix_market(const std::filesystem::path& path, const Matrix& m,
                         const std::string& comment) {
  auto out = open_out(path);
  write_matrix_market(out, m, comment);
}

Matrix read_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      row.push_back(parse_double(line.substr(start, comma - start), line_no));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorKind::Input, "line " + std::to_string(line_no) + ": ragged CSV row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::Input, "empty CSV matrix");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  if (!m.allFinite()) throw Error(ErrorKind::Input, "CSV matrix has non-finite entries");
  return m;
}

Matrix read_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_csv(in);
}

void write_csv(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_out(path);
  write_csv(out, m);
}

Matrix read_matrix(const std::filesystem::path& path) {
  if (lower(path.extension().string()) == ".mtx") return read_matrix_market(path);
  return read_csv(path);
}

}  // namespace dsm::io
