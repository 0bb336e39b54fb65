#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "dsm/linalg.hpp"

namespace dsm::io {

/// Reads a MatrixMarket file. Supports the `matrix coordinate` and
/// `matrix array` formats with `real` or `integer` fields and `general`,
/// `symmetric` or `skew-symmetric` storage.
Matrix read_matrix_market(std::istream& in);
Matrix read_matrix_market(const std::filesystem::path& path);

/// Writes `matrix array real general` (column-major, 17 significant digits).
void write_matrix_market(std::ostream& out, const Matrix& m, const std::string& comment = {});
void write_matrix_market(const std::filesystem::path& path, const Matrix& m,
                         const std::string& comment = {});

/// Plain CSV: one matrix row per line, comma-separated. Blank lines are
/// skipped; every row must have the same number of fields.
Matrix read_csv(std::istream& in);
Matrix read_csv(const std::filesystem::path& path);

void write_csv(std::ostream& out, const Matrix& m);
void write_csv(const std::filesystem::path& path, const Matrix& m);

/// Dispatches on extension: `.mtx` is MatrixMarket, anything else CSV.
Matrix read_matrix(const std::filesystem::path& path);

/// Formats a double in scientific notation with 17 significant digits.
std::string format_double(double x);

}  // namespace dsm::io
