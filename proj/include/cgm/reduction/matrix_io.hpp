#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cgm/numerics/linalg.hpp"

namespace cgm {

/// "CGM-MATRIX <rows> <cols>\n" followed by rows*cols little-endian binary64
/// values in row-major order.
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

struct ErrorRow {
  std::string method;
  double train_error = 0.0;
  double test_error = 0.0;
};

/// TSV with header "method\ttrain_error\ttest_error".
void write_error_table(const std::filesystem::path& path, const std::vector<ErrorRow>& rows);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

} // namespace cgm
