#include "cgm/reduction/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cgm/numerics/tensor_archive.hpp"

namespace cgm {

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::string bytes = "CGM-MATRIX " + std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  bytes.reserve(bytes.size() + static_cast<std::size_t>(m.size()) * 8);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) append_le_f64(bytes, m(i, j));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Matrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw ParseError("matrix file has no header", 1);
  std::istringstream header(bytes.substr(0, nl));
  std::string magic;
  long long rows = -1, cols = -1;
  header >> magic >> rows >> cols;
  if (magic != "CGM-MATRIX" || rows < 0 || cols < 0) throw ParseError("bad matrix header", 1);
  const std::size_t need = static_cast<std::size_t>(rows * cols) * 8;
  if (bytes.size() - nl - 1 != need) throw ParseError("matrix payload size does not match header", 2);
  Matrix m(rows, cols);
  const char* p = bytes.data() + nl + 1;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j, p += 8) m(i, j) = read_le_f64(p);
  return m;
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_error_table(const std::filesystem::path& path, const std::vector<ErrorRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "method\ttrain_error\ttest_error\n";
  for (const auto& r : rows)
    out << r.method << '\t' << format_double(r.train_error) << '\t' << format_double(r.test_error) << '\n';
}

} // namespace cgm
