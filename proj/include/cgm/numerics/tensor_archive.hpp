#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "cgm/numerics/linalg.hpp"

namespace cgm {

/// Named collection of 2-D float64 tensors with a self-describing file layout.
///
/// File layout (all header lines are UTF-8, '\n'-terminated):
///
///     CGM-TENSORS 1
///     count <N>
///     tensor <name> <rows> <cols> <byte offset>     (N lines, sorted by name)
///     payload <total bytes>
///     <payload>
///
/// The payload holds every tensor in row-major order as little-endian IEEE-754
/// binary64; offsets are relative to the first payload byte. Names may not
/// contain whitespace.
class TensorArchive {
public:
  void put(const std::string& name, const Matrix& tensor);
  void put_scalar(const std::string& name, double value) { put(name, Matrix::Constant(1, 1, value)); }

  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }
  const Matrix& get(const std::string& name) const;
  double get_scalar(const std::string& name) const;
  const std::map<std::string, Matrix>& tensors() const { return tensors_; }

  std::string serialize() const;
  static TensorArchive deserialize(const std::string& bytes);

  void save(const std::filesystem::path& path) const;
  static TensorArchive load(const std::filesystem::path& path);

private:
  std::map<std::string, Matrix> tensors_;
};

/// Appends `value` as 8 little-endian bytes.
void append_le_f64(std::string& out, double value);
double read_le_f64(const char* data);

} // namespace cgm
