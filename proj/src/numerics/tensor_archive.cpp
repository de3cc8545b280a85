#include "cgm/numerics/tensor_archive.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cgm {

void append_le_f64(std::string& out, double value) {
  auto bits = std::bit_cast<std::uint64_t>(value);
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xffU);
  out.append(buf, 8);
}

double read_le_f64(const char* data) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[i])) << (8 * i);
  return std::bit_cast<double>(bits);
}

void TensorArchive::put(const std::string& name, const Matrix& tensor) {
  if (name.empty() || name.find_first_of(" \t\n\r") != std::string::npos)
    throw ConfigError("TensorArchive: invalid tensor name '" + name + "'");
  tensors_[name] = tensor;
}

const Matrix& TensorArchive::get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw IoError("TensorArchive: missing tensor '" + name + "'");
  return it->second;
}

double TensorArchive::get_scalar(const std::string& name) const {
  const Matrix& m = get(name);
  if (m.size() != 1) throw DimensionError("TensorArchive: '" + name + "' is not a scalar");
  return m(0, 0);
}

std::string TensorArchive::serialize() const {
  std::ostringstream header;
  header << "CGM-TENSORS 1\n";
  header << "count " << tensors_.size() << "\n";
  std::size_t offset = 0;
  std::string payload;
  for (const auto& [name, t] : tensors_) {
    header << "tensor " << name << " " << t.rows() << " " << t.cols() << " " << offset << "\n";
    for (Eigen::Index i = 0; i < t.rows(); ++i)
      for (Eigen::Index j = 0; j < t.cols(); ++j) append_le_f64(payload, t(i, j));
    offset += static_cast<std::size_t>(t.size()) * 8;
  }
  header << "payload " << payload.size() << "\n";
  return header.str() + payload;
}

TensorArchive TensorArchive::deserialize(const std::string& bytes) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&]() {
    const std::size_t end = bytes.find('\n', pos);
    if (end == std::string::npos) throw ParseError("TensorArchive: truncated header", line_no + 1);
    std::string line = bytes.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    return line;
  };

  if (next_line() != "CGM-TENSORS 1") throw ParseError("TensorArchive: bad magic", line_no);
  std::size_t count = 0;
  {
    std::istringstream in(next_line());
    std::string key;
    if (!(in >> key >> count) || key != "count") throw ParseError("TensorArchive: expected 'count'", line_no);
  }
  struct Entry {
    std::string name;
    long rows, cols;
    std::size_t offset;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < count; ++i) {
    std::istringstream in(next_line());
    std::string key;
    Entry e;
    if (!(in >> key >> e.name >> e.rows >> e.cols >> e.offset) || key != "tensor" || e.rows < 0 || e.cols < 0)
      throw ParseError("TensorArchive: malformed tensor line", line_no);
    entries.push_back(e);
  }
  std::size_t total = 0;
  {
    std::istringstream in(next_line());
    std::string key;
    if (!(in >> key >> total) || key != "payload") throw ParseError("TensorArchive: expected 'payload'", line_no);
  }
  if (bytes.size() - pos != total) throw ParseError("TensorArchive: payload size mismatch", line_no);

  TensorArchive archive;
  for (const Entry& e : entries) {
    const std::size_t need = static_cast<std::size_t>(e.rows * e.cols) * 8;
    if (e.offset + need > total) throw ParseError("TensorArchive: tensor '" + e.name + "' exceeds payload", line_no);
    Matrix t(e.rows, e.cols);
    const char* base = bytes.data() + pos + e.offset;
    for (long i = 0; i < e.rows; ++i)
      for (long j = 0; j < e.cols; ++j) t(i, j) = read_le_f64(base + 8 * (i * e.cols + j));
    archive.tensors_[e.name] = std::move(t);
  }
  return archive;
}

void TensorArchive::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("TensorArchive: cannot open '" + path.string() + "' for writing");
  const std::string bytes = serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

TensorArchive TensorArchive::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("TensorArchive: cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

} // namespace cgm
