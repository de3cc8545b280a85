#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "cgm/geometry/surface.hpp"

namespace cgm::test {

/// Unit tetrahedron with outward faces.
inline TriSurface unit_tetrahedron() {
  TriSurface s;
  s.vertices.resize(4, 3);
  s.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1;
  s.faces.resize(4, 3);
  s.faces << 0, 2, 1, 0, 1, 3, 0, 3, 2, 1, 2, 3;
  return s;
}

/// Unit cube [0,1]^3, vertex index x + 2y + 4z, 12 outward triangles.
inline TriSurface unit_cube() {
  TriSurface s;
  s.vertices.resize(8, 3);
  for (int v = 0; v < 8; ++v) s.vertices.row(v) << (v & 1), ((v >> 1) & 1), ((v >> 2) & 1);
  s.faces.resize(12, 3);
  s.faces << 0, 2, 3, 0, 3, 1, 4, 5, 7, 4, 7, 6, 0, 1, 5, 0, 5, 4, 2, 6, 7, 2, 7, 3, 0, 4, 6, 0, 6, 2, 1, 3, 7, 1, 7,
      5;
  return s;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::path(CGM_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace cgm::test
