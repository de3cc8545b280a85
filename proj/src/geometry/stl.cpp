#include "cgm/geometry/stl.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace cgm {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_number(std::string_view token, std::size_t line) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  if (!token.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    throw ParseError("non-numeric coordinate '" + std::string(token) + "'", line);
  return value;
}

class Welder {
public:
  explicit Welder(double tol) : tol_(tol) {}

  int insert(const Vec3& p) {
    const Key key = quantize(p);
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = cells_.find({key[0] + dx, key[1] + dy, key[2] + dz});
          if (it == cells_.end()) continue;
          for (int idx : it->second)
            if ((points_[static_cast<std::size_t>(idx)] - p).cwiseAbs().maxCoeff() <= tol_) return idx;
        }
    const int idx = static_cast<int>(points_.size());
    points_.push_back(p);
    cells_[key].push_back(idx);
    return idx;
  }

  const std::vector<Vec3>& points() const { return points_; }

private:
  using Key = std::array<long long, 3>;
  Key quantize(const Vec3& p) const {
    const double cell = tol_ > 0 ? tol_ : 1e-300;
    return {static_cast<long long>(std::floor(p[0] / cell)), static_cast<long long>(std::floor(p[1] / cell)),
            static_cast<long long>(std::floor(p[2] / cell))};
  }

  double tol_;
  std::vector<Vec3> points_;
  std::map<Key, std::vector<int>> cells_;
};

} // namespace

TriSurface parse_stl(std::string_view text, double weld_tolerance) {
  std::vector<std::pair<std::size_t, std::vector<std::string_view>>> lines;
  {
    std::size_t pos = 0, number = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      ++number;
      auto tokens = split_ws(text.substr(pos, end - pos));
      if (!tokens.empty()) lines.emplace_back(number, std::move(tokens));
      if (end == text.size()) break;
      pos = end + 1;
    }
    if (lines.empty()) throw ParseError("empty file", 1);
  }
  const std::size_t eof_line = lines.back().first + 1;

  std::size_t cursor = 0;
  auto expect = [&](std::string_view keyword, std::size_t count) -> const std::vector<std::string_view>& {
    if (cursor >= lines.size()) throw ParseError("unexpected end of file, expected '" + std::string(keyword) + "'", eof_line);
    const auto& [number, tokens] = lines[cursor];
    if (tokens[0] != keyword) throw ParseError("expected '" + std::string(keyword) + "', found '" + std::string(tokens[0]) + "'", number);
    if (count && tokens.size() != count) throw ParseError("malformed '" + std::string(keyword) + "' line", number);
    ++cursor;
    return tokens;
  };

  expect("solid", 0);
  Welder welder(weld_tolerance);
  std::vector<std::array<int, 3>> faces;
  while (true) {
    if (cursor >= lines.size()) throw ParseError("unexpected end of file, expected 'endsolid'", eof_line);
    const auto& [number, tokens] = lines[cursor];
    if (tokens[0] == "endsolid") {
      ++cursor;
      break;
    }
    if (tokens[0] != "facet" || tokens.size() != 5 || tokens[1] != "normal")
      throw ParseError("expected 'facet normal nx ny nz', found '" + std::string(tokens[0]) + "'", number);
    for (int k = 2; k < 5; ++k) parse_number(tokens[static_cast<std::size_t>(k)], number);
    ++cursor;
    {
      const auto& loop = expect("outer", 2);
      if (loop[1] != "loop") throw ParseError("expected 'outer loop'", lines[cursor - 1].first);
    }
    std::array<int, 3> face{};
    for (int c = 0; c < 3; ++c) {
      const std::size_t vline = cursor < lines.size() ? lines[cursor].first : eof_line;
      const auto& v = expect("vertex", 4);
      face[static_cast<std::size_t>(c)] =
          welder.insert(Vec3(parse_number(v[1], vline), parse_number(v[2], vline), parse_number(v[3], vline)));
    }
    expect("endloop", 1);
    expect("endfacet", 1);
    faces.push_back(face);
  }
  if (cursor != lines.size()) throw ParseError("trailing content after 'endsolid'", lines[cursor].first);

  TriSurface s;
  s.vertices.resize(static_cast<Eigen::Index>(welder.points().size()), 3);
  for (std::size_t i = 0; i < welder.points().size(); ++i)
    s.vertices.row(static_cast<Eigen::Index>(i)) = welder.points()[i].transpose();
  s.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (std::size_t f = 0; f < faces.size(); ++f)
    for (int k = 0; k < 3; ++k) s.faces(static_cast<Eigen::Index>(f), k) = faces[f][static_cast<std::size_t>(k)];
  return s;
}

TriSurface read_stl(const std::filesystem::path& path, double weld_tolerance) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_stl: cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_stl(ss.str(), weld_tolerance);
}

std::string format_stl(const TriSurface& surface, std::string_view name) {
  surface.validate();
  std::string out;
  out.reserve(static_cast<std::size_t>(surface.face_count()) * 400 + 64);
  char buf[128];
  auto triple = [&](const char* prefix, const Vec3& v) {
    std::snprintf(buf, sizeof buf, "%s %.17g %.17g %.17g\n", prefix, v[0], v[1], v[2]);
    out += buf;
  };
  out += "solid ";
  out += name;
  out += "\n";
  for (Eigen::Index f = 0; f < surface.face_count(); ++f) {
    const Vec3 a = surface.vertices.row(surface.faces(f, 0)).transpose();
    const Vec3 b = surface.vertices.row(surface.faces(f, 1)).transpose();
    const Vec3 c = surface.vertices.row(surface.faces(f, 2)).transpose();
    Vec3 n = (b - a).cross(c - a);
    const double len = n.norm();
    n = len > 0 ? Vec3(n / len) : Vec3::Zero();
    triple("  facet normal", n);
    out += "    outer loop\n";
    triple("      vertex", a);
    triple("      vertex", b);
    triple("      vertex", c);
    out += "    endloop\n";
    out += "  endfacet\n";
  }
  out += "endsolid ";
  out += name;
  out += "\n";
  return out;
}

void write_stl(const TriSurface& surface, const std::filesystem::path& path, std::string_view name) {
  const std::string text = format_stl(surface, name);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_stl: cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

} // namespace cgm
