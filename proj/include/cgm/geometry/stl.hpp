#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cgm/geometry/surface.hpp"

namespace cgm {

/// Vertices closer than this (per coordinate) are merged when reading.
inline constexpr double kWeldTolerance = 1e-9;

/// Parses ASCII STL. Facet corners are welded into shared vertices numbered
/// by first appearance; stored normals are ignored.
TriSurface parse_stl(std::string_view text, double weld_tolerance = kWeldTolerance);
TriSurface read_stl(const std::filesystem::path& path, double weld_tolerance = kWeldTolerance);

/// ASCII STL with 17 significant digits and normals recomputed from the
/// counter-clockwise corner order.
std::string format_stl(const TriSurface& surface, std::string_view name = "cgm");
void write_stl(const TriSurface& surface, const std::filesystem::path& path, std::string_view name = "cgm");

} // namespace cgm
