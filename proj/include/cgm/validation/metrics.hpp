#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cgm/constraints/dataset.hpp"
#include "cgm/geometry/surface.hpp"

namespace cgm {

/// Sum over all 3M coordinates of the unbiased per-coordinate variance.
double total_variance(const std::vector<Points>& clouds);
double total_variance(const std::vector<TriSurface>& surfaces);

/// Quantity names understood by metric_report.
const std::vector<std::string>& known_quantities(); // I_xx I_yy I_zz I_xy I_xz I_yz area volume
const std::vector<std::string>& default_quantities(); // the six inertia components and area

/// Scalar geometric quantity of a surface; inertia about the coordinate axes.
double shape_quantity(const TriSurface& surface, const std::string& name);

inline constexpr int kHistogramBins = 20;

struct MetricRow {
  std::string name;
  double value = 0.0;
};

struct QuantitySamples {
  std::string name;
  Vector reference;
  Vector generated;
};

struct MetricReport {
  std::vector<MetricRow> rows; // JSD(q) per quantity, Var(reference), Var(generated), residual rows
  std::vector<QuantitySamples> samples;
  double max_residual = 0.0; // of the generated set, 0 without a constraint
  bool constraint_ok = true;
};

/// Compares two datasets on the requested quantities (those not known are
/// dropped; none left is an error).
MetricReport metric_report(const std::vector<TriSurface>& reference, const std::vector<TriSurface>& generated,
                           const std::optional<ConstraintSpec>& constraint,
                           const std::vector<std::string>& quantities = default_quantities());

/// report.tsv (name, value) plus hist_<quantity>.csv with `kHistogramBins`
/// bins over the union range: bin_left,count,dataset.
void write_metric_report(const std::filesystem::path& dir, const MetricReport& report);

} // namespace cgm
