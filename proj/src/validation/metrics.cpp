#include "cgm/validation/metrics.hpp"

#include <algorithm>
#include <fstream>

#include "cgm/reduction/matrix_io.hpp"
#include "cgm/validation/kde.hpp"

namespace cgm {

double total_variance(const std::vector<Points>& clouds) {
  if (clouds.size() < 2) throw DimensionError("total_variance: need at least two clouds");
  const Eigen::Index m = clouds.front().rows();
  Matrix x(static_cast<Eigen::Index>(clouds.size()), 3 * m);
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    if (clouds[i].rows() != m) throw DimensionError("total_variance: clouds differ in point count");
    x.row(static_cast<Eigen::Index>(i)) = flatten(clouds[i]).transpose();
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  return (x.rowwise() - mean).array().square().sum() / static_cast<double>(x.rows() - 1);
}

double total_variance(const std::vector<TriSurface>& surfaces) {
  std::vector<Points> clouds;
  clouds.reserve(surfaces.size());
  for (const auto& s : surfaces) clouds.push_back(s.vertices);
  return total_variance(clouds);
}

const std::vector<std::string>& known_quantities() {
  static const std::vector<std::string> q{"I_xx", "I_yy", "I_zz", "I_xy", "I_xz", "I_yz", "area", "volume"};
  return q;
}

const std::vector<std::string>& default_quantities() {
  static const std::vector<std::string> q{"I_xx", "I_yy", "I_zz", "I_xy", "I_xz", "I_yz", "area"};
  return q;
}

double shape_quantity(const TriSurface& s, const std::string& name) {
  if (name == "area") return surface_area_of(s);
  if (name == "volume") return signed_volume(s.vertices, s.faces);
  const Mat3 inertia = inertia_tensor_of(s.vertices, Vec3::Zero().eval());
  if (name == "I_xx") return inertia(0, 0);
  if (name == "I_yy") return inertia(1, 1);
  if (name == "I_zz") return inertia(2, 2);
  if (name == "I_xy") return inertia(0, 1);
  if (name == "I_xz") return inertia(0, 2);
  if (name == "I_yz") return inertia(1, 2);
  throw ConfigError("unknown quantity '" + name + "'");
}

MetricReport metric_report(const std::vector<TriSurface>& reference, const std::vector<TriSurface>& generated,
                           const std::optional<ConstraintSpec>& constraint, const std::vector<std::string>& quantities) {
  if (reference.empty() || generated.empty()) throw DimensionError("metric_report: empty dataset");
  const Faces& faces = reference.front().faces;
  for (const auto* set : {&reference, &generated})
    for (const auto& s : *set)
      if (s.faces.rows() != faces.rows() || s.faces != faces)
        throw DimensionError("metric_report: datasets do not share connectivity");

  std::vector<std::string> names;
  for (const auto& q : quantities)
    if (std::find(known_quantities().begin(), known_quantities().end(), q) != known_quantities().end() &&
        std::find(names.begin(), names.end(), q) == names.end())
      names.push_back(q);
  if (names.empty()) throw ConfigError("metric_report: none of the requested quantities is known");

  MetricReport report;
  for (const auto& name : names) {
    QuantitySamples qs;
    qs.name = name;
    qs.reference.resize(static_cast<Eigen::Index>(reference.size()));
    qs.generated.resize(static_cast<Eigen::Index>(generated.size()));
    for (std::size_t i = 0; i < reference.size(); ++i)
      qs.reference[static_cast<Eigen::Index>(i)] = shape_quantity(reference[i], name);
    for (std::size_t i = 0; i < generated.size(); ++i)
      qs.generated[static_cast<Eigen::Index>(i)] = shape_quantity(generated[i], name);
    report.rows.push_back({"JSD(" + name + ")", jsd(qs.reference, qs.generated)});
    report.samples.push_back(std::move(qs));
  }
  if (reference.size() >= 2) report.rows.push_back({"Var(reference)", total_variance(reference)});
  if (generated.size() >= 2) report.rows.push_back({"Var(generated)", total_variance(generated)});
  if (constraint) {
    for (const auto& s : generated) {
      report.max_residual = std::max(report.max_residual, constraint->residual(s.vertices, s.faces));
      report.constraint_ok = report.constraint_ok && constraint->satisfied(s.vertices, s.faces);
    }
    report.rows.push_back({"max_residual(" + to_string(constraint->kind) + ")", report.max_residual});
  }
  return report;
}

void write_metric_report(const std::filesystem::path& dir, const MetricReport& report) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.tsv");
    if (!out) throw IoError("cannot write report.tsv in " + dir.string());
    out << "metric\tvalue\n";
    for (const auto& r : report.rows) out << r.name << '\t' << format_double(r.value) << '\n';
  }
  for (const auto& qs : report.samples) {
    const double lo = std::min(qs.reference.minCoeff(), qs.generated.minCoeff());
    const double hi = std::max(qs.reference.maxCoeff(), qs.generated.maxCoeff());
    const double width = hi > lo ? (hi - lo) / kHistogramBins : 1.0;
    std::ofstream out(dir / ("hist_" + qs.name + ".csv"));
    if (!out) throw IoError("cannot write histogram in " + dir.string());
    out << "bin_left,count,dataset\n";
    for (const auto& [label, values] : {std::pair{"reference", &qs.reference}, std::pair{"generated", &qs.generated}}) {
      std::vector<long> counts(kHistogramBins, 0);
      for (Eigen::Index i = 0; i < values->size(); ++i) {
        const int bin = std::clamp(static_cast<int>(((*values)[i] - lo) / width), 0, kHistogramBins - 1);
        ++counts[static_cast<std::size_t>(bin)];
      }
      for (int b = 0; b < kHistogramBins; ++b)
        out << format_double(lo + b * width) << ',' << counts[static_cast<std::size_t>(b)] << ',' << label << '\n';
    }
  }
}

} // namespace cgm
