#include "cgm/cli/pipeline.hpp"

#include <fstream>
#include <ostream>

#include "cgm/generative/io.hpp"
#include "cgm/generative/train.hpp"
#include "cgm/geometry/stl.hpp"
#include "cgm/numerics/keyvalue.hpp"
#include "cgm/numerics/parallel.hpp"
#include "cgm/reduction/active_subspace.hpp"
#include "cgm/reduction/matrix_io.hpp"
#include "cgm/reduction/podi.hpp"
#include "cgm/synthfield/field.hpp"
#include "cgm/validation/metrics.hpp"

namespace cgm {

namespace fs = std::filesystem;

namespace {

int threads_of(const PipelineConfig& c) { return static_cast<int>(std::max(1L, c.get_long("threads"))); }

fs::path required_path(const PipelineConfig& c, const std::string& key) {
  const fs::path p = c.get_path(key);
  if (p.empty()) throw ConfigError(key + " is not set");
  if (!fs::exists(p)) throw IoError(key + ": " + p.string() + " does not exist");
  return p;
}

/// Lists failing samples on `log`; returns the number of failures.
int report_violations(const std::vector<TriSurface>& surfaces, const ConstraintSpec& spec, std::ostream& log) {
  int failures = 0;
  for (std::size_t i = 0; i < surfaces.size(); ++i)
    if (!spec.satisfied(surfaces[i].vertices, surfaces[i].faces)) {
      ++failures;
      log << "constraint violated: sample " << i << " residual "
          << format_double(spec.residual(surfaces[i].vertices, surfaces[i].faces)) << "\n";
    }
  return failures;
}

void write_split(const fs::path& dir, const TriSurface& base, const CffdSpec& spec, int n, std::uint64_t seed,
                 int threads) {
  const auto samples = sample_cffd_dataset(base, spec, n, seed, threads);
  write_cffd_dataset(dir, samples, spec, {"seed=" + std::to_string(seed)});
  Matrix d(n, 3 * spec.lattice.control_count());
  for (int i = 0; i < n; ++i) {
    const DisplacementField total = samples[static_cast<std::size_t>(i)].free + samples[static_cast<std::size_t>(i)].correction;
    d.row(i) = Eigen::Map<const Vector>(total.data(), total.size()).transpose();
  }
  write_matrix(dir / "displacements.bin", d);
}

void write_sample_meta(const fs::path& dir, const ConstraintSpec& spec, std::size_t n) {
  std::ofstream m(dir / "meta.txt");
  m << "constraint.kind=" << to_string(spec.kind) << "\n";
  m << "constraint.target=" << spec.target_text() << "\n";
  m << "samples=" << n << "\n";
}

} // namespace

std::optional<ConstraintSpec> read_dataset_constraint(const fs::path& dir, const VolumeEnforcement& how) {
  if (!fs::exists(dir / "meta.txt")) return std::nullopt;
  const auto kv = parse_key_values(read_text_file((dir / "meta.txt").string()));
  const auto kind = kv.find("constraint.kind");
  const auto target = kv.find("constraint.target");
  if (kind == kv.end() || target == kv.end()) return std::nullopt;
  ConstraintSpec spec;
  spec.kind = constraint_kind_from_string(kind->second);
  spec.volume_how = how;
  const auto values = parse_doubles("constraint.target", target->second);
  if (spec.kind == ConstraintKind::barycenter) {
    if (values.size() != 3) throw ConfigError("barycenter target needs three values");
    spec.barycenter = Vec3(values[0], values[1], values[2]);
  } else {
    if (values.size() != 1) throw ConfigError("volume target needs one value");
    spec.volume = values[0];
  }
  return spec;
}

int cmd_generate(const PipelineConfig& c, std::ostream& log) {
  const fs::path out = c.get_path("out");
  const TriSurface base = c.base_shape();
  const FfdLattice lattice = c.lattice();
  CffdSpec spec{lattice, c.constraint_for(base), c.cffd_options(lattice), c.get_double("dataset.sigma")};
  const long n_train = c.get_long("dataset.n_train"), n_test = c.get_long("dataset.n_test");
  if (n_train < 1 || n_test < 0) throw ConfigError("dataset.n_train must be positive and dataset.n_test nonnegative");

  fs::create_directories(out);
  write_stl(base, out / "base.stl", "base");
  const std::uint64_t seed = c.get_seed();
  write_split(out / "train", base, spec, static_cast<int>(n_train), Rng::derive_seed(seed, "dataset-train"),
              threads_of(c));
  if (n_test > 0)
    write_split(out / "test", base, spec, static_cast<int>(n_test), Rng::derive_seed(seed, "dataset-test"),
                threads_of(c));
  c.write_resolved(out);

  int failures = report_violations(read_surface_dataset(out / "train"), spec.constraint, log);
  if (n_test > 0) failures += report_violations(read_surface_dataset(out / "test"), spec.constraint, log);
  log << "generated " << n_train << " training and " << n_test << " test samples in " << out.string() << "\n";
  return failures == 0 ? 0 : 1;
}

int cmd_train(const PipelineConfig& c, std::ostream& log) {
  const fs::path data = required_path(c, "train.dataset");
  const fs::path out = c.get_path("out");
  const auto surfaces = read_surface_dataset(data);
  if (surfaces.empty()) throw ConfigError("training dataset " + data.string() + " has no samples");
  const auto constraint = read_dataset_constraint(data, c.volume_how());
  if (!constraint) throw ConfigError("training dataset " + data.string() + " records no constraint");

  GmConfig gm = c.gm();
  gm.seed = c.get_seed();
  const GenerativeModel model = train_model(surfaces, *constraint, gm);
  save_model(out, model);
  {
    std::ofstream loss(out / "loss.tsv");
    loss << "epoch\tloss\n";
    for (std::size_t e = 0; e < model.loss_history.size(); ++e)
      loss << e + 1 << '\t' << format_double(model.loss_history[e]) << '\n';
  }
  c.write_resolved(out);
  log << "trained " << to_string(gm.kind) << " on " << surfaces.size() << " samples; final loss "
      << format_double(model.loss_history.back()) << "\n";
  return 0;
}

int cmd_sample(const PipelineConfig& c, std::ostream& log) {
  const GenerativeModel model = load_model(required_path(c, "sample.checkpoint"));
  const fs::path out = c.get_path("out");
  const long n = c.get_long("sample.n");
  if (n < 1) throw ConfigError("sample.n must be positive");
  const SampleSet set = sample(model, static_cast<int>(n), c.get_seed());

  write_surface_dataset(out, set.surfaces);
  write_matrix(out / "latents.bin", set.latents);
  write_sample_meta(out, model.constraint, set.surfaces.size());
  {
    std::ofstream manifest(out / "manifest.tsv");
    manifest << "index\tconstraint\ttarget\tachieved\tresidual\n";
    for (std::size_t i = 0; i < set.surfaces.size(); ++i) {
      const TriSurface& s = set.surfaces[i];
      manifest << i << '\t' << to_string(model.constraint.kind) << '\t' << model.constraint.target_text() << '\t'
               << model.constraint.achieved_text(s.vertices, s.faces) << '\t'
               << format_double(model.constraint.residual(s.vertices, s.faces)) << '\n';
    }
  }
  c.write_resolved(out);
  const int failures = report_violations(set.surfaces, model.constraint, log);
  log << "sampled " << n << " shapes into " << out.string() << "\n";
  return failures == 0 ? 0 : 1;
}

int cmd_validate(const PipelineConfig& c, std::ostream& log) {
  const fs::path ref_dir = required_path(c, "validate.reference");
  const fs::path gen_dir = required_path(c, "validate.generated");
  const fs::path out = c.get_path("out");
  const auto reference = read_surface_dataset(ref_dir);
  const auto generated = read_surface_dataset(gen_dir);
  const auto constraint = read_dataset_constraint(gen_dir, c.volume_how());
  const MetricReport report = metric_report(reference, generated, constraint, c.get_list("validate.quantities"));
  write_metric_report(out, report);
  c.write_resolved(out);
  for (const auto& r : report.rows) log << r.name << '\t' << format_double(r.value) << '\n';
  if (!report.constraint_ok) log << "generated samples violate the constraint\n";
  return report.constraint_ok ? 0 : 1;
}

int cmd_surrogate(const PipelineConfig& c, std::ostream& log) {
  const std::string method = c.get("surrogate.method");
  if (method != "rbf" && method != "gpr" && method != "nn" && method != "as")
    throw ConfigError("unknown surrogate.method '" + method + "'");
  const long n_train = c.get_long("surrogate.n_train"), n_test = c.get_long("surrogate.n_test");
  if (n_train < 2 || n_test < 1) throw ConfigError("surrogate needs n_train >= 2 and n_test >= 1");
  const long n = n_train + n_test;
  const fs::path out = c.get_path("out");

  std::optional<GenerativeModel> model;
  if (!c.get("surrogate.checkpoint").empty()) model = load_model(required_path(c, "surrogate.checkpoint"));

  Matrix latents;
  std::vector<TriSurface> surfaces;
  if (!c.get("surrogate.samples").empty()) {
    const fs::path dir = required_path(c, "surrogate.samples");
    latents = read_matrix(dir / "latents.bin");
    surfaces = read_surface_dataset(dir);
    if (latents.rows() != static_cast<Eigen::Index>(surfaces.size()))
      throw ConfigError("surrogate.samples: latent records and shapes differ in count");
    if (model && latents.cols() != model->config.latent)
      throw ConfigError("surrogate.samples: latent width does not match the checkpoint");
    if (latents.rows() < n) throw ConfigError("surrogate.samples has fewer than n_train + n_test records");
    latents.conservativeResize(n, Eigen::NoChange);
    surfaces.resize(static_cast<std::size_t>(n));
  } else if (model) {
    SampleSet set = sample(*model, static_cast<int>(n), Rng::derive_seed(c.get_seed(), "surrogate"));
    latents = std::move(set.latents);
    surfaces = std::move(set.surfaces);
  } else {
    throw ConfigError("surrogate needs surrogate.checkpoint or surrogate.samples");
  }

  const FieldSpec field{field_kind_from_string(c.get("surrogate.field")), c.get_double("surrogate.field_scale")};
  Matrix snapshots(n, surfaces.front().vertex_count());
  parallel_for(static_cast<std::size_t>(n), threads_of(c), [&](std::size_t i) {
    snapshots.row(static_cast<Eigen::Index>(i)) = snapshot_of(surfaces[i], field).transpose();
  });

  fs::create_directories(out);
  write_matrix(out / "latents.bin", latents);
  write_matrix(out / "snapshots.bin", snapshots);
  const Matrix z_train = latents.topRows(n_train), z_test = latents.bottomRows(n_test);
  const Matrix s_train = snapshots.topRows(n_train), s_test = snapshots.bottomRows(n_test);
  std::vector<ErrorRow> rows;

  if (method == "as") {
    if (!model) throw ConfigError("the as method needs surrogate.checkpoint to evaluate gradients");
    const auto output = [&](const Vector& z) {
      const Matrix cloud = constrained_forward(*model, z.transpose());
      return snapshot_of({unflatten(cloud.row(0).transpose()), model->faces}, field).mean();
    };
    const Vector f = snapshots.rowwise().mean();
    const Vector f_train = f.head(n_train), f_test = f.tail(n_test);
    const Matrix grads = fd_gradients(output, z_train, c.get_double("surrogate.fd_step"));
    AsOptions options;
    options.dim = static_cast<int>(c.get_long("surrogate.as_dim"));
    options.bootstrap = static_cast<int>(c.get_long("surrogate.bootstrap"));
    options.seed = Rng::derive_seed(c.get_seed(), "as");
    options.threads = threads_of(c);
    const AsSubspace sub = as_fit(z_train, grads, options);
    const AsResponseSurface rs = as_response_surface(sub, z_train, f_train);
    const GprModel full = gpr_fit(z_train, f_train);
    const auto rel = [](const Vector& t, const Vector& p) { return mean_relative_error(Matrix(t), Matrix(p)); };
    rows.push_back({"as", rel(f_train, rs.predict(z_train)), rel(f_test, rs.predict(z_test))});
    rows.push_back({"gpr_full", rel(f_train, full.predict(z_train)), rel(f_test, full.predict(z_test))});
    std::ofstream ev(out / "eigenvalues.tsv");
    ev << "index\teigenvalue\tband_min\tband_max\tband_mean\n";
    for (Eigen::Index i = 0; i < sub.eigenvalues.size(); ++i)
      ev << i << '\t' << format_double(sub.eigenvalues[i]) << '\t'
         << format_double(sub.band_min.size() ? sub.band_min[i] : sub.eigenvalues[i]) << '\t'
         << format_double(sub.band_max.size() ? sub.band_max[i] : sub.eigenvalues[i]) << '\t'
         << format_double(sub.band_mean.size() ? sub.band_mean[i] : sub.eigenvalues[i]) << '\n';
  } else {
    PodiOptions options;
    options.modes = static_cast<int>(c.get_long("surrogate.modes"));
    options.regressor = podi_regressor_from_string(method);
    const std::string& kernel = c.get("surrogate.kernel");
    if (kernel == "polyharmonic") options.kernel = RbfKernel::polyharmonic_linear;
    else if (kernel == "thin_plate") options.kernel = RbfKernel::thin_plate;
    else if (kernel == "gaussian") options.kernel = RbfKernel::gaussian;
    else throw ConfigError("unknown surrogate.kernel '" + kernel + "'");
    options.nn.width = static_cast<int>(c.get_long("surrogate.nn_width"));
    options.nn.depth = static_cast<int>(c.get_long("surrogate.nn_depth"));
    options.nn.epochs = static_cast<int>(c.get_long("surrogate.nn_epochs"));
    options.nn.lr = c.get_double("surrogate.nn_lr");
    options.nn.seed = Rng::derive_seed(c.get_seed(), "podi-nn");
    const PodiModel podi = podi_fit(z_train, s_train, options);
    rows.push_back({"pod_projection", mean_relative_error(s_train, podi.pod.reconstruct(podi.pod.project(s_train))),
                    mean_relative_error(s_test, podi.pod.reconstruct(podi.pod.project(s_test)))});
    rows.push_back({method, mean_relative_error(s_train, podi.predict(z_train)),
                    mean_relative_error(s_test, podi.predict(z_test))});
  }
  write_error_table(out / "errors.tsv", rows);
  c.write_resolved(out);
  for (const auto& r : rows)
    log << r.method << "\ttrain " << format_double(r.train_error) << "\ttest " << format_double(r.test_error) << '\n';
  return 0;
}

int cmd_report(const PipelineConfig& c, std::ostream& log) {
  const fs::path out = c.get_path("out");
  const auto inputs = c.get_list("report.inputs");
  if (inputs.empty()) throw ConfigError("report.inputs lists no directories");
  fs::create_directories(out);
  std::ofstream md(out / "report.md");
  md << "# Pipeline report\n";
  for (const auto& dir : inputs) {
    md << "\n## " << dir << "\n";
    bool any = false;
    for (const char* name : {"report.tsv", "errors.tsv", "manifest.tsv", "loss.tsv"}) {
      const fs::path p = fs::path(dir) / name;
      if (!fs::exists(p)) continue;
      any = true;
      const std::string text = read_text_file(p.string());
      md << "\n### " << name << "\n\n";
      bool header = true;
      std::size_t lines = 0;
      for (const auto& line : split(text, '\n')) {
        if (line.empty()) continue;
        if (++lines > 41) {
          md << "\n(truncated)\n";
          break;
        }
        const auto cells = split(line, '\t');
        md << "|";
        for (const auto& cell : cells) md << ' ' << cell << " |";
        md << "\n";
        if (header) {
          md << "|";
          for (std::size_t i = 0; i < cells.size(); ++i) md << " --- |";
          md << "\n";
          header = false;
        }
      }
    }
    if (!any) md << "\n(no tables found)\n";
  }
  c.write_resolved(out);
  log << "wrote " << (out / "report.md").string() << "\n";
  return 0;
}

} // namespace cgm
