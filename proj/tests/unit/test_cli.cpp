#include <doctest.h>

#include <map>
#include <sstream>

#include "cgm/cli/pipeline.hpp"
#include "cgm/numerics/keyvalue.hpp"
#include "cgm/reduction/matrix_io.hpp"
#include "fixtures.hpp"

using namespace cgm;
namespace fs = std::filesystem;

namespace {

PipelineConfig small_config(const fs::path& root) {
  PipelineConfig c;
  c.load_text("shape.subdivision=1\n"
              "lattice.control_points=2,2,2\n"
              "dataset.n_train=24\n"
              "dataset.n_test=12\n"
              "gm.latent=3\ngm.pca_modes=5\ngm.hidden=16\ngm.depth=2\ngm.epochs=8\ngm.batch=12\n"
              "sample.n=12\n"
              "surrogate.n_train=10\nsurrogate.n_test=5\n");
  c.set("train.dataset", (root / "data" / "train").string());
  c.set("sample.checkpoint", (root / "ae").string());
  c.set("surrogate.checkpoint", (root / "ae").string());
  c.set("validate.reference", (root / "data" / "test").string());
  c.set("validate.generated", (root / "samples").string());
  c.set("report.inputs", (root / "validation").string() + "," + (root / "rom").string());
  c.set("seed", "7");
  return c;
}

int run(int (*cmd)(const PipelineConfig&, std::ostream&), PipelineConfig c, const fs::path& out,
        std::string* log = nullptr) {
  c.set("out", out.string());
  std::ostringstream s;
  const int code = cmd(c, s);
  if (log) *log = s.str();
  return code;
}

std::vector<std::vector<std::string>> tsv_rows(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& line : split(test::slurp(p), '\n'))
    if (!line.empty()) rows.push_back(split(line, '\t'));
  return rows;
}

} // namespace

TEST_CASE("pipeline config") {
  PipelineConfig c;
  CHECK(c.get("gm.kind") == "ae");
  CHECK(c.get_long("dataset.n_train") == 60);
  c.load_text("# comment\nseed = 12\n\ngm.kind=vae\n");
  CHECK(c.get_seed() == 12);
  CHECK(c.gm().kind == ModelKind::vae);
  CHECK_THROWS_AS(c.load_text("gm.bogus=1\n"), ConfigError);
  CHECK_THROWS_AS(c.set("nope", "1"), ConfigError);
  CHECK_THROWS_AS(c.load_text("seed\n"), ParseError);

  SUBCASE("environment overrides") {
    CHECK(PipelineConfig::env_name("gm.pca_modes") == "CGM_GM_PCA_MODES");
    c.apply_env({"PATH=/bin", "CGM_GM_PCA_MODES=7", "CGM_SEED= 3 "});
    CHECK(c.gm().pca_modes == 7);
    CHECK(c.get_seed() == 3);
    CHECK_THROWS_AS(c.apply_env({"CGM_NOT_A_KEY=1"}), ConfigError);
  }
  SUBCASE("resolved text round trips") {
    c.set("dataset.sigma", "0.125");
    PipelineConfig d;
    d.load_text(c.resolved_text());
    CHECK(d.values() == c.values());
    const auto dir = test::scratch_dir("resolved");
    c.write_resolved(dir);
    CHECK(test::slurp(dir / "config.resolved.txt") == c.resolved_text());
  }
  SUBCASE("derived objects") {
    c.set("lattice.control_points", "3,2,4");
    CHECK(c.lattice().grid() == std::array<int, 3>{2, 1, 3});
    c.set("lattice.pin_axis", "2");
    c.set("lattice.pin_index", "3");
    const auto w = c.cffd_options(c.lattice()).weights;
    REQUIRE(w);
    CHECK((w->array() == 0.0).count() == 3 * 2);
    c.set("lattice.pin_index", "4");
    CHECK_THROWS_AS(c.cffd_options(c.lattice()), ConfigError);
    c.set("lattice.control_points", "1,2,2");
    CHECK_THROWS_AS(c.lattice(), ConfigError);
    c.set("lattice.control_points", "2,2,2");
    c.set("lattice.affine", "1,0,0,0,1,0,0,0,0");
    CHECK_THROWS_AS(c.lattice(), LatticeError);
    c.set("constraint.volume_split", "halves");
    CHECK_THROWS_AS(c.volume_how(), ConfigError);
    c.set("seed", "-1");
    CHECK_THROWS_AS(c.get_seed(), ConfigError);
  }
}

TEST_CASE("pipeline commands") {
  const fs::path root = test::scratch_dir("pipeline");
  const PipelineConfig c = small_config(root);

  REQUIRE(run(cmd_generate, c, root / "data") == 0);
  SUBCASE("generate is deterministic and records achieved targets") {
    PipelineConfig threaded = c;
    threaded.set("threads", "3");
    REQUIRE(run(cmd_generate, threaded, root / "data2") == 0);
    for (const char* f : {"train/manifest.tsv", "train/sample_00003.stl", "test/displacements.bin", "base.stl"})
      CHECK(test::slurp(root / "data" / f) == test::slurp(root / "data2" / f));
    const auto rows = tsv_rows(root / "data" / "train" / "manifest.tsv");
    REQUIRE(rows.size() == 25);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto target = parse_doubles("target", rows[i][3]);
      const auto achieved = parse_doubles("achieved", rows[i][4]);
      for (std::size_t d = 0; d < 3; ++d) CHECK(std::abs(target[d] - achieved[d]) <= 1e-9);
    }
    CHECK(fs::exists(root / "data" / "config.resolved.txt"));
    CHECK(read_matrix(root / "data" / "train" / "displacements.bin").rows() == 24);
  }
  SUBCASE("singular lattice") {
    PipelineConfig bad = c;
    bad.set("lattice.affine", "1,0,0,0,1,0,0,0,0");
    CHECK_THROWS_AS(run(cmd_generate, bad, root / "bad"), LatticeError);
  }
  SUBCASE("train, sample, validate, surrogate, report") {
    REQUIRE(run(cmd_train, c, root / "ae") == 0);
    std::map<fs::path, std::string> first;
    for (const auto& entry : fs::directory_iterator(root / "ae")) first[entry.path()] = test::slurp(entry.path());
    REQUIRE(run(cmd_train, c, root / "ae") == 0);
    CHECK(first.size() >= 3);
    for (const auto& [path, bytes] : first) CHECK(test::slurp(path) == bytes);

    REQUIRE(run(cmd_sample, c, root / "samples") == 0);
    const auto rows = tsv_rows(root / "samples" / "manifest.tsv");
    REQUIRE(rows.size() == 13);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][4]) <= 1e-10);

    REQUIRE(run(cmd_validate, c, root / "validation") == 0);
    const auto report = tsv_rows(root / "validation" / "report.tsv");
    CHECK(report.size() == 1 + 7 + 2 + 1);
    CHECK(fs::exists(root / "validation" / "hist_I_xx.csv"));

    REQUIRE(run(cmd_surrogate, c, root / "rom") == 0);
    const auto errors = tsv_rows(root / "rom" / "errors.tsv");
    REQUIRE(errors.size() == 3);
    CHECK(errors[1][0] == "pod_projection");
    CHECK(errors[2][0] == "rbf");
    CHECK(std::stod(errors[2][1]) <= std::stod(errors[1][1]) + 1e-9);

    std::string log;
    REQUIRE(run(cmd_report, c, root / "report", &log) == 0);
    const std::string md = test::slurp(root / "report" / "report.md");
    CHECK(md.find("### report.tsv") != std::string::npos);
    CHECK(md.find("### errors.tsv") != std::string::npos);

    PipelineConfig as = c;
    as.set("surrogate.method", "as");
    as.set("surrogate.bootstrap", "5");
    REQUIRE(run(cmd_surrogate, as, root / "rom_as") == 0);
    CHECK(tsv_rows(root / "rom_as" / "eigenvalues.tsv").size() == 4);

    // Latent records of the wrong width.
    write_matrix(root / "samples" / "latents.bin", Matrix::Zero(12, 5));
    PipelineConfig wide = c;
    wide.set("surrogate.samples", (root / "samples").string());
    CHECK_THROWS_AS(run(cmd_surrogate, wide, root / "rom_wide"), ConfigError);
  }
  SUBCASE("missing inputs") {
    PipelineConfig none = c;
    none.set("train.dataset", "");
    CHECK_THROWS_AS(run(cmd_train, none, root / "x"), ConfigError);
    none.set("train.dataset", (root / "missing").string());
    CHECK_THROWS_AS(run(cmd_train, none, root / "x"), IoError);
    PipelineConfig method = c;
    method.set("surrogate.method", "kriging");
    CHECK_THROWS_AS(run(cmd_surrogate, method, root / "x"), ConfigError);
  }
}
