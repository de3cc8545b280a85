#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cgm/cli/pipeline.hpp"

extern char** environ;

namespace {

struct Flags {
  std::string config;
  std::string seed;
  std::string out;
  std::string threads;
  std::string kind;
  std::string method;
};

cgm::PipelineConfig resolve(const Flags& f) {
  cgm::PipelineConfig c;
  if (!f.config.empty()) c.load_file(f.config);
  std::vector<std::string> env;
  for (char** e = environ; e && *e; ++e) env.emplace_back(*e);
  c.apply_env(env);
  if (!f.seed.empty()) c.set("seed", f.seed);
  if (!f.out.empty()) c.set("out", f.out);
  if (!f.threads.empty()) c.set("threads", f.threads);
  if (!f.kind.empty()) c.set("gm.kind", f.kind);
  if (!f.method.empty()) c.set("surrogate.method", f.method);
  return c;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained shape generation, generative models and reduced-order surrogates"};
  app.require_subcommand(1);
  Flags flags;

  using Command = int (*)(const cgm::PipelineConfig&, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands{
      {"generate", "Sample a cFFD dataset (train/ and test/ splits)", cgm::cmd_generate},
      {"train", "Train a constrained generative model on train.dataset", cgm::cmd_train},
      {"sample", "Draw sample.n shapes from sample.checkpoint", cgm::cmd_sample},
      {"validate", "Compare validate.generated against validate.reference", cgm::cmd_validate},
      {"surrogate", "Fit a PODI or active-subspace surrogate and report errors", cgm::cmd_surrogate},
      {"report", "Collect tables from report.inputs into report.md", cgm::cmd_report},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "key=value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "root seed");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--threads", flags.threads, "worker cap");
    if (name == "train")
      sub->add_option("--kind", flags.kind, "model kind")->check(CLI::IsMember({"ae", "vae", "aae", "began"}));
    if (name == "surrogate")
      sub->add_option("--method", flags.method, "surrogate method")->check(CLI::IsMember({"rbf", "gpr", "nn", "as"}));
    subs.emplace_back(sub, fn);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const cgm::PipelineConfig config = resolve(flags);
    for (const auto& [sub, fn] : subs)
      if (sub->parsed()) return fn(config, std::cerr);
  } catch (const cgm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
