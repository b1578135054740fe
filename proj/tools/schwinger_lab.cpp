#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "lab/config.hpp"
#include "lab/runner.hpp"
#include "schwinger/basis.hpp"

namespace {

struct RunArgs {
  std::string config;
  std::string from_manifest;
  std::string task, N, J, out;
  double w = 0, theta = 0, m = 0, tmax = 0;
  int sectors = 0;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  bool plot = false;
};

template <class T>
std::optional<T> given(const CLI::App& app, const std::string& name, const T& v) {
  return app.count(name) > 0 ? std::optional<T>(v) : std::nullopt;
}

lab::ExperimentConfig resolve(const CLI::App& app, const RunArgs& a) {
  lab::Overrides ov;
  ov.task = given(app, "--task", a.task);
  ov.N = given(app, "--N", a.N);
  ov.J = given(app, "--J", a.J);
  ov.w = given(app, "--w", a.w);
  ov.theta = given(app, "--theta", a.theta);
  ov.m = given(app, "--m", a.m);
  ov.sectors = given(app, "--sectors", a.sectors);
  ov.seed = given(app, "--seed", a.seed);
  ov.tmax = given(app, "--tmax", a.tmax);
  ov.plot = given(app, "--plot", a.plot);
  ov.workers = given(app, "--workers", a.workers);
  ov.out = given(app, "--out", a.out);
  if (a.from_manifest.empty()) return lab::load_config(a.config, ov);

  if (!a.config.empty()) throw lab::ConfigError("command line", "--config and --from-manifest are exclusive");
  for (const char* f : {"--task", "--N", "--J", "--w", "--theta", "--m", "--sectors", "--seed", "--tmax"}) {
    if (app.count(f) > 0) {
      throw lab::ConfigError("command line", std::string(f) + " cannot change a config read from a manifest");
    }
  }
  auto c = lab::config_from_manifest(a.from_manifest);
  if (ov.workers) c.workers = *ov.workers;
  if (ov.out) c.out = *ov.out;
  if (ov.plot) c.plot = *ov.plot;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact-diagonalization experiments on the lattice Schwinger model"};
  app.require_subcommand(1);
  app.set_version_flag("--version", lab::code_version());

  RunArgs a;
  auto* run = app.add_subcommand("run", "run an experiment");
  run->add_option("--config", a.config, "TOML config file");
  run->add_option("--from-manifest", a.from_manifest, "rerun the config recorded in a manifest.json");
  run->add_option("--task", a.task, "task name");
  run->add_option("--N", a.N, "chain length(s), comma separated");
  run->add_option("--J", a.J, "J value(s), comma separated");
  run->add_option("--w", a.w, "hopping w");
  run->add_option("--theta", a.theta, "theta angle");
  run->add_option("--m", a.m, "fermion mass");
  run->add_option("--sectors", a.sectors, "number of charge sectors");
  run->add_option("--seed", a.seed, "master seed");
  run->add_option("--tmax", a.tmax, "final time (time-evolution tasks)");
  run->add_flag("--plot", a.plot, "render SVG plots");
  run->add_option("--workers", a.workers, "worker threads (default: SCHWINGER_WORKERS or hardware)");
  run->add_option("--out", a.out, "output directory");

  std::string resume_dir;
  unsigned resume_workers = 0;
  auto* resume = app.add_subcommand("resume", "finish a partial run");
  resume->add_option("dir", resume_dir, "output directory or its manifest.json")->required();
  resume->add_option("--workers", resume_workers, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : lab::kConfigError;
  }

  try {
    if (*run) {
      const auto config = resolve(*run, a);
      return lab::run_experiment(config, std::cerr);
    }
    std::filesystem::path dir(resume_dir);
    if (dir.filename() == "manifest.json") dir = dir.parent_path();
    return lab::resume_experiment(dir, resume->count("--workers") ? std::optional<unsigned>(resume_workers)
                                                                  : std::nullopt,
                                  std::cerr);
  } catch (const lab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return lab::kConfigError;
  } catch (const schwinger::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return lab::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lab::kHardError;
  }
}
