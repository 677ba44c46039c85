// Command-line driver: run numerical experiments, list them, or validate a
// configuration file.
//
// Exit codes: 0 success, 1 at least one mandatory check failed,
// 2 usage/configuration error. `validate` always exits 0.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "pathspace/config.hpp"
#include "pathspace/experiments.hpp"
#include "pathspace/report.hpp"

namespace {

int cmd_run(const std::string& experiment, const pathspace::Config& cfg) {
  pathspace::ExperimentResult res = pathspace::run_experiment(experiment, cfg);
  for (const pathspace::CheckRow& r : res.checks) {
    std::printf("[%s] %-40s value=%.6g target=%.6g", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.value, r.target);
    if (r.se > 0) std::printf(" z=%.2f", r.z);
    if (!r.mandatory) std::printf(" (informational)");
    std::printf("\n");
  }
  std::printf("%s: %s (%zu checks, %.1fs)\n", res.id.c_str(), res.pass ? "PASS" : "FAIL",
              res.checks.size(), res.wall_seconds);
  for (const std::string& a : res.artifacts) std::printf("wrote %s\n", a.c_str());
  return res.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"manifold-valued path sampling and stochastic string experiments"};
  app.require_subcommand(1);

  // ---- run ----------------------------------------------------------------
  auto* run = app.add_subcommand("run", "run one experiment");
  std::string experiment;
  run->add_option("experiment", experiment, "experiment name (see `list`)")->required();
  std::string config_file, out_dir, manifold, t_list, x_list;
  std::uint64_t seed = 0;
  double dt = 0.0, evolve_t = 0.0;
  long long n_paths = 0;
  int threads = -1;
  bool plots = false;
  std::vector<std::string> overrides;
  run->add_option("--config", config_file, "configuration file (key = value lines)");
  auto* seed_opt = run->add_option("--seed", seed, "master seed");
  run->add_option("--out", out_dir, "output directory root");
  run->add_option("--manifold", manifold, "euclidean | sphere2 | hyperbolic2 | all");
  auto* dt_opt = run->add_option("--dt", dt, "time step");
  auto* np_opt = run->add_option("--n-paths", n_paths, "trajectories per ensemble");
  auto* th_opt = run->add_option("--threads", threads, "worker threads (0 = auto)");
  run->add_flag("--plots", plots, "also write plot.svg");
  run->add_option("--T", t_list, "comma-separated horizon list (t_list)");
  auto* t_opt = run->add_option("--t", evolve_t, "evolution time (evolve_t)");
  run->add_option("--x", x_list, "comma-separated probe positions (x_list)");
  run->add_option("--set", overrides, "extra key=value override (repeatable)");

  // ---- validate -------------------------------------------------------------
  auto* validate = app.add_subcommand("validate", "check a configuration file and exit 0");
  std::string validate_file;
  validate->add_option("--config", validate_file, "configuration file")->required();

  // ---- list -----------------------------------------------------------------
  app.add_subcommand("list", "list experiment names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);  // prints help or the parse error
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const std::string& id : pathspace::experiment_ids()) std::printf("%s\n", id.c_str());
      return 0;
    }

    if (app.got_subcommand("validate")) {
      try {
        pathspace::Config cfg = pathspace::Config::from_file(validate_file);
        // Raw entries, not merged with defaults: missing required keys must
        // show up as diagnostics.
        std::vector<pathspace::Diagnostic> diags = cfg.validate();
        if (diags.empty()) {
          std::printf("ok: %zu keys set, all constraints satisfied\n", cfg.entries().size());
        } else {
          for (const pathspace::Diagnostic& d : diags)
            std::printf("problem: %s: %s\n", d.field.c_str(), d.message.c_str());
        }
      } catch (const std::exception& e) {
        std::printf("problem: %s\n", e.what());
      }
      return 0;  // diagnostics only
    }

    pathspace::Config cfg =
        config_file.empty() ? pathspace::Config::defaults() : pathspace::Config::from_file(config_file);
    if (seed_opt->count()) cfg.set("master_seed", std::to_string(seed));
    if (!out_dir.empty()) cfg.set("out", out_dir);
    if (!manifold.empty()) cfg.set("manifold", manifold);
    if (dt_opt->count()) cfg.set("dt", pathspace::format_g17(dt));
    if (np_opt->count()) cfg.set("n_paths", std::to_string(n_paths));
    if (th_opt->count()) cfg.set("threads", std::to_string(threads));
    if (plots) cfg.set("plots", "1");
    if (!t_list.empty()) cfg.set("t_list", t_list);
    if (t_opt->count()) cfg.set("evolve_t", pathspace::format_g17(evolve_t));
    if (!x_list.empty()) cfg.set("x_list", x_list);
    for (const std::string& kv : overrides) {
      std::size_t eq = kv.find('=');
      if (eq == std::string::npos) throw pathspace::ConfigError("--set expects key=value: " + kv);
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }

    return cmd_run(experiment, cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
