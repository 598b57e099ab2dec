#include "sparsedom/experiments.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <exception>

int main(int argc, char** argv) {
  CLI::App app{"numerical verification experiments for the sparse domination library"};
  sparsedom::RunOptions opt;
  app.add_option("--experiment", opt.experiment, "experiment id, E1 through E8")->required();
  app.add_option("--config", opt.config_path, "JSON config; omit for the documented defaults");
  app.add_option("--out", opt.out_dir, "output directory for report.csv and summary.json");
  const CLI::Option* seed_opt = app.add_option("--seed", opt.seed, "RNG seed");
  app.add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--plot", opt.plot, "also write SVG plots");
  CLI11_PARSE(app, argc, argv);
  opt.seed_from_cli = seed_opt->count() > 0;
  try {
    const int status = sparsedom::run_experiment(opt);
    std::printf("%s: %s (report in %s)\n", opt.experiment.c_str(),
                status == 0 ? "pass" : "FAIL", opt.out_dir.c_str());
    return status;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
