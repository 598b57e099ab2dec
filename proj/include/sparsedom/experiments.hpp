#pragma once

#include <cstdint>
#include <string>

namespace sparsedom {

struct RunOptions {
  std::string experiment;   // E1 .. E8
  std::string config_path;  // empty -> documented defaults
  std::string out_dir = "out";
  std::uint64_t seed = 2026;
  bool seed_from_cli = false;  // CLI --seed wins over the config key
  int threads = 1;
  bool plot = false;
};

// Runs one experiment: writes report.csv and summary.json (and *.svg under
// --plot) into out_dir. Returns 0 exactly when every report row passes.
int run_experiment(const RunOptions& opt);

}  // namespace sparsedom
