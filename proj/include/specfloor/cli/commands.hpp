#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specfloor/cli/config.hpp"
#include "specfloor/cli/report.hpp"

namespace specfloor::cli {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_certification = 2 };

const std::vector<std::string> &command_names();

struct RunOutput {
  int exit_code = exit_ok;
  Json report;
  // sweep and counterexample tables.
  std::optional<CsvTable> table;
  std::optional<Eigen::MatrixXd> sigma;
};

// Runs one command. `config` may be empty only for counterexample. Usage and
// configuration problems are thrown (ParseError, specfloor::Error);
// certification failures are reported with exit_certification. A nonempty
// `n_list` replaces the configured sizes of sweep and counterexample.
RunOutput run(const std::string &command, const std::optional<RunConfig> &config,
              bool dump_matrix = false, const std::vector<std::size_t> &n_list = {});

// report.json, <command>.csv for tables, sigma.csv when present.
std::vector<std::string> write_artifacts(const std::string &command, const RunOutput &output,
                                         const std::string &dir);

// Full command line: parse flags, load the config, run, write artifacts and
// print the primary artifact to `out`. Returns the exit code.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace specfloor::cli
