#ifndef BANDLAB_EXPERIMENTS_HPP
#define BANDLAB_EXPERIMENTS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "bandlab/config.hpp"

namespace bandlab {

// exit codes: 0 ok, 1 built-in assertion failed, 2 config error, 3 numerical
// failure
enum ExitCode : int {
    kExitOk = 0,
    kExitAssertFailed = 1,
    kExitConfigError = 2,
    kExitNumericalError = 3,
};

struct RunResult {
    int exit_code = kExitOk;
    std::vector<std::string> output_files;
};

// Runs the configured experiment, writes its CSV file(s) under the output
// directory and prints a summary to `log`. Output bytes depend only on the
// parsed config: thread-count overrides are applied by the caller through
// omp_set_num_threads and never reach the emitted files.
RunResult run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                         std::ostream& log);

// fast invariant suite across all modules; returns the number of failures
int selftest(std::ostream& log);

}  // namespace bandlab

#endif
