#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "bandlab/config.hpp"
#include "bandlab/eigen.hpp"
#include "bandlab/experiments.hpp"

namespace {

// precedence: --threads flag > config > BANDLAB_THREADS > OpenMP default
void apply_threads(int flag_threads, int config_threads) {
    int t = 0;
    if (flag_threads > 0) {
        t = flag_threads;
    } else if (config_threads > 0) {
        t = config_threads;
    } else if (const char* env = std::getenv("BANDLAB_THREADS")) {
        t = std::atoi(env);
    }
    if (t > 0) omp_set_num_threads(t);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random band matrix spectral laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 0;

    CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("--config", config_path, "key=value config file")->required();
    run->add_option("--threads", threads, "worker thread count (overrides config)");
    run->add_option("--out", out_dir, "output directory (overrides config out_path)");

    CLI::App* self = app.add_subcommand("selftest", "run the built-in invariant suite");
    self->add_option("--threads", threads, "worker thread count");

    CLI11_PARSE(app, argc, argv);

    try {
        if (self->parsed()) {
            apply_threads(threads, 0);
            return bandlab::selftest(std::cout) == 0 ? bandlab::kExitOk
                                                     : bandlab::kExitAssertFailed;
        }
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot read config file: " << config_path << "\n";
            return bandlab::kExitConfigError;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        bandlab::ExperimentConfig cfg = bandlab::parse_config(buf.str());
        apply_threads(threads, cfg.threads);
        const std::string dir = out_dir.empty() ? cfg.out_path : out_dir;
        bandlab::RunResult res = bandlab::run_experiment(cfg, dir, std::cout);
        for (const std::string& f : res.output_files) std::cout << "wrote " << f << "\n";
        return res.exit_code;
    } catch (const bandlab::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bandlab::kExitConfigError;
    } catch (const bandlab::ConvergenceError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return bandlab::kExitNumericalError;
    } catch (const bandlab::EigenIterationError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return bandlab::kExitNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bandlab::kExitNumericalError;
    }
}
