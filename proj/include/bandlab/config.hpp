#ifndef BANDLAB_CONFIG_HPP
#define BANDLAB_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bandlab/ensemble.hpp"

namespace bandlab {

struct ConfigError : std::runtime_error {
    ConfigError(int line_number, const std::string& message)
        : std::runtime_error(line_number > 0
                                 ? "config line " + std::to_string(line_number) + ": " + message
                                 : "config: " + message),
          line(line_number) {}
    int line;
};

enum class ExperimentKind {
    Edge,
    Semicircle,
    Localization,
    Delocalization,
    Walks,
    TraceMoment,
    NormTail,
    QuadTail,
    RhoLTail,
    NetCheck,
    MgfCheck,
    LinearizationCheck,
};

std::string experiment_name(ExperimentKind kind);

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Edge;
    std::string law = "gaussian_real";
    double cutoff = 2.0;  // truncated_gaussian only
    std::string pattern = "cyclic_band";
    std::vector<int> n_list;
    std::vector<int> w_list;
    int k = 1;
    int L = 1;
    double eta = 0.1;
    double kappa = 0.9;
    double epsilon = 0.2;
    double delta = 0.0;  // 0 = use the law's declared subgaussian delta
    std::vector<double> t_grid;
    std::vector<double> r_grid;
    std::vector<double> z_frac;  // |z| as fractions of tau (linearization)
    int trials = 1;
    std::uint64_t master_seed = 0;
    std::string out_path = "out";
    int threads = 0;  // 0 = auto
    int coverage_samples = 100000;
    std::uint64_t rho_budget = 2000000;
    bool rho_search = false;
    bool asserts = true;
    double assert_ks_max = 0.06;
    double assert_ratio_lo = 1.85;
    double assert_ratio_hi = 2.15;

    bool operator==(const ExperimentConfig&) const = default;

    EntryLaw entry_law() const { return EntryLaw::from_name(law, cutoff); }
    PatternKind pattern_kind() const;

    // canonical key=value lines; parsing them reproduces this config exactly
    std::vector<std::pair<std::string, std::string>> resolved() const;
};

// Flat key=value format, one pair per line, '#' comments, comma-separated
// lists. Unknown or duplicate keys and domain violations are rejected with
// the offending line number.
ExperimentConfig parse_config(const std::string& text);

}  // namespace bandlab

#endif
