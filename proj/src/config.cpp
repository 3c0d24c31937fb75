#include "bandlab/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace bandlab {

namespace {

const std::map<std::string, ExperimentKind>& experiment_names() {
    static const std::map<std::string, ExperimentKind> names = {
        {"edge", ExperimentKind::Edge},
        {"semicircle", ExperimentKind::Semicircle},
        {"localization", ExperimentKind::Localization},
        {"delocalization", ExperimentKind::Delocalization},
        {"walks", ExperimentKind::Walks},
        {"trace_moment", ExperimentKind::TraceMoment},
        {"norm_tail", ExperimentKind::NormTail},
        {"quad_tail", ExperimentKind::QuadTail},
        {"rhoL_tail", ExperimentKind::RhoLTail},
        {"net_check", ExperimentKind::NetCheck},
        {"mgf_check", ExperimentKind::MgfCheck},
        {"linearization_check", ExperimentKind::LinearizationCheck},
    };
    return names;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

long long parse_int(const std::string& v, int line) {
    long long x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(line, "expected an integer, got '" + v + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& v, int line) {
    std::uint64_t x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(line, "expected an unsigned integer, got '" + v + "'");
    return x;
}

double parse_real(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(line, "expected a real number, got '" + v + "'");
    }
}

std::vector<int> parse_int_list(const std::string& v, int line) {
    std::vector<int> out;
    for (const std::string& item : split_list(v)) {
        long long x = parse_int(item, line);
        if (x < 1 || x > 1000000000) throw ConfigError(line, "integer out of range: " + item);
        out.push_back(static_cast<int>(x));
    }
    if (out.empty()) throw ConfigError(line, "empty list");
    return out;
}

std::vector<double> parse_real_list(const std::string& v, int line) {
    std::vector<double> out;
    for (const std::string& item : split_list(v)) out.push_back(parse_real(item, line));
    if (out.empty()) throw ConfigError(line, "empty list");
    return out;
}

bool parse_bool(const std::string& v, int line) {
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw ConfigError(line, "expected a boolean (0/1/true/false/on/off), got '" + v + "'");
}

std::string fmt_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <typename T, typename F>
std::string join_list(const std::vector<T>& xs, F&& fmt) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) out += ',';
        out += fmt(xs[i]);
    }
    return out;
}

bool uses_pattern(ExperimentKind e) {
    switch (e) {
        case ExperimentKind::Edge:
        case ExperimentKind::Semicircle:
        case ExperimentKind::Localization:
        case ExperimentKind::Delocalization:
        case ExperimentKind::TraceMoment:
        case ExperimentKind::RhoLTail:
            return true;
        default:
            return false;
    }
}

void validate(const ExperimentConfig& cfg, const std::map<std::string, int>& key_lines) {
    auto line_of = [&](const std::string& key) {
        auto it = key_lines.find(key);
        return it == key_lines.end() ? 0 : it->second;
    };
    auto require_n = [&](bool single) {
        if (cfg.n_list.empty()) throw ConfigError(0, "missing required key 'n'");
        if (single && cfg.n_list.size() != 1)
            throw ConfigError(line_of("n"), "this experiment takes a single n");
    };
    auto require_w = [&](bool single) {
        if (cfg.w_list.empty()) throw ConfigError(0, "missing required key 'w'");
        if (single && cfg.w_list.size() != 1)
            throw ConfigError(line_of("w"), "this experiment takes a single w");
    };

    // law/pattern names validated by construction
    EntryLaw law = cfg.entry_law();
    (void)law;
    PatternKind pk = cfg.pattern_kind();

    if (uses_pattern(cfg.experiment)) {
        require_n(cfg.experiment == ExperimentKind::Localization ||
                  cfg.experiment == ExperimentKind::Delocalization ||
                  cfg.experiment == ExperimentKind::RhoLTail);
        require_w(cfg.experiment == ExperimentKind::Localization ||
                  cfg.experiment == ExperimentKind::Delocalization ||
                  cfg.experiment == ExperimentKind::RhoLTail);
        for (int n : cfg.n_list) {
            for (int w : cfg.w_list) {
                if (w > n)
                    throw ConfigError(line_of("w"), "band width w = " + std::to_string(w) +
                                                        " exceeds n = " + std::to_string(n));
                if (pk != PatternKind::Full && w % 2 == 0)
                    throw ConfigError(line_of("w"),
                                      "band width must be odd (w = 2b+1), got " + std::to_string(w));
                if (pk == PatternKind::Full && w != n)
                    throw ConfigError(line_of("w"), "full pattern requires w == n");
            }
        }
    }

    switch (cfg.experiment) {
        case ExperimentKind::Localization:
        case ExperimentKind::Delocalization: {
            if (!(cfg.eta >= 0.0 && cfg.eta < 1.0))
                throw ConfigError(line_of("eta"), "need 0 <= eta < 1");
            double kmin = std::sqrt(cfg.eta / (1.0 - cfg.eta));
            if (!(cfg.kappa > kmin && cfg.kappa < 1.0))
                throw ConfigError(line_of("kappa"),
                                  "window parameter must satisfy sqrt(eta/(1-eta)) = " +
                                      fmt_real(kmin) + " < kappa < 1, got " + fmt_real(cfg.kappa));
            if (cfg.L < 1) throw ConfigError(line_of("L"), "need L >= 1");
            break;
        }
        case ExperimentKind::Walks:
            if (cfg.k < 1 || cfg.k > 5)
                throw ConfigError(line_of("k"), "walk enumeration needs 1 <= k <= 5");
            break;
        case ExperimentKind::TraceMoment:
            if (cfg.k < 1) throw ConfigError(line_of("k"), "need k >= 1");
            break;
        case ExperimentKind::NormTail:
            require_n(false);
            if (cfg.t_grid.empty()) throw ConfigError(0, "missing required key 't_grid'");
            break;
        case ExperimentKind::QuadTail:
            require_n(true);
            if (cfg.t_grid.empty()) throw ConfigError(0, "missing required key 't_grid'");
            break;
        case ExperimentKind::RhoLTail:
            if (cfg.t_grid.empty()) throw ConfigError(0, "missing required key 't_grid'");
            if (cfg.L < 1) throw ConfigError(line_of("L"), "need L >= 1");
            break;
        case ExperimentKind::NetCheck:
            require_n(false);
            for (int n : cfg.n_list)
                if (n > 4)
                    throw ConfigError(line_of("n"), "epsilon nets are limited to n <= 4");
            if (!(cfg.epsilon > 0.0 && cfg.epsilon < 0.25))
                throw ConfigError(line_of("epsilon"), "need 0 < epsilon < 1/4");
            break;
        case ExperimentKind::MgfCheck:
            if (cfg.r_grid.empty()) throw ConfigError(0, "missing required key 'r_grid'");
            break;
        case ExperimentKind::LinearizationCheck:
            require_n(true);
            if (cfg.z_frac.empty()) throw ConfigError(0, "missing required key 'z_frac'");
            for (double f : cfg.z_frac)
                if (!(f > 0.0 && f <= 1.0))
                    throw ConfigError(line_of("z_frac"), "z_frac entries must be in (0, 1]");
            break;
        default:
            break;
    }
    for (std::size_t i = 1; i < cfg.t_grid.size(); ++i)
        if (!(cfg.t_grid[i] > cfg.t_grid[i - 1]))
            throw ConfigError(line_of("t_grid"), "t_grid must be strictly increasing");
    if (cfg.trials < 1) throw ConfigError(line_of("trials"), "need trials >= 1");
    if (cfg.threads < 0) throw ConfigError(line_of("threads"), "need threads >= 0");
}

}  // namespace

std::string experiment_name(ExperimentKind kind) {
    for (const auto& [name, k] : experiment_names())
        if (k == kind) return name;
    return "?";
}

PatternKind ExperimentConfig::pattern_kind() const {
    if (pattern == "standard_band") return PatternKind::StandardBand;
    if (pattern == "cyclic_band") return PatternKind::CyclicBand;
    if (pattern == "full") return PatternKind::Full;
    throw ConfigError(0, "unknown pattern: " + pattern);
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::resolved() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("experiment", experiment_name(experiment));
    kv.emplace_back("law", law);
    kv.emplace_back("cutoff", fmt_real(cutoff));
    kv.emplace_back("pattern", pattern);
    if (!n_list.empty())
        kv.emplace_back("n", join_list(n_list, [](int x) { return std::to_string(x); }));
    if (!w_list.empty())
        kv.emplace_back("w", join_list(w_list, [](int x) { return std::to_string(x); }));
    kv.emplace_back("k", std::to_string(k));
    kv.emplace_back("L", std::to_string(L));
    kv.emplace_back("eta", fmt_real(eta));
    kv.emplace_back("kappa", fmt_real(kappa));
    kv.emplace_back("epsilon", fmt_real(epsilon));
    kv.emplace_back("delta", fmt_real(delta));
    if (!t_grid.empty()) kv.emplace_back("t_grid", join_list(t_grid, fmt_real));
    if (!r_grid.empty()) kv.emplace_back("r_grid", join_list(r_grid, fmt_real));
    if (!z_frac.empty()) kv.emplace_back("z_frac", join_list(z_frac, fmt_real));
    kv.emplace_back("trials", std::to_string(trials));
    kv.emplace_back("master_seed", std::to_string(master_seed));
    kv.emplace_back("out_path", out_path);
    kv.emplace_back("threads", threads == 0 ? "auto" : std::to_string(threads));
    kv.emplace_back("coverage_samples", std::to_string(coverage_samples));
    kv.emplace_back("rho_budget", std::to_string(rho_budget));
    kv.emplace_back("rho_search", rho_search ? "1" : "0");
    kv.emplace_back("asserts", asserts ? "1" : "0");
    kv.emplace_back("assert_ks_max", fmt_real(assert_ks_max));
    kv.emplace_back("assert_ratio_lo", fmt_real(assert_ratio_lo));
    kv.emplace_back("assert_ratio_hi", fmt_real(assert_ratio_hi));
    return kv;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::map<std::string, int> seen;
    bool have_experiment = false;

    std::stringstream ss(text);
    std::string raw;
    int line = 0;
    while (std::getline(ss, raw)) {
        ++line;
        std::string s = raw;
        std::size_t hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line, "expected key=value, got '" + trim(raw) + "'");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError(line, "empty key");
        if (value.empty()) throw ConfigError(line, "empty value for key '" + key + "'");
        if (!seen.emplace(key, line).second)
            throw ConfigError(line, "duplicate key '" + key + "'");

        if (key == "experiment") {
            auto it = experiment_names().find(value);
            if (it == experiment_names().end())
                throw ConfigError(line, "unknown experiment: " + value);
            cfg.experiment = it->second;
            have_experiment = true;
        } else if (key == "law") {
            cfg.law = value;
            try {
                EntryLaw::from_name(value, 2.0);
            } catch (const std::exception& e) {
                throw ConfigError(line, e.what());
            }
        } else if (key == "cutoff") {
            cfg.cutoff = parse_real(value, line);
            if (!(cfg.cutoff > 0.0)) throw ConfigError(line, "cutoff must be > 0");
        } else if (key == "pattern") {
            if (value != "standard_band" && value != "cyclic_band" && value != "full")
                throw ConfigError(line, "unknown pattern: " + value);
            cfg.pattern = value;
        } else if (key == "n") {
            cfg.n_list = parse_int_list(value, line);
        } else if (key == "w") {
            cfg.w_list = parse_int_list(value, line);
        } else if (key == "k") {
            cfg.k = static_cast<int>(parse_int(value, line));
        } else if (key == "L") {
            cfg.L = static_cast<int>(parse_int(value, line));
        } else if (key == "eta") {
            cfg.eta = parse_real(value, line);
        } else if (key == "kappa") {
            cfg.kappa = parse_real(value, line);
        } else if (key == "epsilon") {
            cfg.epsilon = parse_real(value, line);
        } else if (key == "delta") {
            cfg.delta = parse_real(value, line);
        } else if (key == "t_grid") {
            cfg.t_grid = parse_real_list(value, line);
        } else if (key == "r_grid") {
            cfg.r_grid = parse_real_list(value, line);
        } else if (key == "z_frac") {
            cfg.z_frac = parse_real_list(value, line);
        } else if (key == "trials") {
            cfg.trials = static_cast<int>(parse_int(value, line));
        } else if (key == "master_seed") {
            cfg.master_seed = parse_u64(value, line);
        } else if (key == "out_path") {
            cfg.out_path = value;
        } else if (key == "threads") {
            cfg.threads = value == "auto" ? 0 : static_cast<int>(parse_int(value, line));
        } else if (key == "coverage_samples") {
            cfg.coverage_samples = static_cast<int>(parse_int(value, line));
        } else if (key == "rho_budget") {
            cfg.rho_budget = parse_u64(value, line);
        } else if (key == "rho_search") {
            cfg.rho_search = parse_bool(value, line);
        } else if (key == "asserts") {
            cfg.asserts = parse_bool(value, line);
        } else if (key == "assert_ks_max") {
            cfg.assert_ks_max = parse_real(value, line);
        } else if (key == "assert_ratio_lo") {
            cfg.assert_ratio_lo = parse_real(value, line);
        } else if (key == "assert_ratio_hi") {
            cfg.assert_ratio_hi = parse_real(value, line);
        } else {
            throw ConfigError(line, "unknown key '" + key + "'");
        }
    }
    if (!have_experiment) throw ConfigError(0, "missing required key 'experiment'");
    validate(cfg, seen);
    return cfg;
}

}  // namespace bandlab
