#include "bandlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <limits>
#include <ostream>
#include <sstream>

#include "bandlab/concentration.hpp"
#include "bandlab/csv.hpp"
#include "bandlab/eigen.hpp"
#include "bandlab/localization.hpp"
#include "bandlab/reference.hpp"
#include "bandlab/spectral_stats.hpp"
#include "bandlab/stats.hpp"
#include "bandlab/walks.hpp"

namespace bandlab {

namespace {

using cplx = std::complex<double>;

std::string csv_path(const ExperimentConfig& cfg, const std::string& out_dir,
                     const std::string& stem) {
    std::filesystem::create_directories(out_dir);
    (void)cfg;
    return (std::filesystem::path(out_dir) / (stem + ".csv")).string();
}

struct Verdicts {
    int failures = 0;
    void check(std::ostream& log, bool ok, const std::string& what) {
        log << (ok ? "  [ok]   " : "  [FAIL] ") << what << "\n";
        if (!ok) ++failures;
    }
};

RunResult finish(const ExperimentConfig& cfg, std::ostream& log, Verdicts& v,
                 std::vector<std::string> files) {
    RunResult res;
    res.output_files = std::move(files);
    res.exit_code = (cfg.asserts && v.failures > 0) ? kExitAssertFailed : kExitOk;
    log << "result: " << (res.exit_code == kExitOk ? "ok" : "assertion failure") << "\n";
    return res;
}

RunResult run_edge_like(const ExperimentConfig& cfg, const std::string& out_dir,
                        std::ostream& log) {
    EntryLaw law = cfg.entry_law();
    std::vector<EdgeRow> rows = edge_experiment(law, cfg.pattern_kind(), cfg.n_list, cfg.w_list,
                                                cfg.trials, cfg.master_seed);
    const std::string stem = experiment_name(cfg.experiment);
    std::string path = csv_path(cfg, out_dir, stem);
    CsvFile csv(path, cfg.resolved(), "n,w,trial,seed,lambda_max,ratio,ks");
    for (const EdgeRow& r : rows) {
        std::ostringstream os;
        os << r.n << ',' << r.w << ',' << r.trial << ',' << r.seed << ',' << g17(r.lambda_max)
           << ',' << g17(r.ratio) << ',' << g17(r.ks);
        csv.row(os.str());
    }
    EdgeSummary s = summarize_edge(rows);
    log << "rows=" << rows.size() << " mean_ratio=" << g17(s.mean_ratio)
        << " sd_ratio=" << g17(s.sd_ratio) << " mean_ks=" << g17(s.mean_ks)
        << " max_ks=" << g17(s.max_ks) << "\n";
    Verdicts v;
    if (cfg.experiment == ExperimentKind::Edge) {
        v.check(log,
                s.mean_ratio >= cfg.assert_ratio_lo && s.mean_ratio <= cfg.assert_ratio_hi,
                "mean lambda_max/sqrt(W) in [" + g17(cfg.assert_ratio_lo) + ", " +
                    g17(cfg.assert_ratio_hi) + "]");
    } else {
        v.check(log, s.max_ks <= cfg.assert_ks_max,
                "max KS distance <= " + g17(cfg.assert_ks_max));
    }
    return finish(cfg, log, v, {path});
}

RunResult run_localization(const ExperimentConfig& cfg, const std::string& out_dir,
                           std::ostream& log) {
    EntryLaw law = cfg.entry_law();
    DelocalizationResult res =
        delocalization_experiment(law, cfg.pattern_kind(), cfg.n_list[0], cfg.w_list[0], cfg.L,
                                  cfg.eta, cfg.kappa, cfg.trials, cfg.master_seed);
    const std::string stem = experiment_name(cfg.experiment);
    std::string path = csv_path(cfg, out_dir, stem);
    CsvFile csv(path, cfg.resolved(),
                "n,w,trial,seed,eig_index,lambda,eta_at_L,loc_len_eta10,loc_len_eta25,"
                "loc_len_eta50,in_window,localized");
    for (const LocalizationRow& r : res.rows) {
        std::ostringstream os;
        os << r.n << ',' << r.w << ',' << r.trial << ',' << r.seed << ',' << r.eig_index << ','
           << g17(r.lambda) << ',' << g17(r.eta_at_L) << ',' << r.loc_len_eta10 << ','
           << r.loc_len_eta25 << ',' << r.loc_len_eta50 << ',' << (r.in_window ? 1 : 0) << ','
           << (r.localized ? 1 : 0);
        csv.row(os.str());
    }
    log << "trials=" << res.trials << " eigenvectors_in_window=" << res.windowed
        << " localized_in_window=" << res.localized_in_window << "\n";
    Verdicts v;
    if (cfg.experiment == ExperimentKind::Delocalization)
        v.check(log, res.localized_in_window == 0,
                "no (L,eta)-localized eigenvector in the spectral window");
    return finish(cfg, log, v, {path});
}

RunResult run_walks(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
    WalkInequalityReport rep = verify_fk_inequalities(cfg.k);
    std::vector<CountBoundRow> counts = count_bound_check(cfg.k);
    std::string path = csv_path(cfg, out_dir, "walks");
    CsvFile csv(path, cfg.resolved(), "k,t,count,bound,ok");
    for (const CountBoundRow& r : counts) {
        std::ostringstream os;
        os << r.k << ',' << r.t << ',' << r.count << ',' << g17(r.bound) << ',' << (r.ok ? 1 : 0);
        csv.row(os.str());
    }
    std::vector<std::string> files{path};
    if (cfg.k <= 3) {
        std::string cpath = csv_path(cfg, out_dir, "walks_classes");
        CsvFile classes(cpath, cfg.resolved(), "word,t,l,m");
        for (const WalkClass& c : enumerate_classes(cfg.k)) {
            std::ostringstream os;
            for (std::size_t i = 0; i < c.word.size(); ++i) {
                if (i > 0) os << ' ';
                os << c.word[i];
            }
            os << ',' << c.t << ',' << c.l << ',' << c.m;
            classes.row(os.str());
        }
        files.push_back(cpath);
    }
    log << "k=" << cfg.k << " classes=" << rep.classes_checked << "\n";
    Verdicts v;
    v.check(log, rep.ok,
            rep.ok ? "walk inequalities hold on every class"
                   : "walk inequality violated: " + rep.failed_inequality);
    bool bounds_ok = std::all_of(counts.begin(), counts.end(),
                                 [](const CountBoundRow& r) { return r.ok; });
    v.check(log, bounds_ok, "class counts within 4^k (2k)^(6(k-t+1))");
    return finish(cfg, log, v, files);
}

RunResult run_trace_moment(const ExperimentConfig& cfg, const std::string& out_dir,
                           std::ostream& log) {
    EntryLaw law = cfg.entry_law();
    std::string path = csv_path(cfg, out_dir, "trace_moment");
    CsvFile csv(path, cfg.resolved(), "n,w,k,trials,estimate,stderr,bound,bound_valid,threshold");
    Verdicts v;
    for (int n : cfg.n_list) {
        for (int w : cfg.w_list) {
            SparsityPattern pat = SparsityPattern::build(cfg.pattern_kind(), n, w);
            TraceMomentEstimate est =
                trace_moment_mc(law, pat, cfg.k, cfg.trials, cfg.master_seed);
            bool valid = true;
            TraceBoundInfo info;
            try {
                info = trace_moment_bound(n, w, cfg.k, law.moments().C, law.moments().alpha);
            } catch (const std::domain_error&) {
                valid = false;
                info.bound = std::numeric_limits<double>::quiet_NaN();
                double base = 2.0 * cfg.k * std::pow(6.0 * law.moments().C * cfg.k,
                                                     law.moments().alpha);
                info.threshold = std::pow(base, 6.0);
            }
            std::ostringstream os;
            os << n << ',' << w << ',' << cfg.k << ',' << est.trials << ',' << g17(est.estimate)
               << ',' << g17(est.stderr_) << ',' << g17(info.bound) << ',' << (valid ? 1 : 0)
               << ',' << g17(info.threshold);
            csv.row(os.str());
            log << "n=" << n << " w=" << w << " E Tr X^" << 2 * cfg.k << " ~ "
                << g17(est.estimate) << " +- " << g17(est.stderr_);
            if (valid)
                log << "  bound=" << g17(info.bound) << "  admissible k window: log N = "
                    << g17(info.k_low) << " .. W^(1/(6(1+alpha))) = " << g17(info.k_high);
            else
                log << "  bound invalid (W <= " << g17(info.threshold) << ")";
            log << "\n";
            if (valid)
                v.check(log, est.estimate <= info.bound, "MC estimate within the trace bound");
        }
    }
    return finish(cfg, log, v, {path});
}

void write_tail_rows(CsvFile& csv, const TailEstimate& est) {
    for (std::size_t i = 0; i < est.thresholds.size(); ++i) {
        std::ostringstream os;
        os << est.statistic << ',' << est.n << ',' << est.L << ',' << g17(est.thresholds[i])
           << ',' << g17(est.exceed_prob[i]) << ',' << g17(est.lo95[i]) << ','
           << g17(est.hi95[i]) << ',' << est.trials;
        csv.row(os.str());
    }
}

RunResult run_norm_tail(const ExperimentConfig& cfg, const std::string& out_dir,
                        std::ostream& log) {
    EntryLaw law = cfg.entry_law();
    std::string path = csv_path(cfg, out_dir, "norm_tail");
    CsvFile csv(path, cfg.resolved(), "statistic,n,L,t,exceed,lo95,hi95,trials");
    Verdicts v;
    for (std::size_t gi = 0; gi < cfg.n_list.size(); ++gi) {
        int n = cfg.n_list[gi];
        TailEstimate est = norm_tail_experiment(law, n, cfg.t_grid, cfg.trials,
                                                derive_seed(cfg.master_seed, "norm_tail_grid", gi, 0));
        write_tail_rows(csv, est);
        log << "n=" << n;
        if (est.fitted_slope) log << " fitted_slope=" << g17(*est.fitted_slope);
        for (std::size_t i = 0; i < est.thresholds.size(); ++i)
            log << "  P(||X||>" << g17(est.thresholds[i]) << "*sqrt(N))=" << g17(est.exceed_prob[i]);
        log << "\n";
        bool monotone = true;
        for (std::size_t i = 1; i < est.exceed_prob.size(); ++i)
            monotone = monotone && est.exceed_prob[i] <= est.exceed_prob[i - 1];
        v.check(log, monotone, "exceedance non-increasing in t");
    }
    return finish(cfg, log, v, {path});
}

RunResult run_quad_tail(const ExperimentConfig& cfg, const std::string& out_dir,
                        std::ostream& log) {
    EntryLaw law = cfg.entry_law();
    const int n = cfg.n_list[0];
    std::vector<cplx> z(n, cplx(0.0));
    z[0] = 1.0;
    TailEstimate est = quadratic_form_tail(law, n, z, cfg.t_grid, cfg.trials, cfg.master_seed);
    std::string path = csv_path(cfg, out_dir, "quad_tail");
    CsvFile csv(path, cfg.resolved(), "statistic,n,L,t,exceed,lo95,hi95,trials");
    write_tail_rows(csv, est);
    Verdicts v;
    log << "n=" << n << " z=e1\n";
    if (law.kind() == LawKind::GaussianReal) {
        // ||X e1||^2 is chi-square(n): the empirical Wilson interval should
        // cover the exact tail
        for (std::size_t i = 0; i < est.thresholds.size(); ++i) {
            double oracle = chi_square_tail(n, n * est.thresholds[i]);
            log << "  t=" << g17(est.thresholds[i]) << " empirical=" << g17(est.exceed_prob[i])
                << " chi2_tail=" << g17(oracle) << "\n";
            v.check(log, oracle >= est.lo95[i] && oracle <= est.hi95[i],
                    "chi-square oracle inside the Wilson interval at t=" + g17(est.thresholds[i]));
        }
    }
    return finish(cfg, log, v, {path});
}

RunResult run_rhoL_tail(const ExperimentConfig& cfg, const std::string& out_dir,
                        std::ostream& log) {
    EntryLaw law = cfg.entry_law();
    SparsityPattern pat = SparsityPattern::build(cfg.pattern_kind(), cfg.n_list[0], cfg.w_list[0]);
    TailEstimate est = rhoL_tail_experiment(law, pat, cfg.L, cfg.t_grid, cfg.trials,
                                            cfg.master_seed, cfg.rho_search);
    std::string path = csv_path(cfg, out_dir, "rhoL_tail");
    CsvFile csv(path, cfg.resolved(), "statistic,n,L,t,exceed,lo95,hi95,trials");
    write_tail_rows(csv, est);
    log << "n=" << est.n << " L=" << est.L << (est.search_mode ? " (search lower bound)" : "")
        << "\n";
    Verdicts v;
    bool monotone = true;
    for (std::size_t i = 1; i < est.exceed_prob.size(); ++i)
        monotone = monotone && est.exceed_prob[i] <= est.exceed_prob[i - 1];
    v.check(log, monotone, "exceedance non-increasing in t");
    return finish(cfg, log, v, {path});
}

RunResult run_net_check(const ExperimentConfig& cfg, const std::string& out_dir,
                        std::ostream& log) {
    std::string path = csv_path(cfg, out_dir, "net_check");
    CsvFile csv(path, cfg.resolved(), "n,epsilon,size,bound,coverage_samples,coverage_ok");
    Verdicts v;
    EntryLaw law = EntryLaw::gaussian_complex();
    for (std::size_t gi = 0; gi < cfg.n_list.size(); ++gi) {
        const int n = cfg.n_list[gi];
        EpsilonNet net = build_epsilon_net(n, cfg.epsilon,
                                           derive_seed(cfg.master_seed, "net", gi, 0),
                                           cfg.coverage_samples);
        std::ostringstream os;
        os << n << ',' << g17(net.epsilon) << ',' << net.count << ',' << g17(net.size_bound)
           << ',' << net.coverage_samples << ',' << (net.coverage_ok ? 1 : 0);
        csv.row(os.str());
        log << "n=" << n << " net size=" << net.count << " bound=" << g17(net.size_bound) << "\n";
        v.check(log, net.coverage_ok, "coverage verified");
        v.check(log, static_cast<double>(net.count) <= net.size_bound,
                "net size within (2/eps)^(2n)");
        // PSD corpus: P = X^2 for a sampled complex Hermitian X
        long long violations = 0;
        SparsityPattern full = SparsityPattern::full(n);
        for (int trial = 0; trial < cfg.trials; ++trial) {
            HermitianMatrix x = HermitianMatrix::sample(
                law, full, derive_seed(cfg.master_seed, "net_psd", gi, trial));
            std::vector<cplx> sq(static_cast<std::size_t>(n) * n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    cplx s = 0.0;
                    for (int t = 0; t < n; ++t) s += x(i, t) * x(t, j);
                    sq[static_cast<std::size_t>(i) * n + j] = s;
                }
            // clean up rounding asymmetry before the PSD check
            for (int i = 0; i < n; ++i) {
                sq[static_cast<std::size_t>(i) * n + i] = sq[static_cast<std::size_t>(i) * n + i].real();
                for (int j = i + 1; j < n; ++j) {
                    cplx m = 0.5 * (sq[static_cast<std::size_t>(i) * n + j] +
                                    std::conj(sq[static_cast<std::size_t>(j) * n + i]));
                    sq[static_cast<std::size_t>(i) * n + j] = m;
                    sq[static_cast<std::size_t>(j) * n + i] = std::conj(m);
                }
            }
            HermitianMatrix p = HermitianMatrix::from_dense(full, std::move(sq));
            NetBoundCheck chk = net_lambda_bound_check(net, p);
            if (!chk.ok) ++violations;
        }
        log << "  PSD corpus: " << cfg.trials << " matrices, " << violations << " violations\n";
        v.check(log, violations == 0, "lambda_max <= max z*Pz/(1-2eps) on the PSD corpus");
    }
    return finish(cfg, log, v, {path});
}

RunResult run_mgf_check(const ExperimentConfig& cfg, const std::string& out_dir,
                        std::ostream& log) {
    EntryLaw law = cfg.entry_law();
    double delta = cfg.delta > 0.0 ? cfg.delta : law.subgauss().delta;
    std::vector<MgfRow> rows = mgf_bound_check(law, delta, cfg.r_grid);
    std::string path = csv_path(cfg, out_dir, "mgf_check");
    CsvFile csv(path, cfg.resolved(), "law,delta,r,lhs,mid,outer,ok");
    bool all_ok = true;
    for (const MgfRow& r : rows) {
        std::ostringstream os;
        os << law.name() << ',' << g17(delta) << ',' << g17(r.r) << ',' << g17(r.lhs) << ','
           << g17(r.mid) << ',' << g17(r.outer) << ',' << (r.ok ? 1 : 0);
        csv.row(os.str());
        all_ok = all_ok && r.ok;
    }
    log << "law=" << law.name() << " delta=" << g17(delta) << " grid points=" << rows.size()
        << "\n";
    Verdicts v;
    v.check(log, all_ok, "E e^{rX} <= 1+3E[e^{dX^2}](e^{r^2/d}-1) <= e^{3r^2 E[e^{dX^2}]/d}");
    return finish(cfg, log, v, {path});
}

RunResult run_linearization(const ExperimentConfig& cfg, const std::string& out_dir,
                            std::ostream& log) {
    EntryLaw law = cfg.entry_law();
    const int n = cfg.n_list[0];
    LinearizationConstants consts = linearization_constants(law);
    std::string path = csv_path(cfg, out_dir, "linearization_check");
    CsvFile csv(path, cfg.resolved(), "law,n,direction,z_norm,tau,C,estimate,stderr,bound,ok");
    Verdicts v;
    for (std::size_t gi = 0; gi < cfg.z_frac.size(); ++gi) {
        const double mag = cfg.z_frac[gi] * consts.tau;
        for (int dir = 0; dir < 2; ++dir) {
            std::vector<cplx> z(n, cplx(0.0));
            if (dir == 0) {
                z[0] = mag;
            } else {
                for (int i = 0; i < n; ++i) z[i] = mag / std::sqrt(static_cast<double>(n));
            }
            LinearizationResult res = gaussian_linearization_check(
                law, n, z, cfg.trials, derive_seed(cfg.master_seed, "linearization", gi, dir));
            std::ostringstream os;
            os << law.name() << ',' << n << ',' << (dir == 0 ? "e1" : "uniform") << ','
               << g17(res.z_norm) << ',' << g17(res.tau) << ',' << g17(res.c) << ','
               << g17(res.estimate) << ',' << g17(res.stderr_) << ',' << g17(res.bound) << ','
               << (res.ok ? 1 : 0);
            csv.row(os.str());
            v.check(log, res.ok,
                    "E e^{|Y.z|^2} <= e^{C|z|^2} at |z|=" + g17(res.z_norm) + " (" +
                        (dir == 0 ? "e1" : "uniform") + ")");
        }
    }
    return finish(cfg, log, v, {path});
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                         std::ostream& log) {
    log << "experiment: " << experiment_name(cfg.experiment) << "\n";
    switch (cfg.experiment) {
        case ExperimentKind::Edge:
        case ExperimentKind::Semicircle:
            return run_edge_like(cfg, out_dir, log);
        case ExperimentKind::Localization:
        case ExperimentKind::Delocalization:
            return run_localization(cfg, out_dir, log);
        case ExperimentKind::Walks:
            return run_walks(cfg, out_dir, log);
        case ExperimentKind::TraceMoment:
            return run_trace_moment(cfg, out_dir, log);
        case ExperimentKind::NormTail:
            return run_norm_tail(cfg, out_dir, log);
        case ExperimentKind::QuadTail:
            return run_quad_tail(cfg, out_dir, log);
        case ExperimentKind::RhoLTail:
            return run_rhoL_tail(cfg, out_dir, log);
        case ExperimentKind::NetCheck:
            return run_net_check(cfg, out_dir, log);
        case ExperimentKind::MgfCheck:
            return run_mgf_check(cfg, out_dir, log);
        case ExperimentKind::LinearizationCheck:
            return run_linearization(cfg, out_dir, log);
    }
    throw std::logic_error("unhandled experiment kind");
}

int selftest(std::ostream& log) {
    Verdicts v;
    log << "selftest\n";

    // counter rng: reference block values and stream independence
    {
        auto b = philox4x64({1, 0, 0, 0}, {0, 0});
        v.check(log, b[0] == 0x02f4ba6408e4d89bull && b[3] == 0x907d7a052fd5b4dcull,
                "philox4x64 reference block");
        CounterRng r1(42, 7), r3(42, 7);
        bool same = true;
        for (int i = 0; i < 8; ++i) same = same && r1.next_u64() == r3.next_u64();
        v.check(log, same, "counter stream reproducibility");
    }
    // patterns
    {
        SparsityPattern p = SparsityPattern::cyclic_band(10, 5);
        bool ok = true;
        for (int c : p.row_counts()) ok = ok && c == 5;
        v.check(log, ok, "cyclic band rows all W");
        SparsityPattern s = SparsityPattern::standard_band(10, 5);
        auto rc = s.row_counts();
        v.check(log, rc[0] == 3 && rc[1] == 4 && rc[5] == 5 && rc[9] == 3,
                "standard band edge rows deficient");
    }
    // eigen: closed-form Toeplitz oracle
    {
        const int n = 50;
        SparsityPattern pat = SparsityPattern::standard_band(n, 3);
        std::vector<cplx> a(static_cast<std::size_t>(n) * n, cplx(0.0));
        for (int i = 0; i + 1 < n; ++i) {
            a[static_cast<std::size_t>(i) * n + i + 1] = 1.0;
            a[static_cast<std::size_t>(i + 1) * n + i] = 1.0;
        }
        HermitianMatrix h = HermitianMatrix::from_dense(pat, std::move(a));
        Spectrum s = eigen_full(h, true);
        double err = 0.0;
        for (int j = 0; j < n; ++j) {
            double exact = 2.0 * std::cos((n - j) * M_PI / (n + 1));
            err = std::max(err, std::abs(s.eigenvalues[j] - exact));
        }
        v.check(log, err < 1e-10, "Toeplitz tridiagonal eigenvalues");
        v.check(log, s.residual_bound < 1e-10, "residual certificate");
    }
    // localization arithmetic
    {
        std::vector<cplx> u(10, cplx(1.0 / std::sqrt(10.0)));
        v.check(log, loc_length(u, 0.25) == 8 && loc_length(u, 0.5) == 5,
                "localization length on the uniform vector");
    }
    // walks census at k=1
    {
        auto classes = enumerate_classes(1);
        v.check(log, classes.size() == 2 && verify_fk_inequalities(1).ok, "walk census k=1");
    }
    // scalar lemma chain
    {
        std::vector<double> rg{-3, -2, -1, 0, 1, 2, 3};
        auto rows = mgf_bound_check(EntryLaw::rademacher(), 1.0, rg);
        bool ok = std::all_of(rows.begin(), rows.end(), [](const MgfRow& r) { return r.ok; });
        v.check(log, ok, "mgf chain for the Rademacher law");
    }
    // semicircle values
    {
        v.check(log,
                std::abs(semicircle_pdf(0.0) - 1.0 / M_PI) < 1e-15 &&
                    std::abs(semicircle_cdf(0.0) - 0.5) < 1e-15,
                "semicircle density and cdf anchors");
    }
    log << (v.failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return v.failures;
}

}  // namespace bandlab
