// waveforge: steady state, spectrum, PI design, closed-loop simulation and
// delay-root analysis for the boundary-controlled semilinear wave equation.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "waveforge/delay.hpp"
#include "waveforge/io.hpp"
#include "waveforge/pipeline.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace waveforge;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kConfigError = 2, kNumericalError = 3 };

struct Options {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<int> n_modes;
    std::optional<double> dt;
    std::optional<unsigned long> seed;
};

class Run {
public:
    Run(std::string command, const Options& opt) : command_(std::move(command)), opt_(opt) {
        const std::string text = read_text_file(opt.config_path);
        config_ = parse_config(text);
        std::string overrides;
        if (opt.n_modes) {
            // an automatic tail cutoff follows the mode count
            if (config_.n_tail == config_.n_modes) config_.n_tail = *opt.n_modes;
            config_.n_modes = *opt.n_modes;
            config_.n_tail = std::max(config_.n_tail, config_.n_modes);
            overrides += "\n--n-modes=" + std::to_string(*opt.n_modes);
        }
        if (opt.dt) {
            config_.dt = *opt.dt;
            overrides += "\n--dt=" + fmt_num(*opt.dt);
        }
        if (opt.seed) {
            config_.seed = *opt.seed;
            overrides += "\n--seed=" + std::to_string(*opt.seed);
        }
        require_valid(config_);
        hash_ = fnv1a_hex(text + overrides);
        fs::create_directories(opt.out_dir);
    }

    const ProblemConfig& config() const { return config_; }
    ProblemConfig& config() { return config_; }

    std::string out(const std::string& name) {
        const std::string p = (fs::path(opt_.out_dir) / name).string();
        outputs_.push_back(name);
        return p;
    }
    void stage(const std::string& name) { stages_.push_back(name); }
    void residual(const std::string& name, double v) { residuals_[name] = v; }
    bool check(const std::string& name, bool passed, double value, double threshold) {
        checks_.push_back({{"name", name}, {"passed", passed}, {"value", value}, {"threshold", threshold}});
        all_passed_ = all_passed_ && passed;
        std::printf("%-22s %s  (%.3e vs %.1e)\n", name.c_str(), passed ? "PASS" : "FAIL", value, threshold);
        return passed;
    }
    bool passed() const { return all_passed_; }

    void write_manifest() {
        json m;
        m["command"] = command_;
        m["config"] = fs::path(opt_.config_path).filename().string();
        m["config_hash"] = hash_;
        m["stages"] = stages_;
        m["outputs"] = outputs_;
        json r = json::object();
        for (const auto& [k, v] : residuals_) r[k] = v;
        m["residuals"] = r;
        m["checks"] = checks_;
        m["passed"] = all_passed_;
        std::FILE* f = std::fopen((fs::path(opt_.out_dir) / "manifest.json").string().c_str(), "w");
        if (!f) throw Error("cannot write manifest.json");
        const std::string s = m.dump(2) + "\n";
        std::fputs(s.c_str(), f);
        std::fclose(f);
    }

private:
    std::string command_;
    Options opt_;
    ProblemConfig config_;
    std::string hash_;
    std::vector<std::string> stages_, outputs_;
    std::map<std::string, double> residuals_;
    json checks_ = json::array();
    bool all_passed_ = true;
};

void print_warnings(const ModeBasis& basis) {
    for (const auto& w : basis.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int cmd_steady(Run& run) {
    const ProblemConfig& c = run.config();
    const SteadyState ss = compute_steady_state(c);
    run.stage("steady");
    write_steady_csv(run.out("steady.csv"), ss);
    run.residual("conservation", ss.conservation_residual);
    std::printf("z_e = %.10f\nu_e = %.10f\nconservation residual = %.3e\n", ss.z_e, ss.u_e,
                ss.conservation_residual);
    return kOk;
}

int cmd_spectrum(Run& run) {
    const ProblemConfig& c = run.config();
    const SteadyState ss = compute_steady_state(c);
    run.stage("steady");
    const ModeBasis basis = build_basis(c, ss);
    run.stage("spectrum");
    print_warnings(basis);
    write_steady_csv(run.out("steady.csv"), ss);
    write_modes_csv(run.out("modes.csv"), basis);
    const double bio = max_biorthogonality_defect(basis);
    const double adj = adjoint_identity_defect(basis);
    run.residual("biorthogonality", bio);
    run.residual("adjoint_identity", adj);
    std::printf("u_e = %.10f\nn0 = %d\n", ss.u_e, basis.n0);
    int unstable = 0;
    for (int k = 0; k <= c.n_modes; ++k) {
        const cplx l = basis.mode(k).lambda;
        if (l.real() > 0.0) unstable += k == 0 ? 1 : 2;
        std::printf("lambda_%-3d = %+.10f %+.10fi\n", k, l.real(), l.imag());
    }
    std::printf("unstable eigenvalues: %d\nRiesz estimates: [%.4e, %.4e]\n", unstable, basis.gram_min,
                basis.gram_max);
    bool ok = run.check("biorthogonality", bio < 1e-6, bio, 1e-6);
    ok = run.check("adjoint_identity", adj < 1e-6, adj, 1e-6) && ok;
    return ok ? kOk : kCheckFailed;
}

int cmd_design(Run& run) {
    const Design d = run_design(run.config());
    run.stage("steady");
    run.stage("spectrum");
    run.stage("reduction");
    run.stage("control");
    print_warnings(d.basis);
    write_matrix_csv(run.out("reduced_A.csv"), d.model.A);
    write_matrix_csv(run.out("reduced_B.csv"), d.model.B);
    write_matrix_csv(run.out("reduced_L1.csv"), d.model.L1);
    write_tail_csv(run.out("tail.csv"), d.tail);
    write_gains_csv(run.out("gains.csv"), d.gains);
    run.residual("placement", d.gains.placement_residual);
    run.residual("lyapunov", d.gains.lyapunov_residual);
    std::printf("n0 = %d, alpha0 = %.10f, beta0 = %.10f\n", d.model.n0, d.tail.alpha0, d.tail.beta0);
    std::printf("K =");
    for (Eigen::Index i = 0; i < d.gains.K.size(); ++i) std::printf(" %.10f", d.gains.K[i]);
    std::printf("\npoles:");
    for (const auto& p : d.gains.poles) std::printf(" %g%+gi", p.real(), p.imag());
    std::printf("\n");
    bool ok = run.check("kalman_rank", d.gains.kalman.controllable, d.gains.kalman.rank, d.gains.kalman.n);
    ok = run.check("placement_residual", d.gains.placement_residual < 1e-8, d.gains.placement_residual, 1e-8) && ok;
    ok = run.check("lyapunov_residual", d.gains.lyapunov_residual < 1e-10, d.gains.lyapunov_residual, 1e-10) && ok;
    return ok ? kOk : kCheckFailed;
}

int cmd_simulate(Run& run) {
    const ProblemConfig& c = run.config();
    if (c.dt > 0.1) std::fprintf(stderr, "warning: dt = %g exceeds 0.1; the modal RK4 run may be inaccurate\n", c.dt);
    const Design d = run_design(c);
    run.stage("design");
    print_warnings(d.basis);
    const SimulationTrace tr = run_simulation(c, d.ss, d.basis, d.model, d.gains);
    run.stage("simulate");
    write_trace_csv(run.out("trace.csv"), tr);
    write_snapshots_csv(run.out("snapshots.csv"), tr);
    write_plot_script(run.out("plot.gp"), "trace.csv", "snapshots.csv", d.ss.z_e);
    const auto& last = tr.records.back();
    std::printf("t = %.6g  z = %.10f  u = %.10f  v = %.6e  V = %.6e\n", last.t, last.z, last.u, last.v, last.V);
    // decay estimate over the leading segment with z_r = 0
    const double t_zr = c.zr.plateaus.empty() ? last.t : c.zr.plateaus.front().time;
    try {
        const double kappa = estimate_decay_rate(tr, 0.0, t_zr);
        run.residual("kappa_hat", kappa);
        std::printf("kappa_hat (t < %g) = %.6f\n", t_zr, kappa);
    } catch (const Error&) {
    }
    if (tr.diverged) {
        std::fprintf(stderr, "error: %s\n", tr.failure.c_str());
        run.check("no_divergence", false, last.t, c.T);
        return kCheckFailed;
    }
    return kOk;
}

int cmd_oracle(Run& run) {
    const ProblemConfig& c = run.config();
    const Design d = run_design(c);
    run.stage("design");
    const SimulationTrace modal = run_simulation(c, d.ss, d.basis, d.model, d.gains);
    run.stage("simulate");
    const SimulationTrace fdm = run_fdm_oracle(c, d.ss, d.basis, d.model, d.gains);
    run.stage("oracle");
    write_trace_csv(run.out("trace.csv"), modal);
    write_trace_csv(run.out("fdm_trace.csv"), fdm);
    write_snapshots_csv(run.out("fdm_snapshots.csv"), fdm);
    if (modal.diverged || fdm.diverged) {
        std::fprintf(stderr, "error: %s\n", (modal.diverged ? modal.failure : fdm.failure).c_str());
        run.check("modal_vs_fdm", false, std::numeric_limits<double>::infinity(), 0.05);
        return kCheckFailed;
    }
    const OracleComparison cmp = compare_outputs(modal, fdm, d.ss.z_e);
    run.residual("max_abs_dz", cmp.max_abs);
    std::printf("max |z_modal - z_fdm| = %.6e, max |z_fdm - z_e| = %.6e\n", cmp.max_abs, cmp.reference);
    return run.check("modal_vs_fdm", cmp.relative < 0.05, cmp.relative, 0.05) ? kOk : kCheckFailed;
}

int cmd_delay(Run& run) {
    const ProblemConfig& c = run.config();
    std::vector<DelayRootResult> results;
    std::vector<BetaRoot> beta_roots;
    double worst = 0.0;
    bool unstable = true;
    for (int k : c.delay.k_values) {
        results.push_back(unstable_roots(c.alpha, c.L, k, c.delay.n_min, c.delay.n_max));
        const auto& r = results.back();
        std::printf("k = %-3d h = %.10f gamma = %.12f\n", k, r.h, r.gamma);
        for (const auto& root : r.roots) {
            worst = std::max(worst, root.residual);
            unstable = unstable && root.lambda.real() > 0.0;
        }
        if (c.delay.beta != 0.0) {
            for (const auto& root : r.roots) {
                beta_roots.push_back(beta_refined_root(c.alpha, c.L, k, c.delay.beta, root.n, root.lambda));
                const auto& b = beta_roots.back();
                std::printf("  n = %-3d lambda = %+.8f %+.8fi  drift %.3e%s\n", b.n, b.lambda.real(), b.lambda.imag(),
                            b.drift, b.unstable ? "" : "  (warning: Re <= 0)");
            }
        }
    }
    run.stage("delay");
    write_delay_csv(run.out("delay_roots.csv"), results, beta_roots, c.delay.beta);
    bool ok = run.check("delay_residual", worst < 1e-9, worst, 1e-9);
    ok = run.check("delay_unstable", unstable, unstable ? 1.0 : 0.0, 1.0) && ok;
    return ok ? kOk : kCheckFailed;
}

int cmd_verify(Run& run) {
    const auto checks = verify_suite(run.config());
    run.stage("verify");
    for (const auto& c : checks) {
        run.check(c.name, c.passed, c.value, c.threshold);
        if (!c.detail.empty() && !c.passed) std::fprintf(stderr, "  %s\n", c.detail.c_str());
    }
    return run.passed() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral PI regulation of a boundary-controlled semilinear wave equation"};
    app.require_subcommand(1);
    Options opt;
    using Handler = int (*)(Run&);
    const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
        {"steady", "steady state and equilibrium input", cmd_steady},
        {"spectrum", "eigenvalues, eigenfunctions and dual basis", cmd_spectrum},
        {"design", "reduced model, pole placement and Lyapunov matrix", cmd_design},
        {"simulate", "closed-loop modal simulation", cmd_simulate},
        {"oracle", "finite-difference oracle compared with the modal run", cmd_oracle},
        {"delay", "unstable characteristic roots under input delay", cmd_delay},
        {"verify", "run the built-in verification suite", cmd_verify},
    };
    std::vector<std::pair<CLI::App*, Handler>> subs;
    for (const auto& [name, help, fn] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config_path, "configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
        sub->add_option("--n-modes", opt.n_modes, "override discretization.n_modes");
        sub->add_option("--dt", opt.dt, "override simulation.dt");
        sub->add_option("--seed", opt.seed, "override simulation.seed");
        subs.emplace_back(sub, fn);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfigError;
    }

    std::string name;
    Handler handler = nullptr;
    for (const auto& [sub, fn] : subs) {
        if (sub->parsed()) {
            name = sub->get_name();
            handler = fn;
        }
    }
    std::optional<Run> run;
    try {
        run.emplace(name, opt);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error:\n");
        for (const auto& p : e.problems()) std::fprintf(stderr, "  - %s\n", p.c_str());
        return kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfigError;
    }
    int code = kOk;
    try {
        code = handler(*run);
    } catch (const BlowUpError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        run->check("steady_bounded", false, e.abscissa(), run->config().L);
        code = kNumericalError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        run->check(name, false, 0.0, 0.0);
        code = kNumericalError;
    }
    try {
        run->write_manifest();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        if (code == kOk) code = kNumericalError;
    }
    return code;
}
