#include "tfred/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

namespace tfred {

namespace {

std::string vec_text(const Vec& x) {
    std::ostringstream os;
    os.precision(10);
    os << '(';
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ')';
    return os.str();
}

std::size_t samples_per_axis(const SlowManifold& mf, std::size_t samples) {
    return mf.dim() == 1 ? samples : 50;
}

ConditionVerdict failed_with(const std::string& name, const std::string& what, std::optional<Vec> witness = {}) {
    ConditionVerdict v{name};
    v.verdict = Verdict::failed;
    v.detail = what;
    v.witness = std::move(witness);
    return v;
}

ConditionVerdict gp_verdict(const SlowManifold& mf) {
    ConditionVerdict v{"GP"};
    if (std::holds_alternative<GraphChart>(mf.chart)) {
        v.verdict = Verdict::certified;
        v.detail = "Y is a graph over its parameter domain";
    } else if (std::holds_alternative<Curve1dChart>(mf.chart)) {
        const CurveTrace ct = CurveTrace::trace(mf);
        v.samples = ct.nodes().size();
        v.margins["arc_length"] = ct.length();
        if (ct.complete()) {
            v.verdict = Verdict::certified;
            v.detail = "Y traced as one arc between region faces";
        } else {
            v.verdict = Verdict::failed;
            v.detail = "curve trace incomplete: " + ct.diagnostic();
        }
    } else {
        v.verdict = Verdict::skipped;
        v.detail = "no global chart; immersion not verified for implicit manifolds";
    }
    return v;
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (std::filesystem::path(dir) / name).string());
    f << text;
}

std::string pad(std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
}

}  // namespace

LyapunovCertificate build_certificate(const ExampleSystem& ex, const ReducedField& rf, const Vec& z) {
    const SlowManifold& mf = ex.manifold;
    if (ex.lyapunov_candidate) {
        const auto& c = *ex.lyapunov_candidate;
        const ManifoldSample s = sample_manifold(mf, samples_per_axis(mf, 200));
        return certificate_from_field(c.phi, rf, z, c.a, c.k, s.points);
    }
    if (std::holds_alternative<Curve1dChart>(mf.chart)) return check_lc_1d(rf, mf, z);
    throw std::invalid_argument("no Lyapunov candidate for a manifold of dimension " + std::to_string(mf.dim()));
}

CheckResult run_checks(const ExampleSystem& ex, const RunConfig& cfg) {
    CheckResult res;
    ConditionReport& rep = res.report;
    rep.system = ex.system.name;
    const SlowManifold& mf = ex.manifold;
    const std::size_t n = samples_per_axis(mf, cfg.samples);
    rep.info["seed"] = std::to_string(cfg.seed);
    rep.info["samples"] = std::to_string(cfg.samples);
    rep.info["chart"] = mf.chart_name();
    rep.info["decomposition"] =
        ex.decomposition.source == DecompositionSource::structural ? "structural" : "user_supplied";

    // decomposition on Y and through the region
    {
        ConditionVerdict v{"decomposition"};
        try {
            std::vector<Vec> pts = sample_manifold(mf, n).points;
            std::mt19937_64 rng(cfg.seed);
            for (auto& x : mf.region.sample_interior(cfg.samples, rng)) pts.push_back(std::move(x));
            const DecompositionReport d = verify_decomposition(ex.decomposition, ex.system, pts);
            v.samples = pts.size();
            v.margins["max_residual"] = d.max_residual;
            v.margins["worst_condition"] = d.worst_condition;
            v.verdict = d.ok ? Verdict::certified : Verdict::failed;
            v.detail = d.message;
            if (!d.ok) v.witness = d.worst_residual_point.size() ? d.worst_residual_point : d.worst_condition_point;
        } catch (const std::exception& e) {
            v = failed_with("decomposition", e.what());
        }
        rep.conditions.push_back(std::move(v));
    }

    try {
        auto [tf0, tfi] = check_tf0_tfi(ex.system, ex.decomposition, mf, n);
        rep.conditions.push_back(std::move(tf0));
        rep.conditions.push_back(std::move(tfi));
    } catch (const std::exception& e) {
        rep.conditions.push_back(failed_with("TF0", e.what()));
        rep.conditions.push_back(failed_with("TFI", e.what()));
    }
    try {
        rep.conditions.push_back(check_tfii(ex.system, mf, n));
    } catch (const std::exception& e) {
        rep.conditions.push_back(failed_with("TFII", e.what()));
    }
    try {
        rep.conditions.push_back(check_cis(ex.system, ex.cis_region, cfg.eps_list, 50, cfg.seed));
    } catch (const std::exception& e) {
        rep.conditions.push_back(failed_with("CIS", e.what()));
    }
    try {
        rep.conditions.push_back(gp_verdict(mf));
    } catch (const std::exception& e) {
        rep.conditions.push_back(failed_with("GP", e.what()));
    }

    std::optional<ReducedField> rf;
    try {
        rf = make_reduced_field(ex.decomposition, ex.system);
    } catch (const std::exception& e) {
        rep.conditions.push_back(failed_with("stationary", e.what()));
        return res;
    }

    {
        ConditionVerdict v{"stationary"};
        try {
            res.stationary = find_stationary_points(*rf, mf);
            v.samples = res.stationary.size();
            if (res.stationary.size() == 1) {
                v.verdict = Verdict::certified;
                v.detail = "unique stationary point " + vec_text(res.stationary.front());
                v.witness.reset();
            } else {
                v.verdict = Verdict::failed;
                v.detail = std::to_string(res.stationary.size()) + " stationary points in the region";
                if (!res.stationary.empty()) v.witness = res.stationary.back();
            }
        } catch (const std::exception& e) {
            v = failed_with("stationary", e.what());
        }
        rep.conditions.push_back(std::move(v));
    }

    if (res.stationary.size() != 1) {
        ConditionVerdict v{"LC"};
        v.verdict = Verdict::failed;
        v.detail = "needs exactly one stationary point";
        rep.conditions.push_back(std::move(v));
        return res;
    }
    const Vec z = res.stationary.front();
    try {
        if (!ex.lyapunov_candidate && !std::holds_alternative<Curve1dChart>(mf.chart)) {
            ConditionVerdict v{"LC"};
            v.verdict = Verdict::skipped;
            v.detail = "no Lyapunov candidate supplied for this manifold";
            rep.conditions.push_back(std::move(v));
        } else {
            LyapunovCertificate cert = build_certificate(ex, *rf, z);
            const LyapunovCheck chk = verify_lyapunov(cert, *rf, mf, n);
            rep.conditions.push_back(lc_verdict(cert, chk));
            res.certificate = std::move(cert);
        }
    } catch (const MultipleEquilibria& e) {
        rep.conditions.push_back(failed_with("LC", e.what(), e.where));
    } catch (const std::exception& e) {
        rep.conditions.push_back(failed_with("LC", e.what(), z));
    }
    return res;
}

SweepOptions sweep_options(const RunConfig& cfg) {
    SweepOptions o;
    o.tau0 = cfg.tau0;
    o.T = cfg.T;
    o.grid = cfg.grid;
    o.record_timing = cfg.record_timing;
    o.integrator.rtol = cfg.rtol;
    o.integrator.atol = cfg.atol;
    o.integrator.method = Method::implicit_l_stable;
    return o;
}

std::string list_text(const Registry& reg) {
    std::ostringstream os;
    os << pad("name", 28) << pad("dim", 5) << pad("rank", 6) << pad("chart", 10) << "description\n";
    for (const auto& name : reg.names()) {
        const ExampleSystem ex = reg.make(name);
        os << pad(name, 28) << pad(std::to_string(ex.system.dim), 5)
           << pad(std::to_string(ex.decomposition.rank), 6) << pad(ex.manifold.chart_name(), 10) << ex.description
           << '\n';
    }
    return os.str();
}

namespace {

int cmd_reduce(const ExampleSystem& ex, const RunConfig& cfg, std::ostream& out) {
    std::ostringstream os;
    os.precision(12);
    const SlowManifold& mf = ex.manifold;
    os << "system = " << ex.system.name << '\n';
    os << "dimension = " << ex.system.dim << '\n';
    os << "fast_rank = " << ex.decomposition.rank << '\n';
    os << "slow_dimension = " << mf.dim() << '\n';
    os << "decomposition = "
       << (ex.decomposition.source == DecompositionSource::structural ? "structural" : "user_supplied") << '\n';
    os << "chart = " << mf.chart_name() << '\n';
    const ReducedField rf = make_reduced_field(ex.decomposition, ex.system);
    const ManifoldSample s = sample_manifold(mf, mf.dim() == 1 ? 9 : 4);
    const DecompositionReport d = verify_decomposition(ex.decomposition, ex.system, s.points);
    os << "decomposition_residual = " << d.max_residual << '\n';
    const Vec y0 = fast_fiber_project(ex.system, mf, ex.initial_state);
    os << "initial_state = " << vec_text(ex.initial_state) << '\n';
    os << "projected_initial_state = " << vec_text(y0) << '\n';
    os << "reduced_field_at_projection = " << vec_text(rf.q(y0)) << '\n';
    for (const auto& z : find_stationary_points(rf, mf)) os << "stationary_point = " << vec_text(z) << '\n';
    os << "\n# samples of Y and the reduced field there\n";
    for (const auto& x : s.points) os << vec_text(x) << " -> " << vec_text(rf.q(x)) << '\n';
    out << os.str();
    write_file(cfg.out_dir, "reduce.txt", os.str());
    return d.ok ? kExitOk : kExitFailure;
}

int cmd_check(const ExampleSystem& ex, const RunConfig& cfg, std::ostream& out) {
    const CheckResult res = run_checks(ex, cfg);
    const std::string text = res.report.to_text();
    out << text;
    write_file(cfg.out_dir, "report.txt", text);
    return res.report.passed() ? kExitOk : kExitFailure;
}

int cmd_lyapunov(const ExampleSystem& ex, const RunConfig& cfg, std::ostream& out) {
    const ReducedField rf = make_reduced_field(ex.decomposition, ex.system);
    const auto zs = find_stationary_points(rf, ex.manifold);
    if (zs.size() != 1) {
        out << "lyapunov: " << zs.size() << " stationary points in the region; need exactly one\n";
        for (const auto& z : zs) out << "witness = " << vec_text(z) << '\n';
        return kExitFailure;
    }
    std::ostringstream os;
    os.precision(12);
    try {
        const LyapunovCertificate cert = build_certificate(ex, rf, zs.front());
        const LyapunovCheck chk = verify_lyapunov(cert, rf, ex.manifold, samples_per_axis(ex.manifold, cfg.samples));
        os << "system = " << ex.system.name << '\n';
        os << "z = " << vec_text(cert.z) << '\n';
        os << "a = " << cert.a << "\nk = " << cert.k << "\nnu = " << cert.nu << '\n';
        os << "c1 = " << cert.c1 << "\nc2 = " << cert.c2 << "\nrho = " << cert.rho << '\n';
        os << "c1_star = " << cert.c1_star << "\nc2_star = " << cert.c2_star << '\n';
        os << "envelope_constant = " << cert.envelope_constant() << '\n';
        if (cert.eigenvalue != 0.0) os << "eigenvalue = " << cert.eigenvalue << '\n';
        os << "samples = " << chk.samples << '\n';
        os << "positivity_slack = " << chk.positivity_slack << '\n';
        os << "power_bound_slack = " << chk.bounds_slack << '\n';
        os << "decrease_slack = " << chk.decrease_slack << '\n';
        os << "verdict = " << (chk.ok() ? "certified-at-samples" : "failed") << '\n';
        if (!chk.ok()) {
            os << "detail = " << chk.detail << '\n';
            if (chk.witness) os << "witness = " << vec_text(*chk.witness) << '\n';
        }
        out << os.str();
        write_file(cfg.out_dir, "lyapunov.txt", os.str());
        return chk.ok() ? kExitOk : kExitFailure;
    } catch (const MultipleEquilibria& e) {
        out << "lyapunov: " << e.what() << "\nwitness = " << vec_text(e.where) << '\n';
        return kExitFailure;
    } catch (const NotLinearlyStable& e) {
        out << "lyapunov: " << e.what() << "\nwitness = " << vec_text(zs.front()) << '\n';
        return kExitFailure;
    }
}

int cmd_converge(const ExampleSystem& ex, const RunConfig& cfg, std::ostream& out) {
    if (!cfg.force) {
        const CheckResult res = run_checks(ex, cfg);
        if (!res.report.passed()) {
            out << res.report.to_text();
            out << "converge: hypotheses not certified; rerun with --force to sweep anyway\n";
            return kExitFailure;
        }
    }
    const ReducedField rf = make_reduced_field(ex.decomposition, ex.system);
    const ConvergenceTable table =
        convergence_sweep(ex.system, rf, ex.manifold, ex.initial_state, cfg.eps_list, sweep_options(cfg));
    const std::string csv = table.to_csv();
    std::string summary = "system = " + ex.system.name + "\nseed = " + std::to_string(cfg.seed) + '\n' + table.summary();
    write_file(cfg.out_dir, "convergence.csv", csv);
    write_file(cfg.out_dir, "convergence.txt", summary);
    out << csv << '\n' << summary;
    return table.passed() ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Registry& reg) {
    CLI::App app{"Tikhonov-Fenichel reduction, hypothesis checks and convergence sweeps", "tfred"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    std::string config_path, eps_text;
    std::vector<std::string> sets;
    double tau0 = cfg.tau0, T = cfg.T;
    bool force = false, timing = false;
    std::uint64_t seed = cfg.seed;
    std::string out_dir;
    std::size_t samples = cfg.samples;

    app.add_option("--config", config_path, "Read a run configuration file first");
    app.add_option("--system", cfg.system, "Registered system name");
    app.add_option("--eps", eps_text, "Comma-separated, strictly decreasing eps values");
    app.add_option("--tau0", tau0, "Start of the comparison window");
    app.add_option("--T", T, "End of the comparison window");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--seed", seed, "Seed for all sampling");
    app.add_option("--set", sets, "Parameter override name=value (repeatable)");
    app.add_option("--samples", samples, "Manifold samples per check");
    app.add_flag("--force", force, "Sweep even if the checks fail");
    app.add_flag("--timing", timing, "Record wall-clock times in the CSV");

    auto* list = app.add_subcommand("list", "List registered systems");
    auto* reduce = app.add_subcommand("reduce", "Decomposition, projection and reduced field");
    auto* check = app.add_subcommand("check", "Certify TF0, TFI, TFII, CIS, GP and LC at samples");
    auto* lyap = app.add_subcommand("lyapunov", "Build and verify a Lyapunov certificate");
    auto* conv = app.add_subcommand("converge", "Full against reduced trajectories over eps");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (!config_path.empty()) {
            const std::string system = cfg.system;
            cfg = load_config(config_path);
            if (!system.empty()) cfg.system = system;
        }
        if (!eps_text.empty()) cfg.eps_list = parse_eps_list(eps_text);
        if (app.count("--tau0")) cfg.tau0 = tau0;
        if (app.count("--T")) cfg.T = T;
        if (app.count("--seed")) cfg.seed = seed;
        if (app.count("--samples")) cfg.samples = samples;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (force) cfg.force = true;
        if (timing) cfg.record_timing = true;
        for (const auto& s : sets) {
            const auto [k, v] = parse_assignment(s);
            cfg.overrides[k] = v;
        }
        if (!(cfg.tau0 > 0.0) || !(cfg.tau0 < cfg.T)) throw ConfigError("need 0 < tau0 < T");
        if (cfg.samples < 2) throw ConfigError("need at least two samples");

        if (list->parsed()) {
            out << list_text(reg);
            return kExitOk;
        }
        if (cfg.system.empty()) throw ConfigError("--system is required");
        const ExampleSystem ex = reg.make(cfg.system, cfg.overrides);
        write_file(cfg.out_dir, "run.cfg", write_config(cfg));
        if (reduce->parsed()) return cmd_reduce(ex, cfg, out);
        if (check->parsed()) return cmd_check(ex, cfg, out);
        if (lyap->parsed()) return cmd_lyapunov(ex, cfg, out);
        if (conv->parsed()) return cmd_converge(ex, cfg, out);
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SingularPencil& e) {
        err << "error: " << e.what() << "\nwitness = " << vec_text(e.where) << '\n';
        return kExitFailure;
    } catch (const ProjectionDiverged& e) {
        err << "error: " << e.what() << "\nwitness = " << vec_text(e.last_state) << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    static const Registry reg = Registry::builtin();
    return run_cli(args, std::cout, std::cerr, reg);
}

}  // namespace tfred
