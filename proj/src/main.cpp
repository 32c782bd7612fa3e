#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "igp/analysis.hpp"
#include "igp/config.hpp"
#include "igp/cubic.hpp"
#include "igp/equilibria.hpp"
#include "igp/io.hpp"
#include "igp/model.hpp"

namespace fs = std::filesystem;
using namespace igp;

namespace {

struct CliArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
    int jobs = 1;
};

RunConfig effective_config(const CliArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) load_config_file(cfg, args.config_path);
    for (const auto& assignment : args.overrides) apply_override(cfg, assignment);
    cfg.validate();
    return cfg;
}

fs::path prepare_out_dir(const CliArgs& args) {
    fs::path dir(args.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw ConfigError("cannot create output directory: " + args.out_dir);
    return dir;
}

// Common manifest preamble so any run can be replayed from its manifest alone.
Manifest base_manifest(const std::string& command, const CliArgs& args, const RunConfig& cfg) {
    Manifest m;
    m.section("run");
    m.put("command", command);
    m.put("config_file", args.config_path.empty() ? "(none)" : args.config_path);
    for (const auto& o : args.overrides) m.put("override", o);
    m.section("model");
    m.put("b1", cfg.model.b1);
    m.put("b2", cfg.model.b2);
    m.put("b3", cfg.model.b3);
    m.put("c", cfg.model.c);
    m.put("a11", cfg.model.a11);
    m.put("a12", cfg.model.a12);
    m.put("a13", cfg.model.a13);
    m.put("a21", cfg.model.a21);
    m.put("a23", cfg.model.a23);
    m.put("a31", cfg.model.a31);
    m.put("a32", cfg.model.a32);
    m.section("initial");
    m.put("x", cfg.initial[0]);
    m.put("y", cfg.initial[1]);
    m.put("z", cfg.initial[2]);
    m.section("solver");
    m.put("rel_tol", cfg.solver.rel_tol);
    m.put("abs_tol", cfg.solver.abs_tol);
    m.put("max_step", cfg.solver.max_step);
    m.put("initial_step", cfg.solver.initial_step);
    m.put("max_steps", static_cast<long long>(cfg.solver.max_steps));
    return m;
}

std::string complex_str(const std::complex<double>& v) {
    std::string s = fmt17(v.real());
    s += (v.imag() < 0 ? " - " : " + ");
    s += fmt17(std::abs(v.imag()));
    s += "i";
    return s;
}

int cmd_simulate(const CliArgs& args) {
    const RunConfig cfg = effective_config(args);
    const fs::path dir = prepare_out_dir(args);
    const Trajectory traj = integrate(cfg.model, cfg.initial, cfg.simulate.t_end, cfg.solver,
                                      cfg.simulate.sample_interval);
    write_trajectory_csv((dir / "trajectory.csv").string(), traj);

    Manifest m = base_manifest("simulate", args, cfg);
    m.section("simulate");
    m.put("t_end", cfg.simulate.t_end);
    m.put("sample_interval", cfg.simulate.sample_interval);
    m.section("outputs");
    m.put("trajectory", "trajectory.csv");
    m.put("samples", static_cast<long long>(traj.times.size()));
    const auto last = traj.states.cols() - 1;
    m.put("final_x", traj.states(0, last));
    m.put("final_y", traj.states(1, last));
    m.put("final_z", traj.states(2, last));
    m.write((dir / "simulate_manifest.txt").string());

    std::printf("simulate: %zu samples to t = %s; final state (%s, %s, %s)\n",
                traj.times.size(), fmt17(traj.times.back()).c_str(),
                fmt17(traj.states(0, last)).c_str(), fmt17(traj.states(1, last)).c_str(),
                fmt17(traj.states(2, last)).c_str());
    return 0;
}

void print_equilibrium(std::FILE* f, const Equilibrium& e, Stability stability,
                       const std::vector<std::complex<double>>& eigs,
                       const std::string& condition_note) {
    std::fprintf(f, "%s:\n", to_string(e.kind));
    std::fprintf(f, "  point       = (%s, %s, %s)\n", fmt17(e.point[0]).c_str(),
                 fmt17(e.point[1]).c_str(), fmt17(e.point[2]).c_str());
    std::fprintf(f, "  feasible    = %s%s\n", e.feasible ? "yes" : "no",
                 e.degenerate ? " (degenerate)" : "");
    if (!e.feasible) return;
    std::fprintf(f, "  stability   = %s\n", to_string(stability));
    if (!eigs.empty()) {
        std::string eig_line;
        for (const auto& ev : eigs) {
            if (!eig_line.empty()) eig_line += ", ";
            eig_line += complex_str(ev);
        }
        std::fprintf(f, "  eigenvalues = %s\n", eig_line.c_str());
    }
    if (!condition_note.empty()) std::fprintf(f, "  condition   = %s\n", condition_note.c_str());
}

int cmd_equilibria(const CliArgs& args) {
    const RunConfig cfg = effective_config(args);
    const fs::path dir = prepare_out_dir(args);
    const auto boundary = boundary_equilibria(cfg.model);
    const auto coexistence = solve_coexistence(cfg.model);

    const fs::path txt_path = dir / "equilibria.txt";
    std::FILE* f = std::fopen(txt_path.string().c_str(), "w");
    if (!f) throw std::runtime_error("cannot open output file: " + txt_path.string());

    std::ofstream csv((dir / "equilibria.csv").string());
    if (!csv) throw std::runtime_error("cannot open output file: equilibria.csv");
    csv << "kind,x,y,z,feasible,stability\n";

    for (const auto& e : boundary) {
        std::vector<std::complex<double>> eigs;
        std::string note;
        Stability stability = e.stability;  // E0: switching terms have no Jacobian there
        if (e.feasible && e.kind != EquilibriumKind::E0) {
            const auto report = boundary_stability(cfg.model, e);
            stability = report.classification;
            eigs.assign(report.eigenvalues.data(), report.eigenvalues.data() + 3);
            note = report.condition + (report.condition_holds ? "  [holds]" : "  [fails]");
        }
        print_equilibrium(f, e, stability, eigs, note);
        csv << to_string(e.kind) << ',' << fmt17(e.point[0]) << ',' << fmt17(e.point[1]) << ','
            << fmt17(e.point[2]) << ',' << (e.feasible ? "yes" : "no") << ','
            << (e.feasible ? to_string(stability) : "not-assessed") << '\n';
    }

    Manifest m = base_manifest("equilibria", args, cfg);
    m.section("outputs");
    m.put("report", "equilibria.txt");
    m.put("table", "equilibria.csv");

    if (coexistence) {
        const auto rh = routh_hurwitz(cfg.model, coexistence->point);
        const auto spectrum = equilibrium_spectrum(cfg.model, coexistence->point);
        const std::vector<std::complex<double>> eigs(spectrum.data(), spectrum.data() + 3);
        print_equilibrium(f, *coexistence, coexistence->stability, eigs, "");
        std::fprintf(f, "  sigma1      = %s\n", fmt17(rh.sigma1).c_str());
        std::fprintf(f, "  sigma2      = %s\n", fmt17(rh.sigma2).c_str());
        std::fprintf(f, "  sigma3      = %s\n", fmt17(rh.sigma3).c_str());
        std::fprintf(f, "  s1*s2 - s3  = %s\n", fmt17(rh.sigma1 * rh.sigma2 - rh.sigma3).c_str());
        std::fprintf(f, "  hurwitz     = %s\n", rh.hurwitz ? "satisfied" : "violated");
        csv << "E4," << fmt17(coexistence->point[0]) << ',' << fmt17(coexistence->point[1]) << ','
            << fmt17(coexistence->point[2]) << ",yes," << to_string(coexistence->stability)
            << '\n';
        m.section("coexistence");
        m.put("found", "yes");
        m.put("x", coexistence->point[0]);
        m.put("y", coexistence->point[1]);
        m.put("z", coexistence->point[2]);
        m.put("sigma1", rh.sigma1);
        m.put("sigma2", rh.sigma2);
        m.put("sigma3", rh.sigma3);
        std::printf("equilibria: E4 = (%s, %s, %s), %s\n", fmt17(coexistence->point[0]).c_str(),
                    fmt17(coexistence->point[1]).c_str(), fmt17(coexistence->point[2]).c_str(),
                    to_string(coexistence->stability));
    } else {
        std::fprintf(f, "E4:\n  not found (no feasible coexistence equilibrium)\n");
        m.section("coexistence");
        m.put("found", "no");
        std::printf("equilibria: no feasible coexistence equilibrium\n");
    }
    std::fclose(f);
    if (!csv) throw std::runtime_error("write failed: equilibria.csv");
    m.write((dir / "equilibria_manifest.txt").string());
    return 0;
}

int cmd_silnikov(const CliArgs& args) {
    const RunConfig cfg = effective_config(args);
    const fs::path dir = prepare_out_dir(args);
    const auto coexistence = solve_coexistence(cfg.model);

    const fs::path txt_path = dir / "silnikov.txt";
    std::FILE* f = std::fopen(txt_path.string().c_str(), "w");
    if (!f) throw std::runtime_error("cannot open output file: " + txt_path.string());

    Manifest m = base_manifest("silnikov", args, cfg);
    m.section("outputs");
    m.put("report", "silnikov.txt");

    if (!coexistence) {
        std::fprintf(f, "no coexistence equilibrium\n");
        std::fclose(f);
        m.section("result");
        m.put("coexistence", "not found");
        m.write((dir / "silnikov_manifest.txt").string());
        std::printf("silnikov: no coexistence equilibrium\n");
        return 0;
    }

    const auto rh = routh_hurwitz(cfg.model, coexistence->point);
    const auto an = cardano_roots(rh.sigma1, rh.sigma2, rh.sigma3);
    const auto verdict = silnikov_check(an);

    std::fprintf(f, "coexistence point = (%s, %s, %s)\n", fmt17(coexistence->point[0]).c_str(),
                 fmt17(coexistence->point[1]).c_str(), fmt17(coexistence->point[2]).c_str());
    std::fprintf(f, "sigma             = (%s, %s, %s)\n", fmt17(rh.sigma1).c_str(),
                 fmt17(rh.sigma2).c_str(), fmt17(rh.sigma3).c_str());
    std::fprintf(f, "A1, A2, A3        = %s, %s, %s\n", fmt17(an.A1).c_str(),
                 fmt17(an.A2).c_str(), fmt17(an.A3).c_str());
    std::fprintf(f, "H, G              = %s, %s\n", fmt17(an.H).c_str(), fmt17(an.G).c_str());
    std::fprintf(f, "Delta             = %s\n", fmt17(an.Delta).c_str());
    std::fprintf(f, "R + H/R           = %s\n", fmt17(verdict.r_plus_hr).c_str());
    std::fprintf(f, "R - H/R + 2 A1    = %s\n", fmt17(verdict.sign_branch).c_str());
    std::fprintf(f, "magnitude gap     = %s\n", fmt17(verdict.magnitude_gap).c_str());
    for (const auto& r : an.roots)
        std::fprintf(f, "root              = %s\n", complex_str(r).c_str());
    std::fprintf(f, "saddle-focus form : real %s, pair %s +- %si\n", fmt17(verdict.gamma).c_str(),
                 fmt17(verdict.alpha).c_str(), fmt17(verdict.beta).c_str());
    std::fprintf(f, "expression branch : %s\n", verdict.expression_chaotic ? "chaotic" : "non-chaotic");
    std::fprintf(f, "eigenvalue branch : %s\n", verdict.chaotic ? "chaotic" : "non-chaotic");
    std::fprintf(f, "forms agree       : %s\n", verdict.forms_agree ? "yes" : "no");
    std::fprintf(f, "verdict           : %s\n",
                 verdict.marginal ? "marginal" : (verdict.chaotic ? "chaotic" : "non-chaotic"));
    std::fclose(f);

    m.section("result");
    m.put("delta", an.Delta);
    m.put("r_plus_hr", verdict.r_plus_hr);
    m.put("magnitude_gap", verdict.magnitude_gap);
    m.put("sign_branch", verdict.sign_branch);
    m.put("verdict", verdict.marginal ? "marginal" : (verdict.chaotic ? "chaotic" : "non-chaotic"));
    m.write((dir / "silnikov_manifest.txt").string());

    std::printf("silnikov: Delta = %s, R+H/R = %s, gap = %s, sign branch = %s => %s\n",
                fmt17(an.Delta).c_str(), fmt17(verdict.r_plus_hr).c_str(),
                fmt17(verdict.magnitude_gap).c_str(), fmt17(verdict.sign_branch).c_str(),
                verdict.marginal ? "marginal" : (verdict.chaotic ? "chaotic" : "non-chaotic"));
    return 0;
}

int cmd_sweep(const CliArgs& args) {
    const RunConfig cfg = effective_config(args);
    const fs::path dir = prepare_out_dir(args);
    const SweepSpec spec = to_sweep_spec(cfg);
    const auto records = sweep(spec, args.jobs);
    write_sweep_extrema_csv((dir / "sweep_extrema.csv").string(), spec.parameter, records);
    write_sweep_summary_csv((dir / "sweep_summary.csv").string(), spec.parameter, records);

    ThresholdInterval threshold;
    if (cfg.sweep.refine) threshold = locate_threshold(spec, records);

    Manifest m = base_manifest("sweep", args, cfg);
    m.section("sweep");
    m.put("parameter", spec.parameter);
    m.put("from", cfg.sweep.from);
    m.put("to", cfg.sweep.to);
    m.put("step", cfg.sweep.step);
    m.put("grid_points", static_cast<long long>(spec.grid.size()));
    m.put("transient", spec.transient);
    m.put("sample", spec.sample);
    m.put("lle_threshold", spec.lle_threshold);
    m.put("refine", cfg.sweep.refine ? "true" : "false");
    m.put("jobs", args.jobs);
    m.section("outputs");
    m.put("extrema", "sweep_extrema.csv");
    m.put("summary", "sweep_summary.csv");
    m.section("result");
    int failures = 0;
    for (const auto& r : records) failures += r.failed ? 1 : 0;
    m.put("failed_points", failures);
    if (cfg.sweep.refine) {
        m.put("threshold_found", threshold.found ? "yes" : "no");
        if (threshold.found) {
            m.put("threshold_lower", threshold.lower);
            m.put("threshold_upper", threshold.upper);
        }
    }
    m.write((dir / "sweep_manifest.txt").string());

    if (cfg.sweep.refine && threshold.found)
        std::printf("sweep: %zu points; chaotic->non-chaotic threshold in [%s, %s]\n",
                    records.size(), fmt17(threshold.lower).c_str(),
                    fmt17(threshold.upper).c_str());
    else if (cfg.sweep.refine)
        std::printf("sweep: %zu points; no chaotic->non-chaotic threshold in range\n",
                    records.size());
    else
        std::printf("sweep: %zu points\n", records.size());
    return 0;
}

int cmd_lyapunov(const CliArgs& args) {
    const RunConfig cfg = effective_config(args);
    const fs::path dir = prepare_out_dir(args);
    const double transient = cfg.lyapunov.transient_fraction * cfg.lyapunov.total_time;
    const double lle =
        largest_lyapunov(cfg.model, cfg.initial, cfg.lyapunov.total_time, cfg.solver, transient);

    Manifest m = base_manifest("lyapunov", args, cfg);
    m.section("lyapunov");
    m.put("total_time", cfg.lyapunov.total_time);
    m.put("transient_fraction", cfg.lyapunov.transient_fraction);
    m.section("result");
    m.put("lle", lle);
    m.write((dir / "lyapunov_manifest.txt").string());

    const fs::path txt_path = dir / "lyapunov.txt";
    std::FILE* f = std::fopen(txt_path.string().c_str(), "w");
    if (!f) throw std::runtime_error("cannot open output file: " + txt_path.string());
    std::fprintf(f, "largest lyapunov exponent = %s\n", fmt17(lle).c_str());
    std::fclose(f);

    std::printf("lyapunov: lle = %s over t = %s\n", fmt17(lle).c_str(),
                fmt17(cfg.lyapunov.total_time).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-species predation model with feeding switching: simulation and analysis"};
    app.require_subcommand(1);
    app.fallthrough();

    CliArgs args;
    app.add_option("--config", args.config_path, "Config file (INI-style sections)");
    app.add_option("--set", args.overrides, "Override a config entry, key=value or section.key=value")
        ->take_all();
    app.add_option("--out", args.out_dir, "Output directory (created if missing)");
    app.add_option("--jobs", args.jobs, "Worker threads for sweeps")
        ->check(CLI::PositiveNumber);

    auto* sim = app.add_subcommand("simulate", "Integrate one trajectory and write it as CSV");
    auto* equ = app.add_subcommand("equilibria", "Report equilibria, feasibility and stability");
    auto* sil = app.add_subcommand("silnikov", "Evaluate the saddle-focus chaos certificate");
    auto* swp = app.add_subcommand("sweep", "Parameter sweep: extrema, Lyapunov exponents, verdicts");
    auto* lya = app.add_subcommand("lyapunov", "Estimate the largest Lyapunov exponent");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) return cmd_simulate(args);
        if (equ->parsed()) return cmd_equilibria(args);
        if (sil->parsed()) return cmd_silnikov(args);
        if (swp->parsed()) return cmd_sweep(args);
        if (lya->parsed()) return cmd_lyapunov(args);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
