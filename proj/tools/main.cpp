#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "delaystab/analysis.hpp"
#include "delaystab/constants.hpp"
#include "delaystab/scenario.hpp"

namespace {

using namespace delaystab;

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

int cmd_run(const std::string& config_path, const std::string& output_dir) {
    const ScenarioConfig cfg = load_config(config_path);
    std::filesystem::create_directories(output_dir);
    const RunOutput out = run_scenario(cfg);
    write_trace_csv(out.result.trace, join_path(output_dir, "trace.csv"));
    write_report_json(cfg, out, join_path(output_dir, "report.json"));
    const auto& trace = out.result.trace;
    std::printf("steps: %zu  E(0)=%.6g  E(T)=%.6g", trace.size() - 1, trace[0].e.e_total,
                trace[trace.size() - 1].e.e_total);
    if (out.decay) {
        std::printf("  mu_hat=%.6g", out.decay->mu_hat);
    }
    std::printf("\n");
    return kExitOk;
}

void print_constants(const decay::DecayConstants& dc) {
    std::printf("C0        = %.12g\n", dc.c_zero);
    std::printf("K         = %.12g\n", dc.big_k);
    std::printf("mu_tilde  = %.12g\n", dc.mu_tilde);
    std::printf("mu        = %.12g\n", dc.mu_effective);
    std::printf("stable    = %s\n", dc.stable ? "true" : "false");
}

int cmd_constants(double c, double T, double xi, double c2) {
    print_constants(decay::compute_decay_constants(c, T, xi, c2));
    return kExitOk;
}

int cmd_beta(double c, double T, double xi) {
    const double beta = decay::beta_threshold(c, T, xi);
    const double c0 = decay::c_zero(c, T, xi, beta);
    const double residual = 2.0 * xi * beta * beta * T - decay::h(c0);
    std::printf("beta      = %.12g\n", beta);
    std::printf("residual  = %.3g\n", residual);
    print_constants(decay::compute_decay_constants(c, T, xi, beta));
    return kExitOk;
}

int cmd_observability(const std::string& config_path, double T, int samples,
                      std::uint64_t seed) {
    const ScenarioConfig cfg = load_config(config_path);
    const SemiDiscreteSystem sys = build_system(cfg, /*zero_b2=*/true);
    const ObservabilityEstimate est = estimate_observability(sys, T, samples, seed);
    std::printf("c_hat     = %.12g\n", est.c_hat);
    std::printf("T         = %.12g\n", est.t_horizon);
    std::printf("samples   = %d\n", est.n_samples);
    std::printf("note: finite-ensemble estimate, a lower bound of the true constant;\n");
    std::printf("      a beta computed from it may be optimistic.\n");
    return kExitOk;
}

int cmd_spectrum(const std::string& config_path, int n_rho_override,
                 const std::string& out_path) {
    const ScenarioConfig cfg = load_config(config_path);
    const SemiDiscreteSystem sys = build_system(cfg);
    const int n_rho = n_rho_override > 0 ? n_rho_override : cfg.n_rho;
    const Eigen::MatrixXd gen = assemble_generator(sys, n_rho);
    const SpectralReport report = spectral_abscissa(gen, n_rho);
    std::printf("dimension = %td\n", static_cast<std::ptrdiff_t>(gen.rows()));
    std::printf("n_rho     = %d\n", report.n_rho);
    std::printf("abscissa  = %.12g\n", report.abscissa);
    if (!out_path.empty()) {
        std::ofstream file(out_path);
        if (!file) throw std::runtime_error("cannot write " + out_path);
        file << "re,im\n";
        for (const auto& ev : report.eigenvalues) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", ev.real(), ev.imag());
            file << buf;
        }
    }
    return kExitOk;
}

int cmd_fit(const std::string& trace_path, double from, double to) {
    const EnergyTrace trace = read_trace_csv(trace_path);
    const double t_end = trace[trace.size() - 1].t;
    const double w0 = from >= 0.0 ? from : trace[0].t;
    const double w1 = to > 0.0 ? to : t_end;
    const DecayEstimate est = fit_decay(trace, w0, w1);
    std::printf("mu_hat    = %.12g\n", est.mu_hat);
    std::printf("k_hat     = %.12g\n", est.k_hat);
    std::printf("r_squared = %.6g\n", est.r_squared);
    std::printf("points    = %zu\n", est.n_points);
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& parameter,
              const std::vector<double>& grid, const std::string& output_dir) {
    const ScenarioConfig cfg = load_config(config_path);
    const std::vector<SweepRow> rows = run_sweep(cfg, parameter, grid);
    std::filesystem::create_directories(output_dir);
    write_sweep_csv(rows, join_path(output_dir, "sweep.csv"));
    std::printf("sweep rows: %zu\n", rows.size());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability laboratory for second-order systems with delayed damping"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir = ".";
    std::string trace_path;
    std::string out_path;
    std::string parameter;
    std::vector<double> grid;
    double c = 1.0, T = 2.0, xi = 2.0, c2 = 0.0;
    double from = -1.0, to = -1.0;
    int samples = 32;
    int n_rho = 0;
    std::uint64_t seed = 1;

    auto* run = app.add_subcommand("run", "simulate a scenario and write trace/report");
    run->add_option("--config", config_path, "scenario config (JSON)")->required();
    run->add_option("--output", output_dir, "output directory");

    auto* constants = app.add_subcommand("constants", "decay constants for given inputs");
    constants->add_option("--c", c, "observability constant")->required();
    constants->add_option("--T", T, "horizon T > max(T_obs, tau)")->required();
    constants->add_option("--xi", xi, "energy weight, > 1")->required();
    constants->add_option("--C2", c2, "delay feedback norm")->required();

    auto* beta = app.add_subcommand("beta", "small-gain threshold for ||B2||");
    beta->add_option("--c", c, "observability constant")->required();
    beta->add_option("--T", T, "horizon")->required();
    beta->add_option("--xi", xi, "energy weight, > 1")->required();

    auto* obs = app.add_subcommand("observability", "ensemble observability estimate");
    obs->add_option("--config", config_path, "scenario config (b2 is zeroed)")->required();
    obs->add_option("--T", T, "horizon")->required();
    obs->add_option("--samples", samples, "ensemble size");
    obs->add_option("--seed", seed, "PRNG seed");

    auto* spectrum = app.add_subcommand("spectrum", "generator spectrum and abscissa");
    spectrum->add_option("--config", config_path, "scenario config")->required();
    spectrum->add_option("--n-rho", n_rho, "delay cells in the generator");
    spectrum->add_option("--out", out_path, "eigenvalue CSV path");

    auto* fit = app.add_subcommand("fit", "decay-rate fit of a trace file");
    fit->add_option("--trace", trace_path, "trace.csv")->required();
    fit->add_option("--from", from, "window start");
    fit->add_option("--to", to, "window end");

    auto* sweep = app.add_subcommand("sweep", "parameter sweep");
    sweep->add_option("--config", config_path, "scenario config")->required();
    sweep->add_option("--param", parameter, "c2 | tau | xi | dt")->required();
    sweep->add_option("--grid", grid, "grid values")->required()->delimiter(',');
    sweep->add_option("--output", output_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, output_dir);
        if (constants->parsed()) return cmd_constants(c, T, xi, c2);
        if (beta->parsed()) return cmd_beta(c, T, xi);
        if (obs->parsed()) return cmd_observability(config_path, T, samples, seed);
        if (spectrum->parsed()) return cmd_spectrum(config_path, n_rho, out_path);
        if (fit->parsed()) return cmd_fit(trace_path, from, to);
        if (sweep->parsed()) return cmd_sweep(config_path, parameter, grid, output_dir);
    } catch (const delaystab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return delaystab::kExitConfigError;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return delaystab::kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return delaystab::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return delaystab::kExitNumericalError;
    }
    return delaystab::kExitOk;
}
