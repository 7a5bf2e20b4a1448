#include "delaystab/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>

#include "delaystab/constants.hpp"
#include "delaystab/rng.hpp"

namespace delaystab {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

ModelKind parse_model(const std::string& name) {
    if (name == "wave1d-interior") return ModelKind::WaveInterior;
    if (name == "wave1d-boundary") return ModelKind::WaveBoundary;
    if (name == "beam1d-hinged") return ModelKind::BeamHinged;
    if (name == "beam1d-clamped") return ModelKind::BeamClamped;
    throw ConfigError("unknown model: " + name);
}

DampingProfile parse_profile(const nlohmann::ordered_json& doc, const std::string& key) {
    const auto& node = doc.at(key);
    const std::string kind = node.at("kind").get<std::string>();
    if (kind == "constant") {
        return DampingProfile::constant(node.at("value").get<double>());
    }
    if (kind == "indicator") {
        return DampingProfile::indicator(node.at("value").get<double>(),
                                         node.at("from").get<double>(),
                                         node.at("to").get<double>());
    }
    if (kind == "samples") {
        return DampingProfile::from_samples(node.at("values").get<std::vector<double>>());
    }
    throw ConfigError("profile '" + key + "': unknown kind '" + kind + "'");
}

InitSpec parse_init(const nlohmann::ordered_json& node) {
    InitSpec spec;
    const std::string type = node.at("type").get<std::string>();
    if (type == "eigenmode") {
        spec.type = InitSpec::Type::Eigenmode;
        spec.index = node.at("index").get<int>();
        if (spec.index < 1) throw ConfigError("init: eigenmode index must be >= 1");
    } else if (type == "random") {
        spec.type = InitSpec::Type::Random;
        spec.seed = node.at("seed").get<std::uint64_t>();
    } else if (type == "file") {
        spec.type = InitSpec::Type::File;
        spec.path = node.at("path").get<std::string>();
    } else {
        throw ConfigError("init: unknown type '" + type + "'");
    }
    return spec;
}

HistorySpec parse_history(const nlohmann::ordered_json& node) {
    HistorySpec spec;
    const std::string type = node.at("type").get<std::string>();
    if (type == "zero") {
        spec.type = HistorySpec::Type::Zero;
    } else if (type == "match-initial") {
        spec.type = HistorySpec::Type::MatchInitial;
    } else if (type == "file") {
        spec.type = HistorySpec::Type::File;
        spec.path = node.at("path").get<std::string>();
    } else {
        throw ConfigError("f0: unknown type '" + type + "'");
    }
    return spec;
}

}  // namespace

ScenarioConfig parse_config(const nlohmann::ordered_json& doc) {
    try {
        ScenarioConfig cfg;
        cfg.echo = doc;
        cfg.model = parse_model(doc.at("model").get<std::string>());
        cfg.n = doc.at("n").get<int>();
        cfg.length = doc.at("length").get<double>();
        cfg.tau = doc.at("tau").get<double>();
        cfg.xi = doc.at("xi").get<double>();
        cfg.dt = doc.at("dt").get<double>();
        cfg.t_final = doc.at("t_final").get<double>();
        if (cfg.model == ModelKind::WaveBoundary) {
            cfg.k_coeff = doc.at("k").get<double>();
            cfg.b2 = parse_profile(doc, "b");
        } else {
            cfg.b1 = parse_profile(doc, "b1");
            cfg.b2 = parse_profile(doc, "b2");
        }
        if (doc.contains("mechanism")) {
            const std::string m = doc.at("mechanism").get<std::string>();
            if (m == "buffer") {
                cfg.mechanism = DelayMechanism::Buffer;
            } else if (m == "transport") {
                cfg.mechanism = DelayMechanism::Transport;
            } else {
                throw ConfigError("unknown mechanism: " + m);
            }
        }
        if (doc.contains("mode")) {
            const std::string m = doc.at("mode").get<std::string>();
            if (m == "plain") {
                cfg.mode = SystemMode::Plain;
            } else if (m == "auxiliary") {
                cfg.mode = SystemMode::Auxiliary;
            } else {
                throw ConfigError("unknown mode: " + m);
            }
        }
        cfg.init = parse_init(doc.at("init"));
        cfg.f0 = parse_history(doc.at("f0"));
        if (doc.contains("fit_window")) {
            const auto w = doc.at("fit_window").get<std::vector<double>>();
            if (w.size() != 2 || !(w[1] > w[0])) {
                throw ConfigError("fit_window must be [start, end] with end > start");
            }
            cfg.fit_window = std::make_pair(w[0], w[1]);
        }
        if (doc.contains("n_rho")) {
            cfg.n_rho = doc.at("n_rho").get<int>();
            if (cfg.n_rho < 2) throw ConfigError("n_rho must be >= 2");
        }
        if (doc.contains("observability")) {
            const auto& node = doc.at("observability");
            cfg.observability =
                std::make_pair(node.at("c").get<double>(), node.at("T").get<double>());
        }

        if (cfg.n < 3) throw ConfigError("n must be >= 3");
        if (!(cfg.length > 0.0)) throw ConfigError("length must be positive");
        if (!(cfg.tau > 0.0)) throw ConfigError("tau must be positive");
        if (!(cfg.xi > 1.0)) throw ConfigError("xi must exceed 1");
        if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
        if (!(cfg.t_final > 0.0)) throw ConfigError("t_final must be positive");
        const double ratio = cfg.tau / cfg.dt;
        if (std::abs(ratio - std::llround(ratio)) > 1e-9) {
            throw ConfigError("tau/dt must be an integer");
        }
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    nlohmann::ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse: ") + e.what());
    }
    return parse_config(doc);
}

SemiDiscreteSystem build_system(const ScenarioConfig& cfg, bool zero_b2) {
    const DampingProfile b2 = zero_b2 ? DampingProfile::constant(0.0) : cfg.b2;
    try {
        switch (cfg.model) {
            case ModelKind::WaveInterior:
                return build_wave1d_interior(cfg.n, cfg.length, cfg.b1, b2, cfg.tau, cfg.xi);
            case ModelKind::WaveBoundary:
                return build_wave1d_boundary(cfg.n, cfg.length, cfg.k_coeff, b2, cfg.tau,
                                             cfg.xi);
            case ModelKind::BeamHinged:
                return build_beam1d(cfg.n, cfg.length, BeamBC::Hinged, cfg.b1, b2, cfg.tau,
                                    cfg.xi);
            case ModelKind::BeamClamped:
                return build_beam1d(cfg.n, cfg.length, BeamBC::Clamped, cfg.b1, b2, cfg.tau,
                                    cfg.xi);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("invalid model");
}

State build_initial_state(const ScenarioConfig& cfg, const SemiDiscreteSystem& sys) {
    State st;
    st.t = 0.0;
    const int n = sys.n_dof();
    switch (cfg.init.type) {
        case InitSpec::Type::Eigenmode: {
            if (cfg.init.index > n) {
                throw ConfigError("init: eigenmode index exceeds n_dof");
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sys.stiffness());
            if (eig.info() != Eigen::Success) {
                throw std::runtime_error("init: eigendecomposition failed");
            }
            // Unit-L2 displacement mode (eigenvectors are Euclidean-normalized).
            st.u = eig.eigenvectors().col(cfg.init.index - 1);
            st.v = Eigen::VectorXd::Zero(n);
            break;
        }
        case InitSpec::Type::Random: {
            SplitMix64 rng(cfg.init.seed);
            st.u.resize(n);
            st.v.resize(n);
            for (int j = 0; j < n; ++j) st.u(j) = rng.symmetric();
            for (int j = 0; j < n; ++j) st.v(j) = rng.symmetric();
            const double e0 = standard_energy(sys, st);
            const double scale = 1.0 / std::sqrt(e0);
            st.u *= scale;
            st.v *= scale;
            break;
        }
        case InitSpec::Type::File: {
            std::ifstream in(cfg.init.path);
            if (!in) throw ConfigError("init: cannot open file " + cfg.init.path);
            nlohmann::json doc;
            try {
                in >> doc;
                const auto u = doc.at("u").get<std::vector<double>>();
                const auto v = doc.at("v").get<std::vector<double>>();
                if (u.size() != static_cast<std::size_t>(n) || v.size() != u.size()) {
                    throw ConfigError("init file: u/v must have length n_dof");
                }
                st.u = Eigen::Map<const Eigen::VectorXd>(u.data(), n);
                st.v = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(std::string("init file: ") + e.what());
            }
            break;
        }
    }
    return st;
}

std::vector<Eigen::VectorXd> build_history(const ScenarioConfig& cfg,
                                           const SemiDiscreteSystem& sys, const State& init) {
    const long long k = std::llround(cfg.tau / cfg.dt);
    const std::size_t capacity = static_cast<std::size_t>(k) + 1;
    switch (cfg.f0.type) {
        case HistorySpec::Type::Zero:
            return std::vector<Eigen::VectorXd>(capacity, Eigen::VectorXd::Zero(sys.m2()));
        case HistorySpec::Type::MatchInitial:
            return std::vector<Eigen::VectorXd>(capacity, sys.b2_trace(init.v));
        case HistorySpec::Type::File: {
            std::ifstream in(cfg.f0.path);
            if (!in) throw ConfigError("f0: cannot open file " + cfg.f0.path);
            nlohmann::json doc;
            try {
                in >> doc;
                const auto rows = doc.at("samples").get<std::vector<std::vector<double>>>();
                if (rows.size() != capacity) {
                    throw ConfigError("f0 file: need round(tau/dt)+1 samples");
                }
                std::vector<Eigen::VectorXd> out;
                out.reserve(rows.size());
                for (const auto& row : rows) {
                    if (row.size() != static_cast<std::size_t>(sys.m2())) {
                        throw ConfigError("f0 file: sample dimension must equal m2");
                    }
                    out.push_back(Eigen::Map<const Eigen::VectorXd>(
                        row.data(), static_cast<Eigen::Index>(row.size())));
                }
                return out;
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(std::string("f0 file: ") + e.what());
            }
        }
    }
    throw ConfigError("invalid f0 spec");
}

RunOutput run_scenario(const ScenarioConfig& cfg) {
    const SemiDiscreteSystem sys = build_system(cfg);
    const State init = build_initial_state(cfg, sys);
    const auto f0 = build_history(cfg, sys, init);

    SchemeParams params;
    params.dt = cfg.dt;
    params.mode = cfg.mode;

    RunOutput out{simulate(sys, init, f0, cfg.t_final, params, cfg.mechanism), {}, {}};

    double w0 = 0.25 * cfg.t_final;
    double w1 = cfg.t_final;
    if (cfg.fit_window) {
        w0 = cfg.fit_window->first;
        w1 = cfg.fit_window->second;
    }
    try {
        out.decay = fit_decay(out.result.trace, w0, w1);
    } catch (const std::invalid_argument& e) {
        out.fit_error = e.what();
    }
    return out;
}

void write_trace_csv(const EnergyTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write trace file: " + path);
    }
    out << "t,E,E_S,E_delay,P_b1,P_b2_now,P_b2_delayed\n";
    for (const auto& row : trace.rows()) {
        out << fmt17(row.t) << ',' << fmt17(row.e.e_total) << ',' << fmt17(row.e.e_standard)
            << ',' << fmt17(row.e.e_delay) << ',' << fmt17(row.e.p_b1) << ','
            << fmt17(row.e.p_b2_now) << ',' << fmt17(row.e.p_b2_delayed) << '\n';
    }
}

EnergyTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read trace file: " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,E,", 0) != 0) {
        throw std::runtime_error("trace file: unexpected header");
    }
    std::vector<std::array<double, 7>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<double, 7> vals{};
        std::stringstream ss(line);
        std::string cell;
        for (int c = 0; c < 7; ++c) {
            if (!std::getline(ss, cell, ',')) {
                throw std::runtime_error("trace file: short row");
            }
            vals[static_cast<std::size_t>(c)] = std::stod(cell);
        }
        rows.push_back(vals);
    }
    if (rows.size() < 2) {
        throw std::runtime_error("trace file: need at least two rows");
    }
    EnergyTrace trace(rows[1][0] - rows[0][0]);
    for (const auto& vals : rows) {
        EnergyBreakdown e;
        e.e_total = vals[1];
        e.e_standard = vals[2];
        e.e_delay = vals[3];
        e.p_b1 = vals[4];
        e.p_b2_now = vals[5];
        e.p_b2_delayed = vals[6];
        trace.append(vals[0], e);
    }
    return trace;
}

void write_report_json(const ScenarioConfig& cfg, const RunOutput& out,
                       const std::string& path) {
    nlohmann::ordered_json report;
    report["config"] = cfg.echo;
    report["n_steps"] = out.result.trace.size() - 1;
    const auto& first = out.result.trace[0];
    const auto& last = out.result.trace[out.result.trace.size() - 1];
    report["energy"] = {{"initial", first.e.e_total},
                        {"final", last.e.e_total},
                        {"ratio", last.e.e_total / first.e.e_total}};
    if (out.decay) {
        report["decay_estimate"] = {{"mu_hat", out.decay->mu_hat},
                                    {"k_hat", out.decay->k_hat},
                                    {"r_squared", out.decay->r_squared},
                                    {"window", {out.decay->window_start, out.decay->window_end}},
                                    {"n_points", out.decay->n_points}};
    } else {
        report["decay_estimate"] = nullptr;
        report["fit_error"] = out.fit_error;
    }
    std::ofstream file(path);
    if (!file) {
        throw std::runtime_error("cannot write report file: " + path);
    }
    file << report.dump(2) << '\n';
}

namespace {

ScenarioConfig with_parameter(const ScenarioConfig& base, const std::string& parameter,
                              double value) {
    ScenarioConfig cfg = base;
    if (parameter == "c2") {
        if (value < 0.0) throw ConfigError("sweep: c2 must be nonnegative");
        cfg.b2 = DampingProfile::constant(value * value);
    } else if (parameter == "tau") {
        cfg.tau = value;
    } else if (parameter == "xi") {
        cfg.xi = value;
    } else if (parameter == "dt") {
        cfg.dt = value;
    } else {
        throw ConfigError("sweep: unknown parameter '" + parameter + "'");
    }
    return cfg;
}

int env_thread_cap() {
    if (const char* env = std::getenv("DELAYSTAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const std::string& parameter,
                                const std::vector<double>& grid) {
    if (grid.empty()) {
        throw ConfigError("sweep: empty grid");
    }
    // Validate every row configuration up front so errors surface before the
    // (possibly long) runs start.
    std::vector<ScenarioConfig> rows_cfg;
    rows_cfg.reserve(grid.size());
    for (double value : grid) {
        ScenarioConfig row = with_parameter(cfg, parameter, value);
        const double ratio = row.tau / row.dt;
        if (std::abs(ratio - std::llround(ratio)) > 1e-9) {
            throw ConfigError("sweep: tau/dt must stay an integer at value " + fmt17(value));
        }
        rows_cfg.push_back(std::move(row));
    }

    std::vector<SweepRow> rows(grid.size());
    std::vector<double> final_energy(grid.size(), 0.0);
    std::vector<std::exception_ptr> errors(grid.size());

    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                const ScenarioConfig& row_cfg = rows_cfg[i];
                const SemiDiscreteSystem sys = build_system(row_cfg);
                RunOutput out = run_scenario(row_cfg);
                SweepRow row;
                row.value = grid[i];
                row.mu_hat = out.decay ? out.decay->mu_hat
                                       : std::numeric_limits<double>::quiet_NaN();
                const Eigen::MatrixXd gen = assemble_generator(sys, row_cfg.n_rho);
                row.abscissa = spectral_abscissa(gen, row_cfg.n_rho).abscissa;
                if (row_cfg.observability) {
                    const double c = row_cfg.observability->first;
                    const double T = row_cfg.observability->second;
                    const double c0 = decay::c_zero(c, T, row_cfg.xi, sys.b2_norm());
                    row.small_gain = decay::check_small_gain(row_cfg.xi, sys.b2_norm(), T, c0);
                }
                final_energy[i] =
                    out.result.trace[out.result.trace.size() - 1].e.e_total;
                rows[i] = std::move(row);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const int n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(env_thread_cap()), grid.size());
    if (n_threads <= 1) {
        worker(0, grid.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (grid.size() + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            const std::size_t begin = static_cast<std::size_t>(t) * chunk;
            const std::size_t end = std::min(grid.size(), begin + chunk);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }

    // Observed order from final-energy triples on refinement sweeps.
    if (parameter == "dt" && grid.size() >= 3) {
        for (std::size_t i = 0; i + 2 < grid.size(); ++i) {
            const double d1 = std::abs(final_energy[i] - final_energy[i + 1]);
            const double d2 = std::abs(final_energy[i + 1] - final_energy[i + 2]);
            const double r = grid[i] / grid[i + 1];
            if (d1 > 0.0 && d2 > 0.0 && r > 0.0 && r != 1.0) {
                rows[i].eoc = std::log(d1 / d2) / std::log(r);
            }
        }
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write sweep file: " + path);
    }
    out << "value,mu_hat,abscissa,small_gain,eoc\n";
    for (const auto& row : rows) {
        out << fmt17(row.value) << ',' << fmt17(row.mu_hat) << ',' << fmt17(row.abscissa)
            << ',';
        if (row.small_gain) {
            out << (*row.small_gain ? "true" : "false");
        }
        out << ',';
        if (row.eoc) {
            out << fmt17(*row.eoc);
        }
        out << '\n';
    }
}

}  // namespace delaystab
