#ifndef DELAYSTAB_SCENARIO_HPP
#define DELAYSTAB_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "delaystab/analysis.hpp"
#include "delaystab/integrator.hpp"
#include "delaystab/models.hpp"
#include "delaystab/system.hpp"

namespace delaystab {

// Exit codes shared by the CLI and its tests.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;

// Thrown for invalid configuration files or flags (exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ModelKind { WaveInterior, WaveBoundary, BeamHinged, BeamClamped };

struct InitSpec {
    enum class Type { Eigenmode, Random, File };
    Type type = Type::Eigenmode;
    int index = 1;              // 1-based eigenmode index
    std::uint64_t seed = 0;     // random
    std::string path;           // file
};

struct HistorySpec {
    enum class Type { Zero, MatchInitial, File };
    Type type = Type::Zero;
    std::string path;
};

struct ScenarioConfig {
    ModelKind model = ModelKind::WaveInterior;
    int n = 100;
    double length = 1.0;
    double tau = 1.0;
    double xi = 2.0;
    double dt = 1e-3;
    double t_final = 10.0;
    DampingProfile b1;  // interior models; `b` of the boundary model is b2
    DampingProfile b2;
    double k_coeff = 1.0;  // boundary model only
    DelayMechanism mechanism = DelayMechanism::Buffer;
    SystemMode mode = SystemMode::Plain;
    InitSpec init;
    HistorySpec f0;
    std::optional<std::pair<double, double>> fit_window;
    int n_rho = 32;
    std::optional<std::pair<double, double>> observability;  // (c, T) for sweeps

    nlohmann::ordered_json echo;  // the parsed document, for reports
};

ScenarioConfig parse_config(const nlohmann::ordered_json& doc);
ScenarioConfig load_config(const std::string& path);

// Builds the configured model (optionally forcing b2 = 0).
SemiDiscreteSystem build_system(const ScenarioConfig& cfg, bool zero_b2 = false);

// Initial state per the config's init spec; random data is normalized to
// E_S(0) = 1.
State build_initial_state(const ScenarioConfig& cfg, const SemiDiscreteSystem& sys);

// History samples per the config's f0 spec, oldest first.
std::vector<Eigen::VectorXd> build_history(const ScenarioConfig& cfg,
                                           const SemiDiscreteSystem& sys, const State& init);

struct RunOutput {
    SimulationResult result;
    std::optional<DecayEstimate> decay;
    std::string fit_error;  // set when the fit was not possible
};

RunOutput run_scenario(const ScenarioConfig& cfg);

// trace.csv with the normative header, every value at 17 significant digits.
void write_trace_csv(const EnergyTrace& trace, const std::string& path);
EnergyTrace read_trace_csv(const std::string& path);

// report.json: config echo, step count, energies, decay estimate.
void write_report_json(const ScenarioConfig& cfg, const RunOutput& out,
                       const std::string& path);

struct SweepRow {
    double value = 0.0;
    double mu_hat = 0.0;
    double abscissa = 0.0;
    std::optional<bool> small_gain;
    std::optional<double> eoc;
};

// One run per grid value of `parameter` (c2 | tau | xi | dt); rows in grid
// order, computed concurrently under the DELAYSTAB_THREADS cap. dt sweeps
// carry an observed-order column from consecutive final-energy triples.
std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const std::string& parameter,
                                const std::vector<double>& grid);

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace delaystab

#endif  // DELAYSTAB_SCENARIO_HPP
