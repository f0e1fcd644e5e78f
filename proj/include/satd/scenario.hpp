#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "satd/cavitylink.hpp"
#include "satd/circuit.hpp"
#include "satd/noisemodel.hpp"
#include "satd/power.hpp"
#include "satd/propagator.hpp"
#include "satd/scoring.hpp"

namespace satd {

inline constexpr const char* report_schema = "satd.report/1";

enum class ProtocolName { Adiabatic, Satd, SatdChirped, Direct, DirectChirped };

std::string to_string(ProtocolName p);
ProtocolName protocol_from_string(const std::string& s);
inline bool is_direct(ProtocolName p) { return p == ProtocolName::Direct || p == ProtocolName::DirectChirped; }
inline bool is_chirped(ProtocolName p) { return p == ProtocolName::SatdChirped || p == ProtocolName::DirectChirped; }

struct GateConfig {
    ProtocolName protocol = ProtocolName::SatdChirped;
    double alpha = pi / 4, beta = 0.0, gamma0 = pi;
    double chi = pi;  // direct-drive rotation angle
    double t_g = 100.0;
    std::optional<double> t_ramp;         // ns; default 0.01 t_g
    std::optional<double> omega0_scaled;  // omega0 t_g / 2pi; default power-optimal
};

struct SweepConfig {
    std::string axis;  // "t_g_ns", "omega0_scaled" or "v_rms"
    std::vector<double> values;
    bool compare_dd = false;
};

struct SolverConfig {
    std::optional<double> rel_tol;  // default 1e-10 closed / 1e-8 open
    double abs_tol = 1e-12;
    bool rwa = false;
    int samples = 401;
    int stark_samples = 2000;
    double min_detuning_mhz = 1.0;
};

struct OutputConfig {
    std::string dir = "out";
    bool csv = true;
    bool json = true;
};

struct Scenario {
    CircuitSpec circuit;
    int basis_size = 300;
    int levels = 18;
    std::array<int, 4> tripod{1, 0, 2, 5};
    GateConfig gate;
    std::optional<NoiseModel> noise;
    std::optional<CavitySpec> cavity;
    std::optional<SweepConfig> sweep;
    SolverConfig solver;
    OutputConfig outputs;
};

// Validation failures name the offending field path.
class ValidationError : public Error {
public:
    ValidationError(const std::string& path, const std::string& what) : Error("cli", path + ": " + what) {}
};

Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);
nlohmann::json to_json(const Scenario& s);

struct Prepared {
    std::shared_ptr<SpectrumData> spectrum;
    TripodAssignment trip;
};
// Diagonalization (plus dispersions when noise is present) shared by every point of a run.
Prepared prepare(const Scenario& s);

struct SimulationResult {
    ProtocolName protocol;
    double t_g = 0, t_total = 0, omega0 = 0;
    FidelityReport fidelity;
    PowerReport power;
    std::optional<double> n_cav;
    double max_trace_drift = 0, max_herm_drift = 0, min_eigenvalue = 0, max_norm_drift = 0;
    long steps = 0;
    std::vector<std::string> warnings;
};

SimulationResult simulate(const Scenario& s, const Prepared& prep, int workers = 1);
SimulationResult simulate(const Scenario& s, int workers = 1);
nlohmann::json to_json(const SimulationResult& r);

struct SweepRow {
    double axis_value;
    ProtocolName protocol;
    std::optional<SimulationResult> result;
    std::string status;  // "ok" or the error message
};

struct ComparisonRow {
    double v_rms, t_g_satd, t_g_dd, ratio;
    double error_satd, error_dd, zeta;
};

struct SweepOutput {
    std::vector<SweepRow> rows;
    std::vector<ComparisonRow> comparisons;
};

SweepOutput sweep_runner(const Scenario& s, int workers = 1);

// Closed-form V_RMS * t_g of a protocol, used to convert a V_RMS axis into gate times.
double vrms_constant(const Scenario& s, const Prepared& prep, ProtocolName p);

// "# config: {...}" line carried by every artifact.
std::string config_header(const Scenario& s);
Scenario parse_config_header(const std::string& line);

int run(const std::string& subcommand, const Scenario& s, int workers, const nlohmann::json& extra = {});

}  // namespace satd
