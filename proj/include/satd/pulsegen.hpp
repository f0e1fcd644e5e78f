#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "satd/circuit.hpp"
#include "satd/common.hpp"

namespace satd {

enum class Protocol { Adiabatic, Satd };

struct GateParams {
    double alpha = pi / 4;
    double beta = 0.0;
    double gamma0 = pi;
    double omega0 = 0.0;  // rad/ns
    double t_g = 100.0;   // ns
    double t_ramp = 1.0;  // ns
    Protocol protocol = Protocol::Satd;
    bool chirped = false;

    void validate() const;
    double t_total() const { return t_g + 2.0 * t_ramp; }
};

struct ThetaSchedule {
    double theta, dtheta, ddtheta;
};

// Quintic smoothstep P on s in [0,1] with derivatives.
struct Smoothstep {
    double p, dp, ddp;
};
Smoothstep smoothstep(double s);

ThetaSchedule schedule_theta(double t, double t_g);

using Envelopes = std::array<cplx, 3>;  // (0e, 1e, ae), rad/ns

// Interior-time envelopes, t in [0, t_g].
Envelopes adiabatic_envelopes(double t, const GateParams& p);
Envelopes satd_envelopes(double t, const GateParams& p);
// SATD envelopes rebuilt from the dressing transform with nu = arctan(2 thetadot / omega0).
Envelopes dressed_envelopes(double t, const GateParams& p);
Envelopes interior_envelopes(double t, const GateParams& p);

// Full-window envelopes over [0, t_g + 2 t_ramp] with smooth turn-on/off of the a-e tone.
std::function<Envelopes(double)> apply_ramps(const GateParams& p);

// Uniformly sampled accumulated phase with its derivative; cubic Hermite in between.
struct PhaseTable {
    double dt = 0.0;
    std::vector<double> phase;  // rad
    std::vector<double> rate;   // rad/ns
    bool empty() const { return phase.empty(); }
    double operator()(double t) const;
    double rate_at(double t) const;
};
PhaseTable integrate_phase(std::vector<double> rate, double dt);

struct ToneSpec {
    int lower, upper;
    double carrier;  // rad/ns
};

struct StarkTerm {
    int k, l, tone, sigma;
    double detuning;  // eps_k - eps_l + sigma*omega, rad/ns
};

// Second-order shifts delta eps_k = sum |V_j n_kl|^2 / (4 Delta) with resonant drive terms removed.
class StarkModel {
public:
    StarkModel(const SpectrumData& s, std::vector<int> levels, std::vector<ToneSpec> tones,
               double min_detuning = two_pi * 1e-3);
    std::vector<double> shifts(const std::vector<cplx>& v) const;
    const std::vector<int>& levels() const { return levels_; }
    const std::vector<StarkTerm>& ledger() const { return ledger_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    std::vector<int> levels_;
    RMat coef_;  // levels x tones
    std::vector<StarkTerm> ledger_;
    std::vector<std::string> warnings_;
};

struct StarkShiftTable {
    std::vector<int> levels;                 // spectrum indices
    double dt = 0.0;
    std::vector<std::vector<double>> shift;  // [level][sample], rad/ns
    std::vector<StarkTerm> ledger;
    std::vector<std::string> warnings;
    int samples() const { return shift.empty() ? 0 : int(shift[0].size()); }
    const std::vector<double>& of(int level) const;
    double integral(int level) const;  // trapezoid over the whole grid
};

StarkShiftTable stark_table(const StarkModel& model, const std::function<std::vector<cplx>(double)>& voltages,
                            double t_total, int samples);

struct Tone {
    ToneSpec spec;
    std::function<cplx(double)> envelope;  // voltage units (rad/ns per unit charge)
    PhaseTable chirp;                      // integral of the carrier correction
    double phase(double t) const { return spec.carrier * t + (chirp.empty() ? 0.0 : chirp(t)); }
    double inst_freq(double t) const { return spec.carrier + (chirp.empty() ? 0.0 : chirp.rate_at(t)); }
};

struct DriveSignal {
    std::vector<Tone> tones;
    double t_total = 0.0;
    double max_carrier() const;
};

double lab_voltage(const DriveSignal& s, double t);

// Tripod chirp: omega~_je = omega_je - d eps_j + d eps_e on each tone.
std::vector<PhaseTable> chirp_phases(const StarkShiftTable& table, const TripodAssignment& trip);

struct TripodPulse {
    GateParams params;
    std::function<Envelopes(double)> omega;  // ramped rabi envelopes
    DriveSignal signal;
    StarkShiftTable stark;                   // filled for every protocol (used by chirp and frame)
};

TripodPulse tripod_pulse(const SpectrumData& s, const TripodAssignment& trip, const GateParams& p,
                         int stark_samples = 2000, double min_detuning = two_pi * 1e-3);

struct DirectPulse {
    double chi = pi, t_g = 0.0;
    bool chirped = false;
    std::function<double(double)> omega;  // real rabi envelope
    DriveSignal signal;
    StarkShiftTable stark;
};

DirectPulse direct_drive_pulse(const SpectrumData& s, const TripodAssignment& trip, double chi, double t_g,
                               bool chirped, int stark_samples = 2000, double min_detuning = two_pi * 1e-3);

struct SpectrumPoint {
    double f_ghz, magnitude;
};
// Hann-windowed DFT of the sampled lab voltage on a chosen frequency grid.
std::vector<SpectrumPoint> voltage_spectrum(const DriveSignal& s, double f_min_ghz, double f_max_ghz, int nf,
                                            double dt);

}  // namespace satd
