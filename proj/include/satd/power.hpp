#pragma once

#include "satd/circuit.hpp"
#include "satd/pulsegen.hpp"

namespace satd {

// Time-averaged RMS gap of the SATD pulse, rad/ns.
double omega_rms(double t_g, double omega0);

struct OmegaOptimum {
    double omega0;        // rad/ns
    double omega_rms;     // rad/ns
    double scaled_omega0; // omega0 t_g / 2pi
    double scaled_rms;    // omega_rms t_g / 2pi
};
OmegaOptimum optimize_omega0(double t_g);

// Direct quadrature of V(t)^2 over the signal window (>= samples_per_period points per shortest carrier period).
double v_rms(const DriveSignal& s, int samples_per_period = 40);

// Carrier cross-terms averaged out.
double v_rms_closed_form(const TripodAssignment& trip, double alpha, double omega_rms);
double v_rms_direct_closed_form(cplx n01, double chi, double t_g);

inline double qsl_bound(double t_g) { return two_pi / t_g; }
// Double-swap: two resonant pi pulses at gap Omega take 2pi/Omega each, so Omega_RMS t_g = 4pi.
// Hybrid (one swap + one 2pi rotation on the bright transition) gives the same total area.
inline constexpr double reference_cost_scaled = 4.0 * pi;
inline double reference_cost(double t_g) { return reference_cost_scaled / t_g; }

struct DdSatdComparison {
    double c_dd;    // V_RMS,DD * t_g
    double c_satd;  // V_RMS,SATD * t_g at the power-optimal omega0
    double ratio;   // c_dd / c_satd = t_g,DD / t_g,SATD at equal V_RMS
};
DdSatdComparison compare_dd_satd(const SpectrumData& s, const TripodAssignment& trip, double alpha, double chi);

// Shortest gate time whose closed-form V_RMS (= c / t_g) stays within g sqrt(2 n_cav_max).
double photon_constrained_min_tg(double g, double n_cav_max, double c_vrms_tg);

struct PowerReport {
    double omega_rms = 0, v_rms = 0, v_rms_formula = 0, qsl_bound = 0, reference_cost = 0;
};

}  // namespace satd
