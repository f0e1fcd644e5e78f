#pragma once

#include <limits>
#include <string>
#include <vector>

#include "satd/circuit.hpp"
#include "satd/pulsegen.hpp"

namespace satd {

struct CavitySpec {
    double omega_cav = two_pi * 2.0;  // rad/ns
    double kappa = two_pi * 1e-5;     // rad/ns
    double g = two_pi * 0.25;         // rad/ns
    double n_th = 0.05;
    double n_cav_max = 0.05;

    void validate() const;
};

struct CavityDrive {
    double dt = 0.0;
    std::vector<double> t, v, u;
};

// u = -(1/(2 g w_c)) [d2/dt2 + kappa d/dt + w_c^2 + kappa^2/4] V, fourth-order finite differences.
CavityDrive cavity_drive(const DriveSignal& s, const CavitySpec& cav, double grid_dt);
CavityDrive cavity_drive(const std::vector<double>& v, double dt, const CavitySpec& cav);

inline double vrms_to_photons(double v_rms, double g) { return v_rms * v_rms / (2.0 * g * g); }
double photons_to_vrms(double n_cav, double g);

struct CavityTransition {
    int k, l;                // positions in the tripod (0, 1, a, e) = (0, 1, 2, 3)
    double t1_s;             // Purcell time, infinite when kappa = 0
    double detuning;         // rad/ns, the smaller of |w_kl -+ w_cav|
    double dispersive_ratio; // g |n_kl| / |Delta|
};

struct CavityCoherence {
    std::vector<CavityTransition> t1;
    double t2_s = std::numeric_limits<double>::infinity();
    std::vector<std::string> warnings;
};

CavityCoherence cavity_coherence_times(const SpectrumData& s, const TripodAssignment& trip, const CavitySpec& cav);

}  // namespace satd
