#pragma once

#include <optional>
#include <string>
#include <vector>

#include "satd/circuit.hpp"

namespace satd {

struct NoiseModel {
    double a_flux = 3e-6;                // Phi_0
    double d_factor = two_pi * 1e-5;     // measurement time x IR cutoff
    std::optional<double> q_diel = 1e6;
    double temperature = 0.0;            // k_B T, rad/ns
    int reference_level = 0;
    bool all_t1_channels = false;

    void validate() const;
};

// sqrt(rate) |to><from|
struct JumpOp {
    int from, to;
    double rate;  // 1/ns
};

struct DissipatorSet {
    RVec z;                      // diagonal of the dephasing operator, (rad/ns)^(1/2)
    RVec gamma;                  // Gamma_k, 1/ns
    std::vector<JumpOp> jumps;
    std::vector<std::string> ledger;

    bool empty() const;
    CMat z_matrix() const;
    std::vector<CMat> collapse_matrices(int n) const;
};

// Requires spectrum.flux_dispersion. Returns microseconds; nullopt when there is no dephasing.
std::optional<double> dephasing_time(const SpectrumData& s, const NoiseModel& m, int k, int l);

// Dephasing only: Gamma_ref = 0, Gamma_k = t_g / T_phi(k, ref)^2, signs from the relative dispersion.
DissipatorSet lindblad_rates(const SpectrumData& s, const NoiseModel& m, double t_g);

struct EffectiveDephasingRow {
    int k, l;
    std::optional<double> t_free_us;      // free-induction time of the pair
    std::optional<double> t_eff_us;       // tabulated convention, 1/T = (s_k/sqrt(T_k) - s_l/sqrt(T_l))^2
    std::optional<double> t_lindblad_us;  // Gaussian-equivalent time the surrogate actually produces at t_g
    std::string flag;                     // "overestimated", "underestimated" or "exact"
};
std::vector<EffectiveDephasingRow> effective_dephasing_table(const SpectrumData& s, const NoiseModel& m,
                                                             const std::vector<std::pair<int, int>>& pairs);

struct T1Channel {
    std::optional<double> t1_us;
    JumpOp op;
};
T1Channel t1_dielectric(const SpectrumData& s, const NoiseModel& m, int k, int l);

// Full set for a run: surrogate dephasing plus the dominant e -> 1 decay (or every downward channel).
DissipatorSet build_dissipators(const SpectrumData& s, const TripodAssignment& trip, const NoiseModel& m,
                                double t_window);

}  // namespace satd
