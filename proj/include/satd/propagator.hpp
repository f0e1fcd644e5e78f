#pragma once

#include <memory>
#include <vector>

#include "satd/noisemodel.hpp"
#include "satd/ode.hpp"
#include "satd/pulsegen.hpp"

namespace satd {

enum class Mode { ClosedLab, OpenLab, ClosedRwa, OpenRwa };

inline bool is_open(Mode m) { return m == Mode::OpenLab || m == Mode::OpenRwa; }
inline bool is_lab(Mode m) { return m == Mode::ClosedLab || m == Mode::OpenLab; }

// Ideal tripod in the basis (0, 1, a, e) = indices (0, 1, 2, 3).
struct RwaModel {
    std::function<Envelopes(double)> omega;
    double t_total = 0.0;
};

struct EvolutionSpec {
    Mode mode = Mode::ClosedLab;
    std::shared_ptr<const SpectrumData> spectrum;
    DriveSignal signal;
    RwaModel rwa;
    DissipatorSet dissipators;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0;  // 0 -> shortest carrier period / 20
    bool resonant_only = false;  // lab mode: keep only the co-rotating drive terms
    int samples = 401;

    void validate() const;
    int dim() const;
    double t_total() const;
    double effective_max_step() const;
};

EvolutionSpec lab_spec(std::shared_ptr<const SpectrumData> s, DriveSignal signal, bool open);
EvolutionSpec rwa_spec(std::function<Envelopes(double)> omega, double t_total);

struct Trajectory {
    bool open = false;
    std::vector<double> times;
    std::vector<CVec> states;  // closed
    std::vector<CMat> rhos;    // open
    CVec final_state;
    CMat final_rho;
    ode::Stats stats;
    double max_norm_drift = 0.0;
    double max_trace_drift = 0.0;
    double max_herm_drift = 0.0;
    double min_eigenvalue = 0.0;  // of the final density matrix (open)

    CMat final_density() const;
};

CMat hamiltonian_at(const EvolutionSpec& spec, double t);

Trajectory propagate(const EvolutionSpec& spec, const CVec& psi0);
Trajectory propagate(const EvolutionSpec& spec, const CMat& rho0);

// +x, -x, +y, -y, +z, -z qubit states embedded at levels (i0, i1); |+z> = |i0>.
std::vector<CMat> axial_states(int dim, int i0, int i1);

struct SixAxialResult {
    std::vector<CMat> finals;
    std::vector<Trajectory> trajectories;
};
SixAxialResult propagate_six_axial(const EvolutionSpec& spec, int i0, int i1, int workers = 1,
                                   bool keep_trajectories = false);

}  // namespace satd
