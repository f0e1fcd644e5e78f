#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "satd/common.hpp"

namespace satd {

// Fluxonium parameters in ordinary frequency units (GHz); flux in units of Phi_0.
struct CircuitSpec {
    double e_c_ghz = 2.0;
    double e_j_ghz = 9.19;
    double e_l_ghz = 0.063;
    double flux_phi0 = 0.17;

    void validate() const;
};

struct SpectrumData {
    int levels = 0;
    int basis_size = 0;
    RVec energies;        // rad/ns, ascending
    CMat charge_elems;    // <k|n|l>
    CMat phase_elems;     // <k|phi|l>
    RVec flux_dispersion; // d eps_k / d Phi_ext, rad/ns per Phi_0 (empty until computed)
    double convergence_residual = 0.0;  // max eigenvalue change (rad/ns) at basis + 50
    double e_c = 0.0;                   // charging energy, rad/ns
};

struct TripodAssignment {
    int idx0 = 1, idx1 = 0, idx_a = 2, idx_e = 5;
    std::array<double, 3> drive_freqs{};  // omega_0e, omega_1e, omega_ae (rad/ns)
    std::array<cplx, 3> n_je{};           // n_{0e}, n_{1e}, n_{ae}
    std::vector<std::string> diagnostics;

    int lower(int tone) const { return tone == 0 ? idx0 : (tone == 1 ? idx1 : idx_a); }
    std::array<int, 4> indices() const { return {idx0, idx1, idx_a, idx_e}; }
};

struct DiagonalizeOptions {
    int basis_size = 300;
    int levels = 18;
    bool certify = true;     // compare against basis_size + 50, double on failure
    int max_doublings = 2;
    double tol = 1e-9;       // rad/ns
};

// Low-level pieces, exposed for tests.
RMat cos_operator(int basis, double phi_zpf, double phi_ext);
RMat hamiltonian_ho_basis(const CircuitSpec& spec, int basis);

SpectrumData diagonalize(const CircuitSpec& spec, const DiagonalizeOptions& opt = {});
SpectrumData diagonalize(const CircuitSpec& spec, int basis_size, int levels);

// Central-difference dispersions of every retained level.
RVec flux_dispersions(const CircuitSpec& spec, int basis_size, int levels, double delta_flux = 1e-5);
double flux_dispersion(const CircuitSpec& spec, int level, double delta_flux = 1e-5,
                       int basis_size = 300, int levels = 18);

TripodAssignment assign_tripod(const SpectrumData& s, std::array<int, 4> indices);

struct ConvergenceRow {
    int basis_size;
    double max_change;  // rad/ns, relative to the previous row
};
std::vector<ConvergenceRow> convergence_sweep(const CircuitSpec& spec, int levels,
                                              const std::vector<int>& basis_sizes);

}  // namespace satd
