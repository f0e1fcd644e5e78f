#pragma once

#include <array>
#include <vector>

#include "satd/circuit.hpp"
#include "satd/pulsegen.hpp"

namespace satd {

using Mat2 = Eigen::Matrix2cd;

struct GateTarget {
    Mat2 u_g01;
    Eigen::Vector3d n_vec;
    double alpha = 0, beta = 0, gamma0 = 0;
};

// Qubit basis (|0>, |1>), sigma_z = |0><0| - |1><1|.
GateTarget target_unitary(double alpha, double beta, double gamma0);

// diag(exp(-i phase_0), exp(-i phase_1)) with phase_k = integral of eps_k(t) over the window.
Mat2 frame_unitary(double phase0, double phase1);
// eps_k from the spectrum, plus the Stark table integral when `chirp` is given.
Mat2 frame_unitary(const SpectrumData& s, int i0, int i1, double t_window, const StarkShiftTable* chirp = nullptr);

struct FidelityReport {
    double fbar = 0, error = 1, leakage = 0;
    std::array<double, 6> overlaps{};
};

// Finals ordered as axial_states(): +x, -x, +y, -y, +z, -z.
FidelityReport averaged_fidelity(const std::vector<CMat>& finals, const GateTarget& target, const Mat2& frame, int i0,
                                 int i1, const std::vector<int>& tripod = {});

double leakage(const std::vector<CMat>& finals, const std::vector<int>& tripod);

}  // namespace satd
