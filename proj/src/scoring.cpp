#include "satd/scoring.hpp"

#include <algorithm>
#include <cmath>

namespace satd {

GateTarget target_unitary(double alpha, double beta, double gamma0) {
    GateTarget g;
    g.alpha = alpha;
    g.beta = beta;
    g.gamma0 = gamma0;
    g.n_vec = {std::sin(2 * alpha) * std::cos(beta), std::sin(2 * alpha) * std::sin(beta), std::cos(2 * alpha)};
    Mat2 ns;
    ns << g.n_vec.z(), cplx(g.n_vec.x(), -g.n_vec.y()), cplx(g.n_vec.x(), g.n_vec.y()), -g.n_vec.z();
    const double h = 0.5 * gamma0;
    g.u_g01 = std::polar(1.0, -h) * (std::cos(h) * Mat2::Identity() - I * std::sin(h) * ns);
    return g;
}

Mat2 frame_unitary(double phase0, double phase1) {
    Mat2 u = Mat2::Zero();
    u(0, 0) = std::polar(1.0, -phase0);
    u(1, 1) = std::polar(1.0, -phase1);
    return u;
}

Mat2 frame_unitary(const SpectrumData& s, int i0, int i1, double t_window, const StarkShiftTable* chirp) {
    double p0 = s.energies[i0] * t_window, p1 = s.energies[i1] * t_window;
    if (chirp) {
        p0 += chirp->integral(i0);
        p1 += chirp->integral(i1);
    }
    return frame_unitary(p0, p1);
}

FidelityReport averaged_fidelity(const std::vector<CMat>& finals, const GateTarget& target, const Mat2& frame, int i0,
                                 int i1, const std::vector<int>& tripod) {
    if (finals.size() != 6) throw Error("scoring", "need six final states");
    const Mat2 uq = frame * target.u_g01;
    const double r = 1.0 / std::sqrt(2.0);
    const std::array<Eigen::Vector2cd, 6> in{Eigen::Vector2cd(r, r),          Eigen::Vector2cd(r, -r),
                                             Eigen::Vector2cd(r, cplx(0, r)), Eigen::Vector2cd(r, cplx(0, -r)),
                                             Eigen::Vector2cd(1, 0),          Eigen::Vector2cd(0, 1)};
    FidelityReport rep;
    double acc = 0.0;
    for (int m = 0; m < 6; ++m) {
        const CMat& rho = finals[m];
        if (std::abs(rho.trace() - 1.0) > 1e-6) throw Error("scoring", "final state trace deviates from 1");
        const Eigen::Vector2cd psi = uq * in[m];
        Mat2 blk;
        blk << rho(i0, i0), rho(i0, i1), rho(i1, i0), rho(i1, i1);
        rep.overlaps[m] = std::real(psi.dot(blk * psi));
        acc += rep.overlaps[m];
    }
    rep.fbar = std::clamp(acc / 6.0, 0.0, 1.0);
    rep.error = 1.0 - rep.fbar;
    if (!tripod.empty()) rep.leakage = leakage(finals, tripod);
    return rep;
}

double leakage(const std::vector<CMat>& finals, const std::vector<int>& tripod) {
    double inside = 0.0;
    for (const CMat& rho : finals)
        for (int k : tripod) inside += std::real(rho(k, k));
    return std::clamp(1.0 - inside / double(finals.size()), 0.0, 1.0);
}

}  // namespace satd
