#include "satd/circuit.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace satd {

namespace {

struct Eigenpairs {
    RVec values;
    RMat vectors;  // basis x levels
};

double phi_zpf_of(const CircuitSpec& s) { return std::pow(8.0 * s.e_c_ghz / s.e_l_ghz, 0.25) / std::sqrt(2.0); }
double n_zpf_of(const CircuitSpec& s) { return std::pow(s.e_l_ghz / (32.0 * s.e_c_ghz), 0.25); }

Eigenpairs solve(const CircuitSpec& spec, int basis, int levels) {
    Eigen::SelfAdjointEigenSolver<RMat> es(hamiltonian_ho_basis(spec, basis));
    if (es.info() != Eigen::Success) throw Error("circuit", "eigensolver failed");
    Eigenpairs out{es.eigenvalues().head(levels), es.eigenvectors().leftCols(levels)};
    // Gauge: largest-magnitude component real and positive (vectors are real here).
    for (int k = 0; k < levels; ++k) {
        Eigen::Index imax = 0;
        out.vectors.col(k).cwiseAbs().maxCoeff(&imax);
        if (out.vectors(imax, k) < 0) out.vectors.col(k) *= -1.0;
    }
    return out;
}

void check_nondegenerate(const RVec& e) {
    for (int k = 1; k < e.size(); ++k)
        if (e[k] - e[k - 1] < 1e-9)
            throw Error("circuit", fmt::format("levels {} and {} degenerate within 1e-9 rad/ns", k - 1, k));
}

}  // namespace

void CircuitSpec::validate() const {
    if (!(e_c_ghz > 0) || !(e_j_ghz > 0) || !(e_l_ghz > 0))
        throw Error("circuit", "E_C, E_J, E_L must be strictly positive");
    if (!std::isfinite(flux_phi0)) throw Error("circuit", "flux must be finite");
}

RMat cos_operator(int basis, double phi_zpf, double phi_ext) {
    // <m|exp(i phi_zpf (a + a^dag))|n> = i^|m-n| f, with f a normalized associated Laguerre
    // function of x = phi_zpf^2, built by a stable three-term recurrence along each diagonal.
    const double x = phi_zpf * phi_zpf;
    RMat c = RMat::Zero(basis, basis);
    const cplx eph = std::exp(-I * phi_ext);
    for (int k = 0; k < basis; ++k) {
        const cplx ik = std::pow(I, k % 4);
        const double re_factor = std::real(eph * ik);
        double fm1 = 0.0;
        double f = std::exp(-0.5 * x + 0.5 * k * std::log(x) - 0.5 * std::lgamma(k + 1.0));
        for (int n = 0; n + k < basis; ++n) {
            c(n + k, n) = re_factor * f;
            c(n, n + k) = re_factor * f;
            const double next =
                ((2.0 * n + k + 1.0 - x) * f - std::sqrt(double(n) * (n + k)) * fm1) /
                std::sqrt((n + 1.0) * (n + k + 1.0));
            fm1 = f;
            f = next;
        }
    }
    return c;
}

RMat hamiltonian_ho_basis(const CircuitSpec& spec, int basis) {
    spec.validate();
    const double wp = ghz_to_rad_ns(std::sqrt(8.0 * spec.e_c_ghz * spec.e_l_ghz));
    RMat h = -ghz_to_rad_ns(spec.e_j_ghz) * cos_operator(basis, phi_zpf_of(spec), two_pi * spec.flux_phi0);
    for (int m = 0; m < basis; ++m) h(m, m) += wp * (m + 0.5);
    return h;
}

SpectrumData diagonalize(const CircuitSpec& spec, const DiagonalizeOptions& opt) {
    spec.validate();
    if (opt.levels < 4) throw Error("circuit", "levels must be >= 4");
    if (opt.basis_size < 4 * opt.levels) throw Error("circuit", "basis_size must be >= 4*levels");

    int basis = opt.basis_size;
    Eigenpairs ep = solve(spec, basis, opt.levels);
    double residual = 0.0;
    if (opt.certify) {
        for (int attempt = 0;; ++attempt) {
            const Eigenpairs bigger = solve(spec, basis + 50, opt.levels);
            residual = (bigger.values - ep.values).cwiseAbs().maxCoeff();
            if (residual < opt.tol) break;
            if (attempt == opt.max_doublings)
                throw ConvergenceError(
                    fmt::format("spectrum not converged at basis {} (max eigenvalue change {:.3e} rad/ns)",
                                basis, residual),
                    residual);
            basis *= 2;
            ep = solve(spec, basis, opt.levels);
        }
    }
    check_nondegenerate(ep.values);

    const double nz = n_zpf_of(spec), pz = phi_zpf_of(spec);
    RMat adag_minus_a = RMat::Zero(basis, basis);
    RMat a_plus_adag = RMat::Zero(basis, basis);
    for (int m = 0; m + 1 < basis; ++m) {
        const double s = std::sqrt(m + 1.0);
        adag_minus_a(m + 1, m) = s;
        adag_minus_a(m, m + 1) = -s;
        a_plus_adag(m + 1, m) = s;
        a_plus_adag(m, m + 1) = s;
    }
    const RMat& v = ep.vectors;
    SpectrumData out;
    out.levels = opt.levels;
    out.basis_size = basis;
    out.energies = ep.values;
    out.charge_elems = I * (nz * (v.transpose() * adag_minus_a * v)).cast<cplx>();
    out.phase_elems = (pz * (v.transpose() * a_plus_adag * v)).cast<cplx>();
    out.convergence_residual = residual;
    out.e_c = ghz_to_rad_ns(spec.e_c_ghz);
    return out;
}

SpectrumData diagonalize(const CircuitSpec& spec, int basis_size, int levels) {
    DiagonalizeOptions o;
    o.basis_size = basis_size;
    o.levels = levels;
    return diagonalize(spec, o);
}

RVec flux_dispersions(const CircuitSpec& spec, int basis_size, int levels, double delta_flux) {
    if (!(delta_flux > 0) || delta_flux > 1e-3) throw Error("circuit", "delta_flux must lie in (0, 1e-3]");
    const Eigenpairs c = solve(spec, basis_size, levels);
    CircuitSpec lo = spec, hi = spec;
    lo.flux_phi0 -= delta_flux;
    hi.flux_phi0 += delta_flux;
    const Eigenpairs elo = solve(lo, basis_size, levels);
    const Eigenpairs ehi = solve(hi, basis_size, levels);
    for (const Eigenpairs* side : {&elo, &ehi}) {
        const RMat overlap = (c.vectors.transpose() * side->vectors).cwiseAbs();
        for (int k = 0; k < levels; ++k) {
            Eigen::Index best = 0;
            overlap.col(k).maxCoeff(&best);
            if (best != k)
                throw Error("circuit", fmt::format("level crossing inside flux stencil at level {}", k));
        }
    }
    return (ehi.values - elo.values) / (2.0 * delta_flux);
}

double flux_dispersion(const CircuitSpec& spec, int level, double delta_flux, int basis_size, int levels) {
    if (level < 0 || level >= levels) throw Error("circuit", "level index out of range");
    return flux_dispersions(spec, basis_size, levels, delta_flux)[level];
}

TripodAssignment assign_tripod(const SpectrumData& s, std::array<int, 4> idx) {
    for (int i = 0; i < 4; ++i) {
        if (idx[i] < 0 || idx[i] >= s.levels) throw Error("circuit", "tripod index out of range");
        for (int j = 0; j < i; ++j)
            if (idx[i] == idx[j]) throw Error("circuit", "tripod indices must be distinct");
    }
    TripodAssignment t;
    t.idx0 = idx[0];
    t.idx1 = idx[1];
    t.idx_a = idx[2];
    t.idx_e = idx[3];
    const double nmax = s.charge_elems.cwiseAbs().maxCoeff();
    for (int j = 0; j < 3; ++j) {
        const int lo = t.lower(j);
        t.drive_freqs[j] = s.energies[t.idx_e] - s.energies[lo];
        t.n_je[j] = s.charge_elems(lo, t.idx_e);
        if (!(t.drive_freqs[j] > 0))
            throw Error("circuit", "excited tripod level must lie above the three lower levels");
        if (std::abs(t.n_je[j]) < 1e-8 * nmax)
            throw Error("circuit", fmt::format("tripod matrix element n(j={}, e) vanishes", j));
    }
    const double min_sep = two_pi * 1e-3;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < i; ++j)
            if (std::abs(t.drive_freqs[i] - t.drive_freqs[j]) < min_sep)
                throw Error("circuit", "two tripod drive frequencies within 2pi x 1 MHz");

    const double n01 = std::abs(s.charge_elems(t.idx0, t.idx1));
    double nmin = 1e300, nmx = 0;
    for (const cplx& n : t.n_je) {
        nmin = std::min(nmin, std::abs(n));
        nmx = std::max(nmx, std::abs(n));
    }
    t.diagnostics.push_back(fmt::format("qubit isolation |n_01|/min|n_je| = {:.4f}", n01 / nmin));
    t.diagnostics.push_back(fmt::format("tripod comparability max|n_je|/min|n_je| = {:.3f}", nmx / nmin));
    return t;
}

std::vector<ConvergenceRow> convergence_sweep(const CircuitSpec& spec, int levels, const std::vector<int>& sizes) {
    std::vector<ConvergenceRow> rows;
    RVec prev;
    for (int b : sizes) {
        const Eigenpairs ep = solve(spec, b, levels);
        rows.push_back({b, prev.size() ? (ep.values - prev).cwiseAbs().maxCoeff() : 0.0});
        prev = ep.values;
    }
    return rows;
}

}  // namespace satd
