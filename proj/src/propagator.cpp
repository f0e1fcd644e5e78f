#include "satd/propagator.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <thread>

#include <fmt/format.h>

namespace satd {

void EvolutionSpec::validate() const {
    if (!(rel_tol > 0) || rel_tol > 1e-3 || !(abs_tol > 0) || abs_tol > 1e-3)
        throw Error("propagator", "tolerances must lie in (0, 1e-3]");
    if (samples < 2) throw Error("propagator", "need at least two output samples");
    if (is_lab(mode)) {
        if (!spectrum) throw Error("propagator", "lab mode needs a spectrum");
        if (!(signal.t_total > 0)) throw Error("propagator", "signal window must be positive");
        for (const Tone& tn : signal.tones)
            if (tn.spec.lower >= spectrum->levels || tn.spec.upper >= spectrum->levels)
                throw Error("propagator", "tone addresses a level outside the retained space");
        if (signal.max_carrier() > 0 && max_step > two_pi / signal.max_carrier() / 20.0 * (1 + 1e-12))
            throw Error("propagator", "max_step exceeds 1/20 of the shortest carrier period");
    } else {
        if (!rwa.omega || !(rwa.t_total > 0)) throw Error("propagator", "RWA mode needs envelopes and a window");
    }
    const int n = dim();
    if (dissipators.z.size() != 0 && dissipators.z.size() != n)
        throw Error("propagator", "dephasing operator size does not match the state space");
    for (const JumpOp& j : dissipators.jumps)
        if (j.from >= n || j.to >= n || j.rate < 0) throw Error("propagator", "invalid collapse operator");
}

int EvolutionSpec::dim() const { return is_lab(mode) ? spectrum->levels : 4; }

double EvolutionSpec::t_total() const { return is_lab(mode) ? signal.t_total : rwa.t_total; }

double EvolutionSpec::effective_max_step() const {
    if (max_step > 0) return max_step;
    if (is_lab(mode) && signal.max_carrier() > 0) return two_pi / signal.max_carrier() / 20.0;
    return t_total() / 50.0;
}

EvolutionSpec lab_spec(std::shared_ptr<const SpectrumData> s, DriveSignal signal, bool open) {
    EvolutionSpec e;
    e.mode = open ? Mode::OpenLab : Mode::ClosedLab;
    e.spectrum = std::move(s);
    e.signal = std::move(signal);
    e.rel_tol = open ? 1e-8 : 1e-10;
    return e;
}

EvolutionSpec rwa_spec(std::function<Envelopes(double)> omega, double t_total) {
    EvolutionSpec e;
    e.mode = Mode::ClosedRwa;
    e.rwa = {std::move(omega), t_total};
    return e;
}

CMat Trajectory::final_density() const { return open ? final_rho : CMat(final_state * final_state.adjoint()); }

CMat hamiltonian_at(const EvolutionSpec& spec, double t) {
    if (is_lab(spec.mode)) {
        const SpectrumData& s = *spec.spectrum;
        CMat h = lab_voltage(spec.signal, t) * s.charge_elems;
        h.diagonal().setZero();
        h.diagonal() += s.energies.cast<cplx>();
        return h;
    }
    const Envelopes o = spec.rwa.omega(t);
    CMat h = CMat::Zero(4, 4);
    for (int j = 0; j < 3; ++j) {
        h(j, 3) = 0.5 * o[j];
        h(3, j) = 0.5 * std::conj(o[j]);
    }
    return h;
}

namespace {

// Right-hand side in the interaction picture of diag(eps) for lab modes; plain Schroedinger
// or Lindblad form for the RWA model.
class Rhs {
public:
    explicit Rhs(const EvolutionSpec& spec) : spec_(spec), n_(spec.dim()), open_(is_open(spec.mode)) {
        if (is_lab(spec.mode)) {
            const SpectrumData& s = *spec.spectrum;
            eps_ = s.energies.array() - s.energies[0];
            n_elems_ = s.charge_elems;
            n_elems_.diagonal().setZero();
            real_path_ = n_elems_.real().cwiseAbs().maxCoeff() == 0.0;
            m_ = n_elems_.imag();
            p_.resize(n_);
        }
        const RVec z = spec.dissipators.z.size() ? spec.dissipators.z : RVec::Zero(n_);
        deph_.resize(n_, n_);
        for (int k = 0; k < n_; ++k)
            for (int l = 0; l < n_; ++l) deph_(k, l) = 0.5 * (z[k] - z[l]) * (z[k] - z[l]);
        has_deph_ = deph_.maxCoeff() > 0;
        a_.resize(n_, n_);
        b_.resize(n_, n_);
        h_.resize(n_, n_);
    }

    void operator()(double t, const CVec& y, CVec& dy) {
        if (!open_) {
            closed(t, y, dy);
            return;
        }
        dy.resize(y.size());
        Eigen::Map<const CMat> rho(y.data(), n_, n_);
        Eigen::Map<CMat> d(dy.data(), n_, n_);
        if (is_lab(spec_.mode) && !spec_.resonant_only) {
            const double v = lab_voltage(spec_.signal, t);
            phases(t);
            a_ = p_.conjugate().asDiagonal() * rho;
            apply_n(a_, b_);
            b_ = (cplx(0, -1) * v) * (p_.asDiagonal() * b_);  // -i H_I rho
        } else {
            build_sparse_h(t);
            b_.noalias() = cplx(0, -1) * (h_ * rho);
        }
        d = b_ + b_.adjoint();
        dissipate(rho, d);
    }

    void build_sparse_h(double t) {
        h_.setZero();
        if (is_lab(spec_.mode)) {
            for (const Tone& tn : spec_.signal.tones) {
                const int lo = tn.spec.lower, up = tn.spec.upper;
                const cplx c = 0.5 * tn.envelope(t) * spec_.spectrum->charge_elems(lo, up) *
                               std::polar(1.0, tn.phase(t) + (eps_[lo] - eps_[up]) * t);
                h_(lo, up) += c;
                h_(up, lo) += std::conj(c);
            }
        } else {
            const Envelopes o = spec_.rwa.omega(t);
            for (int j = 0; j < 3; ++j) {
                h_(j, 3) = 0.5 * o[j];
                h_(3, j) = 0.5 * std::conj(o[j]);
            }
        }
    }

private:
    void phases(double t) {
        for (int k = 0; k < n_; ++k) p_[k] = std::polar(1.0, eps_[k] * t);
    }

    template <class In, class Out>
    void apply_n(const In& in, Out& out) {
        if (real_path_) {
            // n = i m with m real: two real products instead of one complex one.
            out.real() = -(m_ * in.imag());
            out.imag() = m_ * in.real();
        } else {
            out.noalias() = n_elems_ * in;
        }
    }

    void closed(double t, const CVec& y, CVec& dy) {
        dy.resize(y.size());
        if (is_lab(spec_.mode) && !spec_.resonant_only) {
            const double v = lab_voltage(spec_.signal, t);
            phases(t);
            CVec w = p_.conjugate().cwiseProduct(y);
            CVec u(n_);
            if (real_path_) {
                u.real() = -(m_ * w.imag());
                u.imag() = m_ * w.real();
            } else {
                u = n_elems_ * w;
            }
            dy = (cplx(0, -1) * v) * p_.cwiseProduct(u);
        } else {
            build_sparse_h(t);
            dy.noalias() = cplx(0, -1) * (h_ * y);
        }
    }

    void dissipate(const Eigen::Map<const CMat>& rho, Eigen::Map<CMat>& d) const {
        if (has_deph_) d.array() -= deph_.array().cast<cplx>() * rho.array();
        for (const JumpOp& j : spec_.dissipators.jumps) {
            d(j.to, j.to) += j.rate * rho(j.from, j.from);
            d.row(j.from) -= 0.5 * j.rate * rho.row(j.from);
            d.col(j.from) -= 0.5 * j.rate * rho.col(j.from);
        }
    }

    const EvolutionSpec& spec_;
    int n_;
    bool open_;
    RVec eps_;
    CMat n_elems_;
    RMat m_;
    bool real_path_ = false;
    CVec p_;
    RMat deph_;
    bool has_deph_ = false;
    CMat a_, b_, h_;
};

std::vector<double> sample_times(double t_total, int samples) {
    std::vector<double> ts(samples);
    for (int i = 0; i < samples; ++i) ts[i] = t_total * i / (samples - 1);
    ts.back() = t_total;
    return ts;
}

RVec frame_energies(const EvolutionSpec& spec) {
    if (!is_lab(spec.mode)) return RVec::Zero(spec.dim());
    const SpectrumData& s = *spec.spectrum;
    return s.energies.array() - s.energies[0];
}

ode::Options ode_options(const EvolutionSpec& spec) {
    ode::Options o;
    o.rel_tol = spec.rel_tol;
    o.abs_tol = spec.abs_tol;
    o.max_step = spec.effective_max_step();
    return o;
}

}  // namespace

Trajectory propagate(const EvolutionSpec& spec, const CVec& psi0) {
    spec.validate();
    const int n = spec.dim();
    if (psi0.size() != n) throw Error("propagator", "initial state has the wrong dimension");
    if (std::abs(psi0.norm() - 1.0) > 1e-10) throw Error("propagator", "initial state must be normalized");
    Rhs rhs(spec);
    const RVec eps = frame_energies(spec);
    Trajectory tr;
    tr.open = false;
    tr.times = sample_times(spec.t_total(), spec.samples);
    CVec y = psi0;
    auto observer = [&](double t, const CVec& yi) {
        CVec psi = yi;
        for (int k = 0; k < n; ++k) psi[k] *= std::polar(1.0, -eps[k] * t);
        tr.max_norm_drift = std::max(tr.max_norm_drift, std::abs(psi.norm() - 1.0));
        tr.states.push_back(std::move(psi));
    };
    tr.stats = ode::dopri5([&](double t, const CVec& a, CVec& b) { rhs(t, a, b); }, 0.0, spec.t_total(), y,
                           ode_options(spec), tr.times, observer);
    tr.final_state = tr.states.back();
    return tr;
}

Trajectory propagate(const EvolutionSpec& spec, const CMat& rho0) {
    spec.validate();
    const int n = spec.dim();
    if (!is_open(spec.mode)) {
        // Pure initial state in a closed mode: propagate its dominant eigenvector.
        Eigen::SelfAdjointEigenSolver<CMat> es(rho0);
        if (std::abs(es.eigenvalues()[n - 1] - 1.0) > 1e-10)
            throw Error("propagator", "closed modes need a pure initial state");
        return propagate(spec, CVec(es.eigenvectors().col(n - 1)));
    }
    if (rho0.rows() != n || rho0.cols() != n) throw Error("propagator", "initial state has the wrong dimension");
    if (std::abs(rho0.trace() - 1.0) > 1e-10) throw Error("propagator", "initial state must have unit trace");
    Rhs rhs(spec);
    const RVec eps = frame_energies(spec);
    Trajectory tr;
    tr.open = true;
    tr.times = sample_times(spec.t_total(), spec.samples);
    CVec y = Eigen::Map<const CVec>(rho0.data(), n * n);
    auto observer = [&](double t, const CVec& yi) {
        CMat rho = Eigen::Map<const CMat>(yi.data(), n, n);
        CVec ph(n);
        for (int k = 0; k < n; ++k) ph[k] = std::polar(1.0, -eps[k] * t);
        rho = ph.asDiagonal() * rho * ph.conjugate().asDiagonal();
        tr.max_trace_drift = std::max(tr.max_trace_drift, std::abs(rho.trace() - 1.0));
        tr.max_herm_drift = std::max(tr.max_herm_drift, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
        tr.rhos.push_back(std::move(rho));
    };
    tr.stats = ode::dopri5([&](double t, const CVec& a, CVec& b) { rhs(t, a, b); }, 0.0, spec.t_total(), y,
                           ode_options(spec), tr.times, observer);
    tr.final_rho = tr.rhos.back();
    const CMat herm = 0.5 * (tr.final_rho + tr.final_rho.adjoint());
    tr.min_eigenvalue = Eigen::SelfAdjointEigenSolver<CMat>(herm, Eigen::EigenvaluesOnly).eigenvalues()[0];
    return tr;
}

namespace {

std::vector<CVec> axial_vectors(int dim, int i0, int i1) {
    const double r = 1.0 / std::sqrt(2.0);
    const std::array<std::pair<cplx, cplx>, 6> amps{{{r, r}, {r, -r}, {r, cplx(0, r)}, {r, cplx(0, -r)}, {1, 0}, {0, 1}}};
    std::vector<CVec> out;
    for (auto [a, b] : amps) {
        CVec v = CVec::Zero(dim);
        v[i0] = a;
        v[i1] = b;
        out.push_back(v);
    }
    return out;
}

}  // namespace

std::vector<CMat> axial_states(int dim, int i0, int i1) {
    std::vector<CMat> out;
    for (const CVec& v : axial_vectors(dim, i0, i1)) out.push_back(v * v.adjoint());
    return out;
}

SixAxialResult propagate_six_axial(const EvolutionSpec& spec, int i0, int i1, int workers, bool keep) {
    spec.validate();
    const int n = spec.dim();
    if (i0 < 0 || i1 < 0 || i0 >= n || i1 >= n || i0 == i1) throw Error("propagator", "invalid qubit indices");
    const std::vector<CVec> vecs = axial_vectors(n, i0, i1);
    std::vector<Trajectory> trajs(6);
    auto run = [&](int m) {
        trajs[m] = is_open(spec.mode) ? propagate(spec, CMat(vecs[m] * vecs[m].adjoint())) : propagate(spec, vecs[m]);
    };
    workers = std::clamp(workers, 1, 6);
    if (workers == 1) {
        for (int m = 0; m < 6; ++m) run(m);
    } else {
        std::atomic<int> next{0};
        std::vector<std::exception_ptr> errors(6);
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int m; (m = next++) < 6;) {
                    try {
                        run(m);
                    } catch (...) {
                        errors[m] = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    SixAxialResult out;
    for (auto& tr : trajs) out.finals.push_back(tr.final_density());
    if (keep) out.trajectories = std::move(trajs);
    return out;
}

}  // namespace satd
