#include "satd/pulsegen.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace satd {

void GateParams::validate() const {
    if (!(t_g > 0)) throw Error("pulsegen", "t_g must be positive");
    if (!(t_ramp > 0) || !(t_ramp < t_g / 4)) throw Error("pulsegen", "t_ramp must lie in (0, t_g/4)");
    if (!(omega0 > 0)) throw Error("pulsegen", "omega0 must be positive");
}

Smoothstep smoothstep(double s) {
    const double s2 = s * s, s3 = s2 * s;
    return {6 * s3 * s2 - 15 * s2 * s2 + 10 * s3, 30 * s2 * s2 - 60 * s3 + 30 * s2, 120 * s3 - 180 * s2 + 60 * s};
}

ThetaSchedule schedule_theta(double t, double t_g) {
    const double eps = 1e-12 * t_g;
    if (t < -eps || t > t_g + eps) throw Error("pulsegen", fmt::format("t = {} outside [0, t_g = {}]", t, t_g));
    t = std::clamp(t, 0.0, t_g);
    const double k = 2.0 / t_g;
    if (t <= 0.5 * t_g) {
        const Smoothstep p = smoothstep(k * t);
        return {0.5 * pi * p.p, 0.5 * pi * p.dp * k, 0.5 * pi * p.ddp * k * k};
    }
    const Smoothstep p = smoothstep(k * t - 1.0);
    return {0.5 * pi * (1.0 - p.p), -0.5 * pi * p.dp * k, -0.5 * pi * p.ddp * k * k};
}

namespace {

double gamma_at(double t, const GateParams& p) { return t > 0.5 * p.t_g ? p.gamma0 : 0.0; }

Envelopes from_angles(double amp, double s, double c, double gamma, const GateParams& p) {
    return {amp * std::cos(p.alpha) * s, amp * std::sin(p.alpha) * std::polar(1.0, p.beta) * s,
            amp * std::polar(1.0, gamma) * c};
}

}  // namespace

Envelopes adiabatic_envelopes(double t, const GateParams& p) {
    const ThetaSchedule th = schedule_theta(t, p.t_g);
    return from_angles(p.omega0, std::sin(th.theta), std::cos(th.theta), gamma_at(t, p), p);
}

Envelopes satd_envelopes(double t, const GateParams& p) {
    const ThetaSchedule th = schedule_theta(t, p.t_g);
    const double x = th.ddtheta / (th.dtheta * th.dtheta + 0.25 * p.omega0 * p.omega0);
    const double s = std::sin(th.theta), c = std::cos(th.theta);
    return from_angles(p.omega0, s + x * c, c - x * s, gamma_at(t, p), p);
}

Envelopes dressed_envelopes(double t, const GateParams& p) {
    const ThetaSchedule th = schedule_theta(t, p.t_g);
    const double r = 2.0 * th.dtheta / p.omega0;
    const double nu = std::atan(r);
    const double nudot = (2.0 * th.ddtheta / p.omega0) / (1.0 + r * r);
    double theta_t, gap;
    if (std::abs(th.dtheta) > 1e-300 && std::abs(std::tan(nu)) > 1e-300) {
        theta_t = th.theta + std::atan(nudot * std::tan(nu) / th.dtheta);
        const double q = th.dtheta / std::tan(nu);
        gap = std::sqrt(nudot * nudot + q * q);
    } else {
        // thetadot/tan(nu) -> omega0/2 as thetadot -> 0
        theta_t = th.theta + std::atan(2.0 * nudot / p.omega0);
        gap = std::sqrt(nudot * nudot + 0.25 * p.omega0 * p.omega0);
    }
    return from_angles(2.0 * gap, std::sin(theta_t), std::cos(theta_t), gamma_at(t, p), p);
}

Envelopes interior_envelopes(double t, const GateParams& p) {
    return p.protocol == Protocol::Satd ? satd_envelopes(t, p) : adiabatic_envelopes(t, p);
}

std::function<Envelopes(double)> apply_ramps(const GateParams& p) {
    p.validate();
    return [p](double t) -> Envelopes {
        const double tr = p.t_ramp;
        if (t <= tr) {
            const double s = std::clamp(t / tr, 0.0, 1.0);
            return {0.0, 0.0, p.omega0 * smoothstep(s).p};
        }
        if (t <= tr + p.t_g) return interior_envelopes(t - tr, p);
        const double s = std::clamp((t - tr - p.t_g) / tr, 0.0, 1.0);
        return {0.0, 0.0, p.omega0 * std::polar(1.0, p.gamma0) * (1.0 - smoothstep(s).p)};
    };
}

double PhaseTable::operator()(double t) const {
    const int m = int(phase.size());
    if (m == 1) return phase[0];
    const double x = std::clamp(t / dt, 0.0, double(m - 1));
    const int i = std::min(int(x), m - 2);
    const double u = x - i, u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * phase[i] + (u3 - 2 * u2 + u) * dt * rate[i] + (-2 * u3 + 3 * u2) * phase[i + 1] +
           (u3 - u2) * dt * rate[i + 1];
}

double PhaseTable::rate_at(double t) const {
    const int m = int(rate.size());
    if (m == 1) return rate[0];
    const double x = std::clamp(t / dt, 0.0, double(m - 1));
    const int i = std::min(int(x), m - 2);
    const double u = x - i;
    return (1 - u) * rate[i] + u * rate[i + 1];
}

PhaseTable integrate_phase(std::vector<double> rate, double dt) {
    PhaseTable out;
    out.dt = dt;
    out.phase.assign(rate.size(), 0.0);
    for (size_t i = 1; i < rate.size(); ++i) out.phase[i] = out.phase[i - 1] + 0.5 * dt * (rate[i - 1] + rate[i]);
    out.rate = std::move(rate);
    return out;
}

StarkModel::StarkModel(const SpectrumData& s, std::vector<int> levels, std::vector<ToneSpec> tones,
                       double min_detuning)
    : levels_(std::move(levels)), coef_(RMat::Zero(levels_.size(), tones.size())) {
    if (!(min_detuning > 0)) throw Error("pulsegen", "min_detuning must be positive");
    for (size_t a = 0; a < levels_.size(); ++a) {
        const int k = levels_[a];
        for (size_t j = 0; j < tones.size(); ++j) {
            const ToneSpec& tn = tones[j];
            for (int l = 0; l < s.levels; ++l) {
                if (l == k) continue;
                const double n2 = std::norm(s.charge_elems(k, l));
                for (int sigma : {+1, -1}) {
                    // The intended drive itself is resonant, not a shift.
                    if ((k == tn.lower && l == tn.upper && sigma == +1) || (k == tn.upper && l == tn.lower && sigma == -1))
                        continue;
                    const double delta = s.energies[k] - s.energies[l] + sigma * tn.carrier;
                    if (std::abs(delta) < min_detuning) {
                        warnings_.push_back(fmt::format(
                            "near-resonant term k={} l={} tone={} sigma={:+d}: |Delta| = {:.3e} rad/ns", k, l, j, sigma,
                            std::abs(delta)));
                        continue;
                    }
                    coef_(a, j) += n2 / (4.0 * delta);
                    ledger_.push_back({k, l, int(j), sigma, delta});
                }
            }
        }
    }
}

std::vector<double> StarkModel::shifts(const std::vector<cplx>& v) const {
    std::vector<double> out(levels_.size(), 0.0);
    for (size_t a = 0; a < levels_.size(); ++a)
        for (Eigen::Index j = 0; j < coef_.cols(); ++j) out[a] += std::norm(v[j]) * coef_(a, j);
    return out;
}

const std::vector<double>& StarkShiftTable::of(int level) const {
    for (size_t a = 0; a < levels.size(); ++a)
        if (levels[a] == level) return shift[a];
    throw Error("pulsegen", fmt::format("level {} not in Stark table", level));
}

double StarkShiftTable::integral(int level) const {
    const auto& v = of(level);
    double acc = 0.0;
    for (size_t i = 1; i < v.size(); ++i) acc += 0.5 * dt * (v[i - 1] + v[i]);
    return acc;
}

StarkShiftTable stark_table(const StarkModel& model, const std::function<std::vector<cplx>(double)>& voltages,
                            double t_total, int samples) {
    if (samples < 2) throw Error("pulsegen", "Stark table needs at least two samples");
    StarkShiftTable tab;
    tab.levels = model.levels();
    tab.dt = t_total / (samples - 1);
    tab.ledger = model.ledger();
    tab.warnings = model.warnings();
    tab.shift.assign(tab.levels.size(), std::vector<double>(samples, 0.0));
    for (int i = 0; i < samples; ++i) {
        const std::vector<double> d = model.shifts(voltages(i * tab.dt));
        for (size_t a = 0; a < d.size(); ++a) tab.shift[a][i] = d[a];
    }
    return tab;
}

double DriveSignal::max_carrier() const {
    double w = 0.0;
    for (const Tone& tn : tones) w = std::max(w, tn.spec.carrier);
    return w;
}

double lab_voltage(const DriveSignal& s, double t) {
    double v = 0.0;
    for (const Tone& tn : s.tones) v += std::real(tn.envelope(t) * std::polar(1.0, tn.phase(t)));
    return v;
}

std::vector<PhaseTable> chirp_phases(const StarkShiftTable& table, const TripodAssignment& trip) {
    const auto& de = table.of(trip.idx_e);
    std::vector<PhaseTable> out;
    for (int j = 0; j < 3; ++j) {
        const auto& dj = table.of(trip.lower(j));
        std::vector<double> rate(de.size());
        for (size_t i = 0; i < de.size(); ++i) rate[i] = de[i] - dj[i];
        out.push_back(integrate_phase(std::move(rate), table.dt));
    }
    return out;
}

TripodPulse tripod_pulse(const SpectrumData& s, const TripodAssignment& trip, const GateParams& p, int stark_samples,
                         double min_detuning) {
    p.validate();
    if (stark_samples < 200) throw Error("pulsegen", "Stark table needs at least 200 samples per gate");
    TripodPulse out;
    out.params = p;
    out.omega = apply_ramps(p);
    out.signal.t_total = p.t_total();

    std::vector<ToneSpec> specs;
    for (int j = 0; j < 3; ++j) specs.push_back({trip.lower(j), trip.idx_e, trip.drive_freqs[j]});
    const StarkModel model(s, {trip.idx0, trip.idx1, trip.idx_a, trip.idx_e}, specs, min_detuning);
    const auto omega = out.omega;
    const auto n = trip.n_je;
    out.stark = stark_table(
        model,
        [&](double t) {
            const Envelopes o = omega(t);
            return std::vector<cplx>{o[0] / n[0], o[1] / n[1], o[2] / n[2]};
        },
        p.t_total(), stark_samples);

    std::vector<PhaseTable> chirps;
    if (p.chirped) chirps = chirp_phases(out.stark, trip);
    for (int j = 0; j < 3; ++j) {
        Tone tn;
        tn.spec = specs[j];
        const cplx nj = n[j];
        tn.envelope = [omega, nj, j](double t) { return omega(t)[j] / nj; };
        if (p.chirped) tn.chirp = chirps[j];
        out.signal.tones.push_back(std::move(tn));
    }
    return out;
}

DirectPulse direct_drive_pulse(const SpectrumData& s, const TripodAssignment& trip, double chi, double t_g,
                               bool chirped, int stark_samples, double min_detuning) {
    if (!(t_g > 0)) throw Error("pulsegen", "t_g must be positive");
    const bool zero_low = s.energies[trip.idx0] < s.energies[trip.idx1];
    const int lo = zero_low ? trip.idx0 : trip.idx1;
    const int hi = zero_low ? trip.idx1 : trip.idx0;
    const cplx n = s.charge_elems(lo, hi);
    if (std::abs(n) == 0.0) throw Error("pulsegen", "qubit charge matrix element vanishes");

    DirectPulse out;
    out.chi = chi;
    out.t_g = t_g;
    out.chirped = chirped;
    out.omega = [chi, t_g](double t) { return (chi / t_g) * (1.0 - std::cos(two_pi * t / t_g)); };
    out.signal.t_total = t_g;

    const ToneSpec spec{lo, hi, s.energies[hi] - s.energies[lo]};
    const StarkModel model(s, {lo, hi}, {spec}, min_detuning);
    const auto omega = out.omega;
    out.stark = stark_table(
        model, [&](double t) { return std::vector<cplx>{omega(t) / n}; }, t_g, std::max(stark_samples, 200));

    Tone tn;
    tn.spec = spec;
    tn.envelope = [omega, n](double t) { return cplx(omega(t)) / n; };
    if (chirped) {
        const auto& dlo = out.stark.of(lo);
        const auto& dhi = out.stark.of(hi);
        std::vector<double> rate(dlo.size());
        for (size_t i = 0; i < rate.size(); ++i) rate[i] = dhi[i] - dlo[i];
        tn.chirp = integrate_phase(std::move(rate), out.stark.dt);
    }
    out.signal.tones.push_back(std::move(tn));
    return out;
}

std::vector<SpectrumPoint> voltage_spectrum(const DriveSignal& s, double f_min, double f_max, int nf, double dt) {
    const int nt = int(std::ceil(s.t_total / dt)) + 1;
    const double h = s.t_total / (nt - 1);
    std::vector<double> vw(nt);
    for (int i = 0; i < nt; ++i) {
        const double t = i * h;
        const double w = std::sin(pi * t / s.t_total);
        vw[i] = lab_voltage(s, t) * w * w;
    }
    std::vector<SpectrumPoint> out;
    out.reserve(nf);
    for (int q = 0; q < nf; ++q) {
        const double f = nf > 1 ? f_min + (f_max - f_min) * q / (nf - 1) : f_min;
        const cplx step = std::polar(1.0, -two_pi * f * h);
        cplx z = 1.0, acc = 0.0;
        for (int i = 0; i < nt; ++i) {
            acc += vw[i] * z;
            z *= step;
            if ((i & 1023) == 1023) z /= std::abs(z);
        }
        out.push_back({f, std::abs(acc) * h});
    }
    return out;
}

}  // namespace satd
