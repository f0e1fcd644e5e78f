#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "satd/pulsegen.hpp"

using namespace satd;

namespace {

GateParams gate(double scaled_omega0, double t_g = 100.0) {
    GateParams p;
    p.t_g = t_g;
    p.t_ramp = 0.01 * t_g;
    p.omega0 = two_pi * scaled_omega0 / t_g;
    return p;
}

double total_norm(const Envelopes& e) { return std::sqrt(std::norm(e[0]) + std::norm(e[1]) + std::norm(e[2])); }

}  // namespace

TEST_CASE("smoothstep and theta schedule endpoints") {
    const Smoothstep a = smoothstep(0.0), b = smoothstep(1.0);
    CHECK(a.p == 0.0);
    CHECK(b.p == doctest::Approx(1.0));
    CHECK(a.dp == 0.0);
    CHECK(b.dp == doctest::Approx(0.0));
    CHECK(a.ddp == 0.0);
    CHECK(b.ddp == doctest::Approx(0.0));

    const double tg = 80.0;
    CHECK(schedule_theta(0.0, tg).theta == 0.0);
    CHECK(schedule_theta(tg / 2, tg).theta == doctest::Approx(pi / 2));
    CHECK(schedule_theta(tg, tg).theta == doctest::Approx(0.0));
    CHECK(schedule_theta(tg / 2, tg).dtheta == doctest::Approx(0.0));
    CHECK_THROWS_AS(schedule_theta(-1.0, tg), Error);
    CHECK_THROWS_AS(schedule_theta(tg + 1.0, tg), Error);

    // derivatives against central differences
    const double h = 1e-5;
    for (double t : {7.0, 33.0, 52.0, 71.0}) {
        const ThetaSchedule c = schedule_theta(t, tg);
        CHECK(c.dtheta == doctest::Approx((schedule_theta(t + h, tg).theta - schedule_theta(t - h, tg).theta) / (2 * h)).epsilon(1e-7));
        CHECK(c.ddtheta == doctest::Approx((schedule_theta(t + h, tg).dtheta - schedule_theta(t - h, tg).dtheta) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("adiabatic envelopes have constant gap") {
    GateParams p = gate(1.135);
    p.alpha = 0.3;
    p.beta = 0.7;
    p.protocol = Protocol::Adiabatic;
    for (double t = 0; t <= p.t_g; t += 3.7) CHECK(total_norm(adiabatic_envelopes(t, p)) == doctest::Approx(p.omega0));
}

TEST_CASE("SATD envelopes equal the dressing-transform construction") {
    for (double x : {0.6, 1.135, 3.0}) {
        GateParams p = gate(x);
        p.alpha = 0.3;
        p.beta = 0.7;
        p.gamma0 = 1.1;
        double worst = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double t = p.t_g * i / 400.0;
            const Envelopes a = satd_envelopes(t, p), b = dressed_envelopes(t, p);
            for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(a[j] - b[j]) / p.omega0);
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("ramps are continuous and carry the geometric phase") {
    GateParams p = gate(1.135);
    const auto om = apply_ramps(p);
    const double tr = p.t_ramp;
    const Envelopes z0 = om(0.0), z1 = om(p.t_total());
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(z0[j]) < 1e-15);
        CHECK(std::abs(z1[j]) < 1e-12);
    }
    const Envelopes in0 = satd_envelopes(0.0, p), in1 = satd_envelopes(p.t_g, p);
    const Envelopes r0 = om(tr), r1 = om(tr + p.t_g);
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(r0[j] - in0[j]) < 1e-12);
        CHECK(std::abs(r1[j] - in1[j]) < 1e-12);
    }
    const Envelopes mid3 = om(tr + p.t_g + 0.5 * tr);
    CHECK(std::arg(mid3[2]) == doctest::Approx(std::remainder(p.gamma0, two_pi)));
    CHECK(std::abs(mid3[0]) == 0.0);

    GateParams bad = p;
    bad.t_ramp = p.t_g / 3;
    CHECK_THROWS_AS(apply_ramps(bad), Error);
}

TEST_CASE("Stark shift of a driven two-level system matches Floquet quasienergy") {
    // H(t) = diag(0, eps) + V cos(w t) sigma_x, both rotating and counter-rotating terms off resonance.
    SpectrumData s;
    s.levels = 2;
    s.energies = RVec(2);
    s.energies << 0.0, 1.0;
    s.charge_elems = CMat::Zero(2, 2);
    s.charge_elems(0, 1) = s.charge_elems(1, 0) = 1.0;
    const double w = 0.3, v = 0.02;
    const StarkModel model(s, {0, 1}, {{-1, -1, w}});
    const std::vector<double> shift = model.shifts({v});
    CHECK(model.ledger().size() == 4);

    // one-period propagator by fixed-step RK4
    const double period = two_pi / w;
    const int steps = 40000;
    const double h = period / steps;
    CMat u = CMat::Identity(2, 2);
    auto rhs = [&](double t, const CMat& y) {
        CMat hm = CMat::Zero(2, 2);
        hm(1, 1) = 1.0;
        hm(0, 1) = hm(1, 0) = v * std::cos(w * t);
        return CMat(-I * hm * y);
    };
    for (int i = 0; i < steps; ++i) {
        const double t = i * h;
        const CMat k1 = rhs(t, u), k2 = rhs(t + h / 2, u + h / 2 * k1), k3 = rhs(t + h / 2, u + h / 2 * k2),
                   k4 = rhs(t + h, u + h * k3);
        u += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    Eigen::ComplexEigenSolver<CMat> es(u);
    for (int a = 0; a < 2; ++a) {
        const int dom = std::abs(es.eigenvectors()(0, a)) > std::abs(es.eigenvectors()(1, a)) ? 0 : 1;
        const double q = -std::arg(es.eigenvalues()[a]) / period;  // quasienergy mod w
        const double expected = s.energies[dom] + shift[dom];
        const double diff = std::remainder(q - expected, w);
        CHECK(std::abs(diff) < 1e-3 * std::abs(shift[dom]));
    }
}

TEST_CASE("Stark model excludes the intended resonant drive term") {
    const auto s = fixtures::reference_spectrum();
    const TripodAssignment& t = fixtures::reference_tripod();
    const StarkModel m(*s, {t.idx0, t.idx_e}, {{t.idx0, t.idx_e, t.drive_freqs[0]}});
    for (const StarkTerm& term : m.ledger()) {
        const bool self = (term.k == t.idx0 && term.l == t.idx_e && term.sigma == +1) ||
                          (term.k == t.idx_e && term.l == t.idx0 && term.sigma == -1);
        CHECK_FALSE(self);
        CHECK(std::abs(term.detuning) >= two_pi * 1e-3);
    }
}

TEST_CASE("phase integration is second order and interpolation is exact for quadratics") {
    auto err = [](int n) {
        const double dt = pi / (n - 1);
        std::vector<double> r(n);
        for (int i = 0; i < n; ++i) r[i] = std::sin(i * dt);
        return std::abs(integrate_phase(r, dt).phase.back() - 2.0);
    };
    const double ratio = err(101) / err(201);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.02));

    const double dt = 0.1;
    std::vector<double> r(51);
    for (int i = 0; i < 51; ++i) r[i] = i * dt;
    const PhaseTable tab = integrate_phase(r, dt);
    for (double t : {0.0, 0.123, 2.345, 4.999}) {
        CHECK(tab(t) == doctest::Approx(0.5 * t * t).epsilon(1e-12));
        CHECK(tab.rate_at(t) == doctest::Approx(t).epsilon(1e-12));
    }
}

TEST_CASE("tripod pulse: tone envelopes, chirp rates, voltage") {
    const auto s = fixtures::reference_spectrum();
    const TripodAssignment& t = fixtures::reference_tripod();
    GateParams p = gate(1.135);
    p.chirped = true;
    const TripodPulse tp = tripod_pulse(*s, t, p);
    REQUIRE(tp.signal.tones.size() == 3);
    const double tm = 37.3;
    const Envelopes om = tp.omega(tm);
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(tp.signal.tones[j].envelope(tm) * t.n_je[j] - om[j]) < 1e-14);
        CHECK(tp.signal.tones[j].spec.carrier == t.drive_freqs[j]);
    }
    // chirp rate = shift of e minus shift of the lower level, sampled on the table grid
    const int i = 777;
    const double ti = i * tp.stark.dt;
    const double expect = tp.stark.of(t.idx_e)[i] - tp.stark.of(t.idx0)[i];
    CHECK(tp.signal.tones[0].inst_freq(ti) - t.drive_freqs[0] == doctest::Approx(expect).epsilon(1e-10));

    double v = 0.0;
    for (const Tone& tn : tp.signal.tones) v += std::real(tn.envelope(tm) * std::polar(1.0, tn.phase(tm)));
    CHECK(lab_voltage(tp.signal, tm) == doctest::Approx(v));

    p.chirped = false;
    const TripodPulse plain = tripod_pulse(*s, t, p);
    CHECK(plain.signal.tones[0].chirp.empty());
    CHECK(plain.stark.samples() == 2000);
    CHECK_THROWS_AS(tripod_pulse(*s, t, p, 100), Error);
}

TEST_CASE("direct-drive pulse: area, RMS, ordering") {
    const auto s = fixtures::reference_spectrum();
    const TripodAssignment& t = fixtures::reference_tripod();
    const double chi = pi, tg = 300.0;
    const DirectPulse dp = direct_drive_pulse(*s, t, chi, tg, true);
    double area = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double tt = (i + 0.5) * tg / n;
        area += dp.omega(tt) * tg / n;
        sq += dp.omega(tt) * dp.omega(tt) * tg / n;
    }
    CHECK(area == doctest::Approx(chi).epsilon(1e-8));
    CHECK(std::sqrt(sq / tg) == doctest::Approx(chi * std::sqrt(1.5) / tg).epsilon(1e-8));
    REQUIRE(dp.signal.tones.size() == 1);
    CHECK(dp.signal.tones[0].spec.carrier > 0);
    CHECK(dp.signal.tones[0].spec.carrier == doctest::Approx(std::abs(s->energies[t.idx0] - s->energies[t.idx1])));
    CHECK_FALSE(dp.signal.tones[0].chirp.empty());
}

TEST_CASE("pulse spectrum peaks at the three drive frequencies") {
    const auto s = fixtures::reference_spectrum();
    const TripodAssignment& t = fixtures::reference_tripod();
    const TripodPulse tp = tripod_pulse(*s, t, gate(1.135));
    const double fmax = 1.3 * rad_ns_to_ghz(tp.signal.max_carrier());
    const auto sp = voltage_spectrum(tp.signal, 0.0, fmax, 4001, 0.02);
    std::vector<std::pair<double, double>> peaks;
    for (size_t i = 1; i + 1 < sp.size(); ++i)
        if (sp[i].magnitude > sp[i - 1].magnitude && sp[i].magnitude >= sp[i + 1].magnitude)
            peaks.push_back({sp[i].magnitude, sp[i].f_ghz});
    std::sort(peaks.rbegin(), peaks.rend());
    REQUIRE(peaks.size() >= 3);
    // The a-e envelope changes sign at mid-gate, which splits its line into two lobes
    // about 1/t_g apart, so look for a strong maximum near each carrier.
    for (double f : t.drive_freqs) {
        bool found = false;
        for (const auto& [mag, fp] : peaks)
            found = found || (std::abs(fp - rad_ns_to_ghz(f)) < 0.03 && mag > 0.1 * peaks[0].first);
        CAPTURE(rad_ns_to_ghz(f));
        CHECK(found);
    }
    // nothing comparable away from the three lines
    for (const auto& [mag, fp] : peaks) {
        bool near = false;
        for (double f : t.drive_freqs) near = near || std::abs(fp - rad_ns_to_ghz(f)) < 0.1;
        if (!near) CHECK(mag < 0.05 * peaks[0].first);
    }
}
