// Acceptance runner: one PASS/FAIL line per primary criterion, nonzero exit if any fails.
// Optional arguments select criteria by number (e.g. `satd_acceptance 1 4 5`).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "satd/scenario.hpp"

using namespace satd;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool within(double x, double target, double tol) { return std::abs(x - target) <= tol; }

struct Outcome {
    bool pass;
    std::string detail;
};

// Open-system invariants gathered from every dissipative run below.
struct InvariantLog {
    int runs = 0;
    double trace = 0, herm = 0, min_eig = 0;
    void add(const SimulationResult& r) {
        ++runs;
        trace = std::max(trace, r.max_trace_drift);
        herm = std::max(herm, r.max_herm_drift);
        min_eig = std::min(min_eig, r.min_eigenvalue);
    }
};

InvariantLog invariants;

int workers() { return std::max(1u, std::thread::hardware_concurrency()); }

Scenario default_scenario() { return load_scenario(SATD_SCENARIO_DIR "/default.json"); }

Outcome matrix_elements() {
    const auto t0 = Clock::now();
    const SpectrumData s = diagonalize(CircuitSpec{});
    const TripodAssignment t = assign_tripod(s, {1, 0, 2, 5});
    const double dt = seconds_since(t0);
    const double n01 = std::abs(s.charge_elems(t.idx0, t.idx1));
    const double n0e = std::abs(t.n_je[0]), n1e = std::abs(t.n_je[1]), nae = std::abs(t.n_je[2]);
    const bool ok = within(n01, 0.02, 0.005) && within(n0e, 0.27, 0.005) && within(n1e, 0.46, 0.005) &&
                    within(nae, 0.16, 0.005) && dt < 10.0;
    return {ok, fmt::format("|n01|={:.4f} |n0e|={:.4f} |n1e|={:.4f} |nae|={:.4f} in {:.2f} s", n01, n0e, n1e, nae, dt)};
}

Outcome power_optimum() {
    const auto t0 = Clock::now();
    const OmegaOptimum o = optimize_omega0(100.0);
    bool qsl = true;
    int points = 0;
    for (double tg : {10.0, 100.0, 1000.0})
        for (int i = 0; i <= 70; ++i, ++points) {
            const double x = 0.5 + 0.05 * i;
            qsl = qsl && omega_rms(tg, two_pi * x / tg) * tg > two_pi;
        }
    const double dt = seconds_since(t0);
    const bool ok = within(o.scaled_omega0, 1.135, 0.005) && within(o.scaled_rms, 1.92, 0.01) && qsl && dt < 5.0;
    return {ok, fmt::format("omega0 t_g/2pi={:.4f} rms t_g/2pi={:.4f}, QSL held at {}/{} points, {:.2f} s",
                            o.scaled_omega0, o.scaled_rms, qsl ? points : -1, points, dt)};
}

Outcome rwa_exactness() {
    const auto t0 = Clock::now();
    struct Gate {
        const char* name;
        double alpha, beta, gamma0;
    };
    const std::vector<Gate> gates{{"X", pi / 4, 0.0, pi}, {"Z", 0.0, 0.0, pi}, {"H", pi / 8, 0.0, pi}};
    double worst = 0.0;
    std::string where;
    for (const Gate& g : gates)
        for (double tg : {10.0, 30.0, 100.0, 300.0, 1000.0})
            for (double x : {0.6, 0.9, 1.135, 2.0, 4.0}) {
                GateParams p;
                p.alpha = g.alpha;
                p.beta = g.beta;
                p.gamma0 = g.gamma0;
                p.t_g = tg;
                p.t_ramp = 0.01 * tg;
                p.omega0 = two_pi * x / tg;
                const EvolutionSpec spec = rwa_spec(apply_ramps(p), p.t_total());
                const SixAxialResult r = propagate_six_axial(spec, 0, 1);
                const double err =
                    averaged_fidelity(r.finals, target_unitary(g.alpha, g.beta, g.gamma0), Mat2::Identity(), 0, 1).error;
                if (err >= worst) {
                    worst = err;
                    where = fmt::format("{} t_g={} x={}", g.name, tg, x);
                }
            }
    const double dt = seconds_since(t0);
    return {worst < 1e-6 && dt < 30.0, fmt::format("worst 1-F={:.2e} ({}), 75 points in {:.1f} s", worst, where, dt)};
}

Outcome closed_form_voltages() {
    const Scenario sc = default_scenario();
    const Prepared prep = prepare(sc);
    const double tg = 100.0;
    GateParams p;
    p.t_g = tg;
    p.t_ramp = 0.01 * tg;
    p.omega0 = optimize_omega0(tg).omega0;
    p.chirped = true;
    const TripodPulse tp = tripod_pulse(*prep.spectrum, prep.trip, p);
    const double satd_closed = v_rms_closed_form(prep.trip, p.alpha, omega_rms(tg, p.omega0)) * tg;
    const double satd_quad = v_rms(tp.signal) * tg;
    const DirectPulse dp = direct_drive_pulse(*prep.spectrum, prep.trip, pi, tg, true);
    const double dd_closed = v_rms_direct_closed_form(prep.spectrum->charge_elems(prep.trip.idx0, prep.trip.idx1), pi, tg) * tg;
    const double dd_quad = v_rms(dp.signal) * tg;
    const double ratio = dd_closed / satd_closed;
    auto rel = [](double a, double b) { return std::abs(a / b - 1.0); };
    const bool ok = rel(satd_closed, 42.1) < 0.02 && rel(satd_quad, 42.1) < 0.02 && rel(dd_closed, 136.0) < 0.02 &&
                    rel(dd_quad, 136.0) < 0.02 && within(ratio, 3.2, 0.1);
    return {ok, fmt::format("SATD V t_g: closed {:.2f} quad {:.2f}; DD V t_g: closed {:.2f} quad {:.2f}; ratio {:.3f}",
                            satd_closed, satd_quad, dd_closed, dd_quad, ratio)};
}

Outcome noise_tables() {
    const Scenario sc = default_scenario();
    const Prepared prep = prepare(sc);
    const SpectrumData& s = *prep.spectrum;
    const NoiseModel m = *sc.noise;
    const std::vector<std::pair<int, int>> pairs{{1, 0}, {2, 0}, {5, 0}, {2, 1}, {5, 1}, {2, 5}};
    const std::vector<double> free{7.03, 6.97, 53.43, 3.50, 8.09, 6.16}, eff{7.03, 6.97, 53.43, 1.75, 17.31, 3.76};
    const auto rows = effective_dephasing_table(s, m, pairs);
    bool ok = true;
    std::string d = "T_phi";
    for (size_t i = 0; i < rows.size(); ++i) {
        const double a = rows[i].t_free_us.value_or(NAN), b = rows[i].t_eff_us.value_or(NAN);
        ok = ok && std::abs(a / free[i] - 1) <= 0.03 && std::abs(b / eff[i] - 1) <= 0.03;
        d += fmt::format(" {:.2f}/{:.2f}", a, b);
    }
    d += "; T1_e1";
    for (auto [q, t1] : std::vector<std::pair<double, double>>{{5e5, 11.9}, {1e6, 23.8}, {2e6, 47.6}, {1e7, 238.0}}) {
        NoiseModel mq = m;
        mq.q_diel = q;
        const double v = t1_dielectric(s, mq, prep.trip.idx_e, prep.trip.idx1).t1_us.value_or(NAN);
        ok = ok && std::abs(v / t1 - 1) <= 0.03;
        d += fmt::format(" {:.2f}", v);
    }
    return {ok, d + " us"};
}

Outcome headline() {
    const auto t0 = Clock::now();
    const SimulationResult r = simulate(default_scenario(), workers());
    const double dt = seconds_since(t0);
    invariants.add(r);
    const double e = r.fidelity.error;
    return {e >= 3e-4 && e <= 9e-4 && dt < 120.0,
            fmt::format("error {:.3e} (F={:.5f}), leakage {:.2e}, {:.1f} s", e, r.fidelity.fbar, r.fidelity.leakage, dt)};
}

Outcome chirp_benefit() {
    Scenario sc = default_scenario();
    sc.noise.reset();
    const Prepared prep = prepare(sc);
    bool ok = true;
    std::string d;
    for (double tg : {150.0, 200.0, 300.0}) {
        sc.gate.t_g = tg;
        sc.gate.protocol = ProtocolName::SatdChirped;
        const SimulationResult c = simulate(sc, prep, workers());
        sc.gate.protocol = ProtocolName::Satd;
        const SimulationResult u = simulate(sc, prep, workers());
        const double gain = u.fidelity.error / c.fidelity.error;
        ok = ok && gain >= 10.0 && c.fidelity.leakage < c.fidelity.error;
        d += fmt::format("t_g={:.0f}: chirped {:.2e} (leak {:.1e}) vs plain {:.2e}, x{:.1f}; ", tg, c.fidelity.error,
                         c.fidelity.leakage, u.fidelity.error, gain);
    }
    return {ok, d};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        const double a = std::log(x[i]), b = std::log(y[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Outcome dephasing_ratio() {
    // Dephasing-dominated regime: flux noise only, SATD gate times where coherent errors are < 10%.
    Scenario sc = default_scenario();
    sc.noise->q_diel.reset();
    const Prepared prep = prepare(sc);
    const double c = vrms_constant(sc, prep, sc.gate.protocol);
    sc.sweep = SweepConfig{"v_rms", {c / 200.0, c / 300.0, c / 400.0}, true};
    const SweepOutput out = sweep_runner(sc, workers());
    std::vector<double> ts, es, td, ed;
    double log_zeta = 0.0;
    std::string d;
    for (const SweepRow& row : out.rows) {
        if (!row.result) return {false, "sweep point failed: " + row.status};
        invariants.add(*row.result);
    }
    for (const ComparisonRow& r : out.comparisons) {
        ts.push_back(r.t_g_satd);
        es.push_back(r.error_satd);
        td.push_back(r.t_g_dd);
        ed.push_back(r.error_dd);
        log_zeta += std::log(r.zeta);
        d += fmt::format("[V={:.4f}: t {:.0f}/{:.0f} ns, err {:.2e}/{:.2e}, zeta {:.2f}] ", r.v_rms, r.t_g_satd,
                         r.t_g_dd, r.error_satd, r.error_dd, r.zeta);
    }
    const double zeta = std::exp(log_zeta / out.comparisons.size());
    const double ps = loglog_slope(ts, es), pd = loglog_slope(td, ed);
    const bool ok = std::abs(zeta / 5.3 - 1) <= 0.15 && within(ps, 2.0, 0.2) && within(pd, 2.0, 0.2);
    return {ok, fmt::format("zeta {:.2f}, exponents SATD {:.2f} DD {:.2f}; {}", zeta, ps, pd, d)};
}

Outcome cavity_round_trip() {
    const Scenario sc = default_scenario();
    const Prepared prep = prepare(sc);
    const CavitySpec& cav = *sc.cavity;
    GateParams p;
    p.t_g = 100.0;
    p.t_ramp = 1.0;
    p.omega0 = optimize_omega0(p.t_g).omega0;
    p.chirped = true;
    const TripodPulse tp = tripod_pulse(*prep.spectrum, prep.trip, p);
    const CavityDrive d = cavity_drive(tp.signal, cav, two_pi / tp.signal.max_carrier() / 40.0);

    // Independent RK4 of x'' + kappa x' + (w_c^2 + kappa^2/4) x = -2 g w_c u, step 2 dt.
    const double k2 = cav.omega_cav * cav.omega_cav + 0.25 * cav.kappa * cav.kappa;
    auto acc = [&](double x, double v, double u) { return -cav.kappa * v - k2 * x - 2 * cav.g * cav.omega_cav * u; };
    double x = 0, v = 0, num = 0, den = 0;
    const double h = 2 * d.dt;
    for (size_t i = 0; i + 2 < d.u.size(); i += 2) {
        const double kx1 = v, kv1 = acc(x, v, d.u[i]);
        const double kx2 = v + h / 2 * kv1, kv2 = acc(x + h / 2 * kx1, v + h / 2 * kv1, d.u[i + 1]);
        const double kx3 = v + h / 2 * kv2, kv3 = acc(x + h / 2 * kx2, v + h / 2 * kv2, d.u[i + 1]);
        const double kx4 = v + h * kv3, kv4 = acc(x + h * kx3, v + h * kv3, d.u[i + 2]);
        x += h / 6 * (kx1 + 2 * kx2 + 2 * kx3 + kx4);
        v += h / 6 * (kv1 + 2 * kv2 + 2 * kv3 + kv4);
        if (d.t[i + 2] >= p.t_ramp) {
            num += std::pow(x - d.v[i + 2], 2);
            den += d.v[i + 2] * d.v[i + 2];
        }
    }
    const double rms = std::sqrt(num / den);
    const CavityCoherence coh = cavity_coherence_times(*prep.spectrum, prep.trip, cav);
    const double t1 = coh.t1[0].t1_s, t2 = coh.t2_s;
    const bool ok = rms < 0.01 && std::abs(t1 / 0.15 - 1) <= 0.03 && std::abs(t2 / 0.32e-3 - 1) <= 0.03;
    return {ok, fmt::format("round-trip RMS mismatch {:.2e}; T1_cav(01) {:.4f} s (target 0.15), T2_cav {:.4f} ms "
                            "(target 0.32)",
                            rms, t1, t2 * 1e3)};
}

Outcome open_invariants() {
    const bool ok = invariants.runs > 0 && invariants.trace < 1e-7 && invariants.herm < 1e-7 && invariants.min_eig > -1e-6;
    return {ok, fmt::format("{} open runs: max trace drift {:.1e}, max Hermiticity drift {:.1e}, min eigenvalue {:.1e}",
                            invariants.runs, invariants.trace, invariants.herm, invariants.min_eig)};
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"matrix elements", matrix_elements},        {"power optimum", power_optimum},
        {"RWA exactness oracle", rwa_exactness},     {"closed-form voltages", closed_form_voltages},
        {"noise tables", noise_tables},              {"headline fidelity", headline},
        {"chirp benefit", chirp_benefit},            {"dephasing-regime ratio", dephasing_ratio},
        {"cavity round trip", cavity_round_trip},    {"open-system invariants", open_invariants},
    };
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) pick.insert(std::stoi(argv[i]));
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        if (!pick.empty() && !pick.count(int(i + 1))) continue;
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
