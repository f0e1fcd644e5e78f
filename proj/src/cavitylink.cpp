#include "satd/cavitylink.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace satd {

void CavitySpec::validate() const {
    if (!(omega_cav > 0) || !(g > 0)) throw Error("cavitylink", "omega_cav and g must be positive");
    if (!(kappa >= 0)) throw Error("cavitylink", "kappa must be non-negative");
    if (!(n_th >= 0 && n_th < 1) || !(n_cav_max >= 0 && n_cav_max < 1))
        throw Error("cavitylink", "n_th and n_cav_max must lie in [0, 1)");
}

double photons_to_vrms(double n_cav, double g) { return g * std::sqrt(2.0 * n_cav); }

CavityDrive cavity_drive(const std::vector<double>& v, double h, const CavitySpec& cav) {
    cav.validate();
    const int n = int(v.size());
    if (n < 6) throw Error("cavitylink", "need at least six samples");
    CavityDrive out;
    out.dt = h;
    out.v = v;
    out.t.resize(n);
    out.u.resize(n);
    const double c0 = cav.omega_cav * cav.omega_cav + 0.25 * cav.kappa * cav.kappa;
    const double pre = -1.0 / (2.0 * cav.g * cav.omega_cav);
    for (int i = 0; i < n; ++i) {
        double d1, d2;
        if (i >= 2 && i <= n - 3) {
            d1 = (-v[i + 2] + 8 * v[i + 1] - 8 * v[i - 1] + v[i - 2]) / (12 * h);
            d2 = (-v[i + 2] + 16 * v[i + 1] - 30 * v[i] + 16 * v[i - 1] - v[i - 2]) / (12 * h * h);
        } else {
            // One-sided stencils, mirrored at the right end.
            const int s = i < 2 ? 1 : -1;
            auto f = [&](int k) { return v[i + s * k]; };
            d1 = s * (-25 * f(0) + 48 * f(1) - 36 * f(2) + 16 * f(3) - 3 * f(4)) / (12 * h);
            d2 = (45 * f(0) - 154 * f(1) + 214 * f(2) - 156 * f(3) + 61 * f(4) - 10 * f(5)) / (12 * h * h);
        }
        out.t[i] = i * h;
        out.u[i] = pre * (d2 + cav.kappa * d1 + c0 * v[i]);
    }
    return out;
}

namespace {

std::vector<double> sample_voltage(const DriveSignal& s, int intervals) {
    std::vector<double> v(intervals + 1);
    const double h = s.t_total / intervals;
    for (int i = 0; i <= intervals; ++i) v[i] = lab_voltage(s, i * h);
    return v;
}

double max_abs(const std::vector<double>& x) {
    double m = 0.0;
    for (double a : x) m = std::max(m, std::abs(a));
    return m;
}

}  // namespace

CavityDrive cavity_drive(const DriveSignal& s, const CavitySpec& cav, double grid_dt) {
    const double period = two_pi / s.max_carrier();
    if (!(grid_dt > 0) || grid_dt > period / 40.0 * (1 + 1e-12))
        throw Error("cavitylink", fmt::format("grid_dt must not exceed the shortest carrier period / 40 ({:.4g} ns)",
                                              period / 40.0));
    const int intervals = int(std::ceil(s.t_total / grid_dt));
    CavityDrive out = cavity_drive(sample_voltage(s, intervals), s.t_total / intervals, cav);
    const CavityDrive fine = cavity_drive(sample_voltage(s, 2 * intervals), s.t_total / (2 * intervals), cav);
    const double a = max_abs(out.u), b = max_abs(fine.u);
    if (b > 0 && std::abs(a - b) > 0.01 * b)
        throw Error("cavitylink", fmt::format("cavity drive grid too coarse: max|u| changes by {:.2f}% on halving",
                                              100 * std::abs(a - b) / b));
    return out;
}

CavityCoherence cavity_coherence_times(const SpectrumData& s, const TripodAssignment& trip, const CavitySpec& cav) {
    cav.validate();
    CavityCoherence out;
    const std::array<int, 4> idx = trip.indices();
    const char* names = "01ae";
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            const int k = idx[a], l = idx[b];
            const double w = std::abs(s.energies[k] - s.energies[l]);
            const double delta = std::min(std::abs(w - cav.omega_cav), w + cav.omega_cav);
            const double gn2 = cav.g * cav.g * std::norm(s.charge_elems(k, l));
            CavityTransition tr{a, b, std::numeric_limits<double>::infinity(), delta, std::sqrt(gn2) / delta};
            if (cav.kappa > 0 && gn2 > 0) tr.t1_s = delta * delta / (cav.kappa * gn2) * 1e-9;
            if (tr.dispersive_ratio > 0.1)
                out.warnings.push_back(fmt::format("transition {}{}: dispersive ratio {:.3f} exceeds 0.1", names[a],
                                                   names[b], tr.dispersive_ratio));
            out.t1.push_back(tr);
        }
    if (cav.kappa > 0 && cav.n_th > 0) out.t2_s = 1.0 / (cav.kappa * cav.n_th) * 1e-9;
    return out;
}

}  // namespace satd
