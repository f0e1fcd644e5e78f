#include "satd/power.hpp"

#include <cmath>

#include <fmt/format.h>

namespace satd {

namespace {

template <class F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50);
}

}  // namespace

double omega_rms(double t_g, double omega0) {
    if (!(t_g > 0) || !(omega0 > 0)) throw Error("power", "t_g and omega0 must be positive");
    const double w2 = 0.25 * omega0 * omega0;
    auto integrand = [&](double t) {
        const ThetaSchedule th = schedule_theta(t, t_g);
        const double x = th.ddtheta / (th.dtheta * th.dtheta + w2);
        return 1.0 + x * x;
    };
    // The integrand is at least 1, so an absolute tolerance scaled by t_g is a relative one.
    const double tol = 1e-11 * t_g;
    const double mean = (adaptive_simpson(integrand, 0.0, 0.5 * t_g, tol) +
                         adaptive_simpson(integrand, 0.5 * t_g, t_g, tol)) / t_g;
    return omega0 * std::sqrt(mean);
}

OmegaOptimum optimize_omega0(double t_g) {
    if (!(t_g > 0)) throw Error("power", "t_g must be positive");
    auto f = [&](double x) { return omega_rms(t_g, two_pi * x / t_g) * t_g / two_pi; };
    const double lo = 0.5, hi = 4.0;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-4) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    const double fx = f(x);
    if (!(fx < f(lo)) || !(fx < f(hi)))
        throw Error("power", "omega0 optimum sits on the bracket edge");
    return {two_pi * x / t_g, two_pi * fx / t_g, x, fx};
}

double v_rms(const DriveSignal& s, int samples_per_period) {
    const double wmax = s.max_carrier();
    if (!(wmax > 0)) throw Error("power", "signal has no carrier");
    const double period = two_pi / wmax;
    int n = int(std::ceil(s.t_total / period * samples_per_period));
    n += n % 2;  // even interval count for Simpson
    const double h = s.t_total / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double v = lab_voltage(s, i * h);
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * v * v;
    }
    return std::sqrt(acc * h / 3.0 / s.t_total);
}

double v_rms_closed_form(const TripodAssignment& trip, double alpha, double om_rms) {
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double w = ca * ca / std::norm(trip.n_je[0]) + sa * sa / std::norm(trip.n_je[1]) + 1.0 / std::norm(trip.n_je[2]);
    return 0.5 * om_rms * std::sqrt(w);
}

double v_rms_direct_closed_form(cplx n01, double chi, double t_g) {
    return std::sqrt(3.0) * std::abs(chi) / (2.0 * std::abs(n01) * t_g);
}

DdSatdComparison compare_dd_satd(const SpectrumData& s, const TripodAssignment& trip, double alpha, double chi) {
    const double t_ref = 1.0;
    const OmegaOptimum opt = optimize_omega0(t_ref);
    DdSatdComparison c;
    c.c_satd = v_rms_closed_form(trip, alpha, opt.omega_rms) * t_ref;
    c.c_dd = v_rms_direct_closed_form(s.charge_elems(trip.idx0, trip.idx1), chi, t_ref) * t_ref;
    c.ratio = c.c_dd / c.c_satd;
    return c;
}

double photon_constrained_min_tg(double g, double n_cav_max, double c_vrms_tg) {
    if (!(g > 0)) throw Error("power", "g must be positive");
    if (!(n_cav_max > 0) || !(n_cav_max < 1)) throw Error("power", "n_cav_max must lie in (0, 1)");
    return c_vrms_tg / (g * std::sqrt(2.0 * n_cav_max));
}

}  // namespace satd
