#include "satd/ode.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace satd::ode {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double error_norm(const CVec& err, const CVec& y0, const CVec& y1, const Options& o) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = o.abs_tol + o.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        acc += std::norm(err[i]) / (sc * sc);
    }
    return std::sqrt(acc / double(err.size()));
}

}  // namespace

Stats dopri5(const Rhs& f, double t0, double t1, CVec& y, const Options& opt, const std::vector<double>& out_times,
             const Observer& observer) {
    if (!(opt.rel_tol > 0) || opt.rel_tol > 1e-3 || !(opt.abs_tol > 0) || opt.abs_tol > 1e-3)
        throw Error("propagator", "tolerances must lie in (0, 1e-3]");
    const Eigen::Index n = y.size();
    CVec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
    CVec r1(n), r2(n), r3(n), r4(n), r5(n);
    Stats st;
    const double span = t1 - t0;
    const double hmax = opt.max_step > 0 ? opt.max_step : span;

    size_t next_out = 0;
    auto emit_until = [&](double t_hi, bool dense, double t_lo, double h) {
        while (next_out < out_times.size() && out_times[next_out] <= t_hi + 1e-12 * std::abs(span)) {
            const double to = out_times[next_out];
            if (!dense || to <= t_lo) {
                observer(to, y);
            } else {
                const double th = (to - t_lo) / h, th1 = 1.0 - th;
                ytmp = r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
                observer(to, ytmp);
            }
            ++next_out;
        }
    };
    if (observer) emit_until(t0, false, t0, 0.0);

    double t = t0;
    f(t, y, k1);
    ++st.rhs_evals;
    double h = opt.first_step;
    if (!(h > 0)) {
        // Initial step from the size of the derivative.
        double d0 = 0, d1n = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sc = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
            d0 += std::norm(y[i]) / (sc * sc);
            d1n += std::norm(k1[i]) / (sc * sc);
        }
        d0 = std::sqrt(d0 / n);
        d1n = std::sqrt(d1n / n);
        h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        h = std::min({h, hmax, span});
    }

    const double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9;
    const double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;
    double facold = 1e-4;
    bool last = false;
    bool reject = false;

    while (true) {
        if (st.accepted + st.rejected > opt.max_steps) throw Error("propagator", "step budget exhausted");
        if (t + 1.01 * h >= t1) {
            h = t1 - t;
            last = true;
        }
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw Error("propagator", fmt::format("step size underflow at t = {:.9g} ns", t));

        ytmp = y + h * a21 * k1;
        f(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        f(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        f(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        f(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        f(t + h, ytmp, k6);
        ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        f(t + h, ynew, k7);
        st.rhs_evals += 6;
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double e = error_norm(err, y, ynew, opt);
        if (!std::isfinite(e)) throw Error("propagator", fmt::format("non-finite state at t = {:.9g} ns", t));

        const double fac11 = std::pow(e, expo1);
        double fac = fac11 / std::pow(facold, beta);
        fac = std::max(facc2, std::min(facc1, fac / safe));
        double hnew = h / fac;

        if (e <= 1.0) {
            facold = std::max(e, 1e-4);
            ++st.accepted;
            if (observer && next_out < out_times.size() && out_times[next_out] <= t + h + 1e-12 * std::abs(span)) {
                r1 = y;
                r2 = ynew - y;
                r3 = h * k1 - r2;
                r4 = r2 - h * k7 - r3;
                r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                emit_until(t + h, true, t, h);
            }
            y.swap(ynew);
            k1.swap(k7);
            t += h;
            if (last) break;
            hnew = std::min(hnew, hmax);
            if (reject) hnew = std::min(hnew, h);
            reject = false;
        } else {
            hnew = h / std::min(facc1, fac11 / safe);
            reject = true;
            last = false;
            ++st.rejected;
        }
        h = hnew;
    }
    return st;
}

}  // namespace satd::ode
