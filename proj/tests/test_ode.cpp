#include <doctest.h>

#include <cmath>

#include "satd/ode.hpp"

using namespace satd;

TEST_CASE("dopri5 integrates a rotating phasor and reports at requested times") {
    const double w = 3.0;
    CVec y(1);
    y[0] = 1.0;
    std::vector<double> outs{0.0, 0.5, 1.7, 10.0};
    std::vector<double> seen;
    double worst = 0.0;
    ode::Options o;
    o.rel_tol = 1e-10;
    o.abs_tol = 1e-12;
    const ode::Stats st = ode::dopri5([&](double, const CVec& a, CVec& b) { b = cplx(0, -w) * a; }, 0.0, 10.0, y, o,
                                      outs, [&](double t, const CVec& a) {
                                          seen.push_back(t);
                                          worst = std::max(worst, std::abs(a[0] - std::polar(1.0, -w * t)));
                                      });
    CHECK(seen == outs);
    CHECK(worst < 1e-8);
    CHECK(std::abs(y[0] - std::polar(1.0, -w * 10.0)) < 1e-8);
    CHECK(st.accepted > 0);
    CHECK(st.rhs_evals >= 6 * st.accepted);
}

TEST_CASE("dopri5 error shrinks with tolerance") {
    auto run = [](double tol) {
        CVec y(2);
        y << 1.0, 0.0;
        ode::Options o;
        o.rel_tol = tol;
        o.abs_tol = tol * 1e-2;
        // harmonic oscillator x'' = -x
        ode::dopri5([](double, const CVec& a, CVec& b) { b.resize(2); b << a[1], -a[0]; }, 0.0, 20.0, y, o, {}, {});
        return std::abs(y[0] - std::cos(20.0));
    };
    const double e6 = run(1e-6), e10 = run(1e-10);
    CHECK(e6 < 1e-4);
    CHECK(e10 < 1e-8);
    CHECK(e10 < e6);
}

TEST_CASE("dopri5 honours max_step and rejects bad input") {
    CVec y(1);
    y[0] = 1.0;
    ode::Options o;
    o.max_step = 0.01;
    const ode::Stats st = ode::dopri5([](double, const CVec& a, CVec& b) { b = -a; }, 0.0, 1.0, y, o, {}, {});
    CHECK(st.accepted >= 100);
    CHECK(y[0].real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));

    ode::Options bad;
    bad.rel_tol = 1e-2;
    CHECK_THROWS_AS(ode::dopri5([](double, const CVec& a, CVec& b) { b = a; }, 0.0, 1.0, y, bad, {}, {}), Error);

    ode::Options ok;
    CHECK_THROWS_AS(ode::dopri5([](double, const CVec& a, CVec& b) { b = a * NAN; }, 0.0, 1.0, y, ok, {}, {}), Error);
}
