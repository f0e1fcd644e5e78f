#pragma once

#include <functional>
#include <vector>

#include "satd/common.hpp"

namespace satd::ode {

using Rhs = std::function<void(double t, const CVec& y, CVec& dy)>;
using Observer = std::function<void(double t, const CVec& y)>;

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0;   // 0 = unbounded
    double first_step = 0.0; // 0 = automatic
    long max_steps = 200'000'000;
};

struct Stats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
};

// Dormand-Prince 5(4) with PI step control and the 4th-order continuous extension used to
// report the solution at the requested output times (which must be sorted and lie in [t0, t1]).
Stats dopri5(const Rhs& f, double t0, double t1, CVec& y, const Options& opt,
             const std::vector<double>& out_times, const Observer& observer);

}  // namespace satd::ode
