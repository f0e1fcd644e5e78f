#pragma once

#include <memory>

#include "satd/circuit.hpp"

namespace fixtures {

// Reference parameter set, 18 levels, with flux dispersions. Built once per test binary.
inline std::shared_ptr<const satd::SpectrumData> reference_spectrum() {
    static const auto s = [] {
        const satd::CircuitSpec spec;
        auto p = std::make_shared<satd::SpectrumData>(satd::diagonalize(spec));
        p->flux_dispersion = satd::flux_dispersions(spec, p->basis_size, p->levels);
        return p;
    }();
    return s;
}

inline const satd::TripodAssignment& reference_tripod() {
    static const satd::TripodAssignment t = satd::assign_tripod(*reference_spectrum(), {1, 0, 2, 5});
    return t;
}

// Normalized Hermite functions psi_n(x) e^{x^2/2} at x, n = 0..n_max.
inline std::vector<double> hermite_functions(double x, int n_max) {
    std::vector<double> h(n_max + 1);
    h[0] = std::pow(satd::pi, -0.25);
    if (n_max > 0) h[1] = std::sqrt(2.0) * x * h[0];
    for (int n = 1; n < n_max; ++n) h[n + 1] = std::sqrt(2.0 / (n + 1)) * x * h[n] - std::sqrt(double(n) / (n + 1)) * h[n - 1];
    return h;
}

// Gauss-Hermite nodes (weight e^{-x^2}) from the Jacobi matrix; weights from the Christoffel
// sum, which stays accurate in the tails where eigenvector components underflow.
inline std::pair<satd::RVec, satd::RVec> gauss_hermite(int n) {
    satd::RMat j = satd::RMat::Zero(n, n);
    for (int k = 1; k < n; ++k) j(k, k - 1) = j(k - 1, k) = std::sqrt(k / 2.0);
    Eigen::SelfAdjointEigenSolver<satd::RMat> es(j, Eigen::EigenvaluesOnly);
    const satd::RVec x = es.eigenvalues();
    satd::RVec w(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (double h : hermite_functions(x[i], n - 1)) acc += h * h;
        w[i] = 1.0 / acc;
    }
    return {x, w};
}

}  // namespace fixtures
