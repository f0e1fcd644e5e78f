#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace satd {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// Internal units: angular frequency in rad/ns, time in ns, hbar = 1.
inline constexpr double ghz_to_rad_ns(double f_ghz) { return two_pi * f_ghz; }
inline constexpr double rad_ns_to_ghz(double w) { return w / two_pi; }

// k_B / h in GHz per mK.
inline constexpr double kb_over_h_ghz_per_mk = 0.020836619;

// Failures carry the module that raised them so CLI errors point somewhere useful.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}
    const std::string& module() const { return module_; }

private:
    std::string module_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error("circuit", what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

}  // namespace satd
