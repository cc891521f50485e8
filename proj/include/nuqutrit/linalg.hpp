#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nuqutrit {

using cplx = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;
using Vector3c = Eigen::Vector3cd;
using Matrix3r = Eigen::Matrix3d;
using Vector3r = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Raised when an iterative numerical procedure fails to reach its tolerance.
/// Carries the best objective value found so callers can report it.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double best_residual)
        : std::runtime_error(what), best_residual_(best_residual) {}
    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

/// Maps an angle into (-pi, pi].
inline double wrap_phase(double phi) {
    double r = std::remainder(phi, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    return r;
}

inline double max_abs(const Matrix3c& m) { return m.cwiseAbs().maxCoeff(); }

inline double unitarity_defect(const Matrix3c& m) {
    return max_abs(m.adjoint() * m - Matrix3c::Identity());
}

inline double hermiticity_defect(const Matrix3c& m) { return max_abs(m - m.adjoint()); }

inline bool is_unitary(const Matrix3c& m, double tol = 1e-12) { return unitarity_defect(m) < tol; }
inline bool is_hermitian(const Matrix3c& m, double tol = 1e-12) { return hermiticity_defect(m) < tol; }

/// Largest modulus among off-diagonal entries.
inline double offdiag_max(const Matrix3c& m) {
    double r = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) r = std::max(r, std::abs(m(i, j)));
    return r;
}

/// |m(i,j)|^2 for every entry; column j is the outcome distribution for input basis state j.
inline Matrix3r transition_probabilities(const Matrix3c& m) { return m.cwiseAbs2(); }

}  // namespace nuqutrit
