#include "nuqutrit/pmns.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nuqutrit {

namespace {

double deg(double d) { return d * kPi / 180.0; }

Matrix3c propagate(const Matrix3c& mixing, double lam1, double lam2, double lam3, double l_over_e) {
    Matrix3c lam = Matrix3c::Zero();
    lam(0, 0) = std::exp(-kI * kPhasePerUnit * lam1 * l_over_e);
    lam(1, 1) = std::exp(-kI * kPhasePerUnit * lam2 * l_over_e);
    lam(2, 2) = std::exp(-kI * kPhasePerUnit * lam3 * l_over_e);
    return mixing * lam * mixing.adjoint();
}

}  // namespace

Flavor parse_flavor(std::string_view name) {
    if (name == "e" || name == "nue" || name == "0") return Flavor::e;
    if (name == "mu" || name == "numu" || name == "1") return Flavor::mu;
    if (name == "tau" || name == "nutau" || name == "2") return Flavor::tau;
    throw std::invalid_argument("unknown flavor: " + std::string(name));
}

std::string_view flavor_name(Flavor f) {
    switch (f) {
        case Flavor::e: return "e";
        case Flavor::mu: return "mu";
        case Flavor::tau: return "tau";
    }
    return "?";
}

OscillationParams OscillationParams::nufit51() {
    return {deg(33.45), deg(42.1), deg(8.62), 0.0, 7.42e-5, 2.510e-3};
}

OscillationParams MatterParams::effective(const OscillationParams& vacuum) const {
    OscillationParams p = vacuum;
    p.theta12 = theta12_hat;
    p.theta13 = theta13_hat;
    p.theta23 = theta23_hat;
    p.dm2_21 = dm2_21_hat;
    p.dm2_31 = dm2_31_hat;
    return p;
}

void Baseline::validate() const {
    if (!(E_GeV > 0.0)) throw std::domain_error("baseline energy must be positive");
    if (!(L_km >= 0.0)) throw std::domain_error("baseline distance must be non-negative");
}

std::array<Matrix3c, 3> pmns_factors(const OscillationParams& p) {
    const double c12 = std::cos(p.theta12), s12 = std::sin(p.theta12);
    const double c13 = std::cos(p.theta13), s13 = std::sin(p.theta13);
    const double c23 = std::cos(p.theta23), s23 = std::sin(p.theta23);
    const cplx ed = std::exp(kI * p.delta);

    Matrix3c r23;
    r23 << 1, 0, 0,
           0, c23, s23,
           0, -s23, c23;
    Matrix3c r13;
    r13 << c13, 0, s13 * std::conj(ed),
           0, 1, 0,
           -s13 * ed, 0, c13;
    Matrix3c r12;
    r12 << c12, s12, 0,
           -s12, c12, 0,
           0, 0, 1;
    return {r23, r13, r12};
}

Matrix3c build_pmns(const OscillationParams& p) {
    const double c12 = std::cos(p.theta12), s12 = std::sin(p.theta12);
    const double c13 = std::cos(p.theta13), s13 = std::sin(p.theta13);
    const double c23 = std::cos(p.theta23), s23 = std::sin(p.theta23);
    const cplx ed = std::exp(kI * p.delta);

    Matrix3c u;
    u(0, 0) = c12 * c13;
    u(0, 1) = s12 * c13;
    u(0, 2) = s13 * std::conj(ed);
    u(1, 0) = -s12 * c23 - c12 * s23 * s13 * ed;
    u(1, 1) = c12 * c23 - s12 * s23 * s13 * ed;
    u(1, 2) = s23 * c13;
    u(2, 0) = s12 * s23 - c12 * c23 * s13 * ed;
    u(2, 1) = -c12 * s23 - s12 * c23 * s13 * ed;
    u(2, 2) = c23 * c13;
    return u;
}

Matrix3c mass_matrix(const OscillationParams& p, double vm) {
    const Matrix3c u = build_pmns(p);
    Matrix3c d = Matrix3c::Zero();
    d(1, 1) = p.dm2_21;
    d(2, 2) = p.dm2_31;
    Matrix3c m = u * d * u.adjoint();
    m(0, 0) += vm;
    return m;
}

Matrix3c build_hamiltonian(const OscillationParams& p, double vm, double E_GeV) {
    if (!(E_GeV > 0.0)) throw std::domain_error("energy must be positive");
    return (kPhasePerUnit / E_GeV) * mass_matrix(p, vm);
}

MatterParams matter_effective_params(const OscillationParams& p, double vm) {
    if (!(vm >= 0.0 && vm <= kMaxMatterPotential))
        throw std::domain_error("matter potential outside the validated range [0, 1e-2] eV^2");

    MatterParams m;
    m.vm = vm;
    const double c2_12 = std::cos(2.0 * p.theta12);
    const double c2_13 = std::cos(2.0 * p.theta13);
    const double s2_12 = std::sin(2.0 * p.theta12);
    const double s2_13 = std::sin(2.0 * p.theta13);
    const double c12sq = std::pow(std::cos(p.theta12), 2);
    const double s12sq = std::pow(std::sin(p.theta12), 2);

    m.dm2_ee = c12sq * p.dm2_31 + s12sq * p.dm2_32();
    m.dm2_ee_hat = m.dm2_ee * std::sqrt(std::pow(c2_13 - vm / m.dm2_ee, 2) + s2_13 * s2_13);
    m.a12 = 0.5 * (vm + m.dm2_ee - m.dm2_ee_hat);

    const double s13_hat_sq = 0.5 - (m.dm2_ee * c2_13 - vm) / (2.0 * m.dm2_ee_hat);
    m.theta13_hat = std::asin(std::sqrt(std::clamp(s13_hat_sq, 0.0, 1.0)));

    const double cdiff = std::cos(p.theta13 - m.theta13_hat);
    m.dm2_21_hat = p.dm2_21 * std::sqrt(std::pow(c2_12 - m.a12 / p.dm2_21, 2) + cdiff * cdiff * s2_12 * s2_12);

    const double s12_hat_sq = 0.5 - (p.dm2_21 * c2_12 - m.a12) / (2.0 * m.dm2_21_hat);
    m.theta12_hat = std::asin(std::sqrt(std::clamp(s12_hat_sq, 0.0, 1.0)));
    m.theta23_hat = p.theta23;

    m.dm2_31_hat = p.dm2_31 + 0.25 * vm + 0.5 * (m.dm2_21_hat - p.dm2_21) +
                   0.75 * (m.dm2_ee_hat - m.dm2_ee);
    return m;
}

EvolutionPhases evolution_phases(const OscillationParams& p, const Baseline& b) {
    b.validate();
    const double k = kPhasePerUnit * b.L_over_E();
    return {-p.dm2_21 * k, -p.dm2_32() * k};
}

EvolutionPhases evolution_phases(const MatterParams& m, const Baseline& b) {
    b.validate();
    const double k = kPhasePerUnit * b.L_over_E();
    return {-m.dm2_21_hat * k, -(m.dm2_31_hat - m.dm2_21_hat) * k};
}

Matrix3c evolution_operator(const OscillationParams& p, const Baseline& b) {
    const EvolutionPhases ph = evolution_phases(p, b);
    const Matrix3c u = build_pmns(p);
    Matrix3c lam = Matrix3c::Zero();
    lam(0, 0) = 1.0;
    lam(1, 1) = std::exp(kI * ph.phi01);
    lam(2, 2) = std::exp(kI * (ph.phi01 + ph.phi12));
    return u * lam * u.adjoint();
}

Matrix3r oscillation_matrix(const OscillationParams& p, double vm, const Baseline& b) {
    if (vm == 0.0) return transition_probabilities(evolution_operator(p, b));
    const MatterParams m = matter_effective_params(p, vm);
    return transition_probabilities(evolution_operator(m.effective(p), b));
}

double oscillation_probability(const OscillationParams& p, double vm, Flavor alpha, Flavor beta,
                               const Baseline& b) {
    return oscillation_matrix(p, vm, b)(static_cast<int>(beta), static_cast<int>(alpha));
}

Matrix3r exact_matter_matrix(const OscillationParams& p, double vm, const Baseline& b) {
    b.validate();
    const Matrix3c m = mass_matrix(p, vm);
    Eigen::SelfAdjointEigenSolver<Matrix3c> es(m);
    if (es.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge", 0.0);

    const Matrix3c v = es.eigenvectors();
    const Vector3r w = es.eigenvalues();
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    double residual = 0.0;
    for (int k = 0; k < 3; ++k) residual = std::max(residual, (m * v.col(k) - w(k) * v.col(k)).norm());
    if (residual > 1e-12 * scale) throw NumericError("eigen-decomposition residual above tolerance", residual);

    return transition_probabilities(propagate(v, w(0), w(1), w(2), b.L_over_E()));
}

double exact_matter_oracle(const OscillationParams& p, double vm, const Baseline& b, Flavor alpha,
                           Flavor beta) {
    return exact_matter_matrix(p, vm, b)(static_cast<int>(beta), static_cast<int>(alpha));
}

}  // namespace nuqutrit
