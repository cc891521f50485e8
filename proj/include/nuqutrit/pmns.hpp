#pragma once

#include "nuqutrit/linalg.hpp"

#include <array>
#include <string>
#include <string_view>

namespace nuqutrit {

/// Oscillation phase bookkeeping: dm2[eV^2] * L[km] / (2 E[GeV]) expressed in radians
/// is kPhasePerUnit * dm2 * L / E.
inline constexpr double kPhasePerUnit = 2.0 * 1.26693;

/// Validity window of the matter-effective approximation, in eV^2.
inline constexpr double kMaxMatterPotential = 1e-2;

enum class Flavor : int { e = 0, mu = 1, tau = 2 };

Flavor parse_flavor(std::string_view name);
std::string_view flavor_name(Flavor f);

struct OscillationParams {
    double theta12 = 0.0;  // rad
    double theta23 = 0.0;
    double theta13 = 0.0;
    double delta = 0.0;
    double dm2_21 = 0.0;  // eV^2
    double dm2_31 = 0.0;

    double dm2_32() const { return dm2_31 - dm2_21; }

    /// Normal-ordering global-fit values used throughout the reproduction runs.
    static OscillationParams nufit51();
};

struct MatterParams {
    double vm = 0.0;
    double theta12_hat = 0.0;
    double theta13_hat = 0.0;
    double theta23_hat = 0.0;
    double dm2_21_hat = 0.0;
    double dm2_31_hat = 0.0;
    double dm2_ee = 0.0;
    double dm2_ee_hat = 0.0;
    double a12 = 0.0;

    /// Vacuum parameters with the mixing angles and splittings replaced by their hatted values.
    OscillationParams effective(const OscillationParams& vacuum) const;
};

/// Propagation distance and energy. Only L/E enters the phases.
struct Baseline {
    double L_km = 0.0;
    double E_GeV = 1.0;

    static Baseline from_L_over_E(double l_over_e) { return {l_over_e, 1.0}; }
    double L_over_E() const { return L_km / E_GeV; }
    void validate() const;
};

struct EvolutionPhases {
    double phi01 = 0.0;
    double phi12 = 0.0;
};

Matrix3c build_pmns(const OscillationParams& p);

/// The three factors R23 * R13(delta) * R12 whose product is build_pmns(p).
std::array<Matrix3c, 3> pmns_factors(const OscillationParams& p);

/// U diag(0, dm2_21, dm2_31) U^dagger + diag(vm, 0, 0) in eV^2, i.e. 2E times the Hamiltonian.
Matrix3c mass_matrix(const OscillationParams& p, double vm);

/// Hamiltonian in rad/km for energy E in GeV, so that exp(-i H L) with L in km is the propagator.
Matrix3c build_hamiltonian(const OscillationParams& p, double vm, double E_GeV);

MatterParams matter_effective_params(const OscillationParams& p, double vm);

EvolutionPhases evolution_phases(const OscillationParams& p, const Baseline& b);
EvolutionPhases evolution_phases(const MatterParams& m, const Baseline& b);

/// U diag(1, e^{i phi01}, e^{i (phi01 + phi12)}) U^dagger.
Matrix3c evolution_operator(const OscillationParams& p, const Baseline& b);

/// P(alpha -> beta). Uses matter-effective parameters when vm > 0.
double oscillation_probability(const OscillationParams& p, double vm, Flavor alpha, Flavor beta,
                               const Baseline& b);

/// All nine transition probabilities; entry (beta, alpha).
Matrix3r oscillation_matrix(const OscillationParams& p, double vm, const Baseline& b);

/// Exact propagation through the diagonalized full Hamiltonian, entry (beta, alpha).
Matrix3r exact_matter_matrix(const OscillationParams& p, double vm, const Baseline& b);

double exact_matter_oracle(const OscillationParams& p, double vm, const Baseline& b, Flavor alpha,
                           Flavor beta);

}  // namespace nuqutrit
