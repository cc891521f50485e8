#pragma once

#include "nuqutrit/linalg.hpp"
#include "nuqutrit/pmns.hpp"

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace nuqutrit {

enum class Subspace : int { s01 = 0, s12 = 1 };

std::string_view subspace_name(Subspace s);
Subspace parse_subspace(std::string_view s);

/// Rotation exp[-i theta/2 (sigma_x cos phi + sigma_y sin phi)] restricted to one two-level subspace.
struct GivensGate {
    Subspace subspace = Subspace::s01;
    double phi = 0.0;    // axis phase, kept in (-pi, pi]
    double theta = 0.0;  // rotation angle

    static GivensGate make(Subspace s, double phi, double theta);
    bool operator==(const GivensGate&) const = default;
};

enum class Scenario { vacuum, matter, cp };

std::string_view scenario_name(Scenario s);
Scenario parse_scenario(std::string_view s);

/// Sign choices for the alpha angles. The defining relations only fix cos(alpha/2).
struct AlphaAngles {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;
    int sign1 = 1;
    int sign2 = 1;
    int sign3 = 1;
    bool degenerate = false;  // theta13 = theta23 = 0: alpha1, alpha3 set to zero
};

/// Ordered gates in application order: gates.front() acts first on the state.
struct GateSequence {
    std::vector<GivensGate> gates;
    Scenario scenario = Scenario::vacuum;
    AlphaAngles alphas;
    OscillationParams source;
    double vm = 0.0;

    std::size_t size() const { return gates.size(); }
    bool empty() const { return gates.empty(); }
};

struct Decomposition {
    GateSequence r;      // the mixing action
    GateSequence r_dag;  // its inverse, applied before evolution
};

Matrix3c givens_matrix(const GivensGate& g);

AlphaAngles solve_alphas(double theta12, double theta23, double theta13);
AlphaAngles solve_alphas(const OscillationParams& p);
AlphaAngles solve_alphas(const MatterParams& m);

/// Compiles the mixing matrix (vacuum, matter-effective, or with CP phase) into Givens sequences.
/// matter requires delta == 0; cp accepts vm >= 0 and then uses matter-effective angles.
Decomposition decompose(const OscillationParams& p, Scenario scenario, double vm = 0.0);

/// Joins R^dagger, the evolution phases, and R into one circuit. The evolution enters as an
/// axis shift of -phi01 on every {01} gate and -phi12 on every {12} gate of R, which realizes
/// U diag(1, e^{i phi01}, e^{i(phi01+phi12)}) U^dagger. Vacuum and matter circuits fuse the
/// same-axis {01} pairs inside R and inside R^dagger (6 gates); cp circuits keep all 8.
GateSequence insert_evolution(const GateSequence& r, const GateSequence& r_dag, double phi01, double phi12,
                              Scenario scenario);

/// Convenience: decompose + evolution phases at one baseline.
GateSequence compile_circuit(const OscillationParams& p, Scenario scenario, double vm, const Baseline& b);

/// Adjacent gates sharing subspace and axis are fused by angle addition.
GateSequence merge_same_axis(const GateSequence& seq, double axis_tol = 1e-15);

/// Product of gate matrices; the first listed gate is the rightmost factor.
Matrix3c reconstruct(const GateSequence& seq);
Matrix3c reconstruct(const std::vector<GivensGate>& gates);

/// max |offdiag(U reconstruct(seq)^dagger)|; below 1e-10 certifies U = X0 reconstruct(seq)
/// for a diagonal unitary X0.
double verify_decomposition(const Matrix3c& u, const GateSequence& seq);
double verify_decomposition(const Matrix3c& u, const std::vector<GivensGate>& gates);

struct FitDecompositionResult {
    AlphaAngles alphas;
    Vector3r axes;             // phi of the three rotations R01 R12 R01
    Vector3r diagonal_phases;  // X0 = diag(e^{i chi_k})
    double objective = 0.0;    // ||X0 R - U||_F
    int restarts = 0;
};

/// Least-squares factorization U = X0 R01_{phi1}(a1) R12_{phi2}(a2) R01_{phi3}(a3). With fixed axes the
/// phis are pinned to (pi/2, 3pi/2, pi/2).
FitDecompositionResult fit_decomposition(const Matrix3c& u, bool free_axes = false);

struct ScheduleDuration {
    std::size_t gates = 0;
    std::size_t pulses_merged = 0;
    double unmerged_dt = 0.0;
    double merged_dt = 0.0;
    double reported_qutrit_dt = 640.0;
    double reported_qubit_dt = 12224.0;
    bool matches_reported = false;
};

/// Merging rule: adjacent gates in the same subspace are realized as a single physical pulse,
/// the axis difference being absorbed by frame changes.
ScheduleDuration schedule_duration(const GateSequence& seq, double td_dt);

}  // namespace nuqutrit
