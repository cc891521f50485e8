#pragma once

#include "nuqutrit/decomposition.hpp"
#include "nuqutrit/linalg.hpp"
#include "nuqutrit/pmns.hpp"
#include "nuqutrit/rng.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace nuqutrit {

struct QutritState {
    Vector3c amplitudes = Vector3c(1.0, 0.0, 0.0);

    static QutritState basis(int level);
    static QutritState flavor(Flavor f) { return basis(static_cast<int>(f)); }
    double norm() const { return amplitudes.norm(); }
};

QutritState apply_gate(const QutritState& s, const GivensGate& g);
QutritState apply_sequence(const QutritState& s, const std::vector<GivensGate>& gates);
QutritState apply_sequence(Flavor initial, const GateSequence& seq);

Vector3r probabilities(const QutritState& s);

struct ShotCounts {
    std::array<std::uint64_t, 3> n{0, 0, 0};
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;

    Vector3r frequencies() const;
    bool operator==(const ShotCounts&) const = default;
};

/// Multinomial draw by sequential conditional binomials; probabilities are clipped at 0 and renormalized.
ShotCounts sample_counts(const Vector3r& probs, std::uint64_t shots, std::uint64_t seed);
std::array<std::uint64_t, 3> draw_multinomial(const Vector3r& probs, std::uint64_t shots, Rng& rng);

/// A(i, j) = P(classified i | prepared j). Columns sum to one.
struct ConfusionMatrix {
    Matrix3r a = Matrix3r::Identity();

    static ConfusionMatrix identity() { return {}; }
    /// Diagonal (0.985, 0.943, 0.945) with the remaining mass of each column leaning toward adjacent levels.
    static ConfusionMatrix reference();
    static ConfusionMatrix from_accuracies(const Vector3r& diag);

    void validate() const;
    double condition_number() const;
    Vector3r apply(const Vector3r& p) const { return a * p; }
};

/// Classify ideal outcomes through A and sample: the count distribution is multinomial(shots, A p).
ShotCounts apply_confusion(const Vector3r& probs, const ConfusionMatrix& cm, std::uint64_t shots,
                           std::uint64_t seed);
/// Reassign already-sampled true outcomes: n_j shots of level j go to multinomial(n_j, A[:, j]).
ShotCounts apply_confusion(const ShotCounts& counts, const ConfusionMatrix& cm, std::uint64_t seed);

struct MitigationResult {
    Vector3r probabilities;  // clipped to the simplex and renormalized
    Vector3r raw;            // A^{-1} f before clipping
    double condition = 1.0;
    bool clipped = false;
    bool ill_conditioned = false;  // condition number above 1e6
};

MitigationResult mitigate(const Vector3r& frequencies, const ConfusionMatrix& cm);

inline constexpr double kIllConditioned = 1e6;

/// Coherent and incoherent gate errors for density-matrix execution.
struct GateErrorModel {
    double under_rotation = 0.0;   // epsilon; every angle is scaled by (1 - epsilon/pi)
    double decay_rate_hz = 0.0;    // depolarizing probability per gate q = 1 - exp(-2 pi decay Td)
    double gate_duration_s = 160 * 0.222e-9;

    double depolarizing_probability() const;
};

/// Runs the sequence as a noisy channel on the density matrix of the initial basis state.
Matrix3c inject_gate_errors(const GateSequence& seq, Flavor initial, const GateErrorModel& model);
Matrix3c inject_gate_errors(const std::vector<GivensGate>& gates, const Matrix3c& rho0, const GateErrorModel& model);

Vector3r density_probabilities(const Matrix3c& rho);

}  // namespace nuqutrit
