#pragma once

#include "nuqutrit/decomposition.hpp"
#include "nuqutrit/pmns.hpp"

#include <cstdint>
#include <vector>

namespace nuqutrit {

/// Frame slips picked up by idle transitions. Every pulse advances the {12} frame by omega_off;
/// every {12} pulse advances the {01} frame by stark01. A gate's axis is shifted by the register
/// of its subspace at the moment it starts, so the first gate is never affected.
struct PhaseAdvanceModel {
    double omega_off = 0.0;
    double stark01 = 0.0;

    /// omega_off = 2 pi (f12 - f01) Td, wrapped to (-pi, pi].
    static PhaseAdvanceModel from_device(double f01_ghz, double f12_ghz, double td_dt, double dt_ns);

    /// One entry per gate, entry 0 always zero.
    std::vector<double> advances(const std::vector<GivensGate>& gates) const;
};

/// Adds phis[i] to the axis of gate i + 1 (phis has one entry per gate after the first).
GateSequence shift_axes(const GateSequence& seq, const std::vector<double>& phis);

/// The sequence the hardware actually executes when asked for seq.
GateSequence apply_phase_advances(const GateSequence& seq, const PhaseAdvanceModel& model);

/// Pre-distorts seq so that apply_phase_advances(compensate(seq)) acts as seq.
GateSequence compensate(const GateSequence& seq, const PhaseAdvanceModel& model);
GateSequence compensate(const GateSequence& seq, const std::vector<double>& phis);

/// Phase vector (one per gate after the first) predicted by the model.
std::vector<double> predicted_phases(const std::vector<GivensGate>& gates, const PhaseAdvanceModel& model);

/// A common axis shift of every gate in one subspace commutes through the other subspace and
/// is unobservable in populations. For a subspace not containing gate 0, phases are expressed
/// relative to its first gate, which is then pinned at zero.
std::vector<double> canonical_gauge(const std::vector<GivensGate>& gates, const std::vector<double>& phis);

struct PhaseObservation {
    GateSequence ideal;   // the sequence that was requested
    Flavor initial = Flavor::e;
    Vector3r counts;      // outcome counts; scaled probabilities are accepted
};

struct PhaseFitOptions {
    int random_starts = 12;
    int refined_starts = 4;
    std::uint64_t seed = 0x5eed;
};

struct PhaseFitResult {
    std::vector<double> phis;         // canonical gauge, one per gate after the first
    std::vector<double> uncertainty;  // one standard deviation from the curvature; 0 for gauge-pinned entries
    double log_likelihood = 0.0;
    double ideal_log_likelihood = 0.0;  // with every phase at zero
    int evaluations = 0;
};

/// Multinomial maximum-likelihood estimate of the per-gate phase advances. All observations
/// must share one subspace pattern.
PhaseFitResult fit_phase_advances(const std::vector<PhaseObservation>& data, const PhaseFitOptions& opts = {});

double phase_log_likelihood(const std::vector<PhaseObservation>& data, const std::vector<double>& phis);

}  // namespace nuqutrit
