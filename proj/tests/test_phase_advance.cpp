#include "support.hpp"

#include "nuqutrit/phase_advance.hpp"

#include <gtest/gtest.h>

using namespace nuqutrit;

namespace {
GateSequence vacuum_circuit(double le) {
    return compile_circuit(OscillationParams::nufit51(), Scenario::vacuum, 0.0, Baseline::from_L_over_E(le));
}
}  // namespace

TEST(PhaseModel, OffResonantFrameAdvance) {
    const auto m = PhaseAdvanceModel::from_device(5.237, 4.897, 160.0, 0.222);
    EXPECT_NEAR(m.omega_off, wrap_phase(kTwoPi * (4.897 - 5.237) * 160.0 * 0.222), 1e-12);
}

TEST(PhaseModel, FirstGateUnaffected) {
    const auto m = PhaseAdvanceModel{0.4, 0.1};
    const auto adv = m.advances(vacuum_circuit(1000.0).gates);
    EXPECT_DOUBLE_EQ(adv.front(), 0.0);
}

TEST(PhaseModel, CompensationRestoresIdeal) {
    const auto m = PhaseAdvanceModel{0.482548632, 0.03};
    for (double le : {0.0, 4000.0, 25000.0}) {
        const GateSequence seq = vacuum_circuit(le);
        for (Flavor f : {Flavor::e, Flavor::mu, Flavor::tau}) {
            const Vector3r ideal = probabilities(apply_sequence(f, seq));
            const Vector3r run = probabilities(apply_sequence(f, apply_phase_advances(compensate(seq, m), m)));
            EXPECT_LT((ideal - run).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(PhaseModel, UncompensatedRunDeviates) {
    const auto m = PhaseAdvanceModel{0.482548632, 0.0};
    const GateSequence seq = vacuum_circuit(9000.0);
    const Vector3r ideal = probabilities(apply_sequence(Flavor::mu, seq));
    const Vector3r run = probabilities(apply_sequence(Flavor::mu, apply_phase_advances(seq, m)));
    EXPECT_GT((ideal - run).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(PhaseModel, VectorCompensationInvertsShift) {
    const GateSequence seq = vacuum_circuit(5000.0);
    const std::vector<double> phis{0.1, -0.2, 0.3, 0.4, -0.5};
    const GateSequence back = shift_axes(compensate(seq, phis), phis);
    for (std::size_t i = 0; i < seq.size(); ++i) EXPECT_NEAR(wrap_phase(back.gates[i].phi - seq.gates[i].phi), 0.0, 1e-15);
}

TEST(PhaseModel, ShiftRejectsWrongLength) {
    EXPECT_THROW(shift_axes(vacuum_circuit(0.0), {0.1}), std::invalid_argument);
}

TEST(Gauge, SixGateTemplateHasFivePhases) {
    EXPECT_EQ(predicted_phases(vacuum_circuit(100.0).gates, PhaseAdvanceModel{0.3, 0.0}).size(), 5u);
}

TEST(PhaseFit, RecoversFivePhasesFromExactData) {
    const std::vector<double> phis{-1.5312, -0.4341, 0.3, 0.2, -0.4005};
    const auto data = fixtures::phase_design(Scenario::vacuum, phis, 0, 0);
    const auto truth = canonical_gauge(data.front().ideal.gates, phis);
    EXPECT_LT(fixtures::max_phase_error(fit_phase_advances(data).phis, truth), 1e-6);
}

TEST(PhaseFit, RecoversFromSampledData) {
    const std::vector<double> phis{0.2, -0.1, 0.05, 0.4, -0.3};
    const auto data = fixtures::phase_design(Scenario::vacuum, phis, 8192 * 4, 9);
    const auto fit = fit_phase_advances(data);
    EXPECT_LT(fixtures::max_phase_error(fit.phis, canonical_gauge(data.front().ideal.gates, phis)), 0.05);
    EXPECT_GE(fit.log_likelihood, fit.ideal_log_likelihood);
}

TEST(PhaseFit, RejectsMixedPatterns) {
    auto data = fixtures::phase_design(Scenario::vacuum, std::vector<double>(5, 0.0), 0, 0, 4);
    auto cp = fixtures::phase_design(Scenario::cp, std::vector<double>(7, 0.0), 0, 0, 2);
    data.push_back(cp.front());
    EXPECT_THROW(fit_phase_advances(data), std::invalid_argument);
    EXPECT_THROW(fit_phase_advances({}), std::invalid_argument);
}
