#include "nuqutrit/vm.hpp"

#include <gtest/gtest.h>

using namespace nuqutrit;

namespace {
GateSequence sample_sequence() {
    return compile_circuit(OscillationParams::nufit51(), Scenario::vacuum, 0.0, Baseline::from_L_over_E(7000.0));
}
}  // namespace

TEST(Vm, GatesPreserveNorm) {
    QutritState s = QutritState::flavor(Flavor::mu);
    s = apply_sequence(s, sample_sequence().gates);
    EXPECT_NEAR(s.norm(), 1.0, 1e-14);
}

TEST(Vm, SingleGateMatchesMatrix) {
    const GivensGate g = GivensGate::make(Subspace::s12, 0.8, 2.1);
    const QutritState s = apply_gate(QutritState::basis(1), g);
    EXPECT_LT((s.amplitudes - givens_matrix(g).col(1)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Vm, SequenceMatchesReconstruct) {
    const GateSequence seq = sample_sequence();
    const QutritState s = apply_sequence(QutritState::basis(2), seq.gates);
    EXPECT_LT((s.amplitudes - reconstruct(seq).col(2)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Vm, BasisRejectsBadLevel) { EXPECT_THROW(QutritState::basis(3), std::invalid_argument); }

TEST(Sampling, DeterministicPerSeed) {
    const Vector3r p(0.2, 0.5, 0.3);
    EXPECT_EQ(sample_counts(p, 8192, 42), sample_counts(p, 8192, 42));
    EXPECT_NE(sample_counts(p, 8192, 42).n, sample_counts(p, 8192, 43).n);
}

TEST(Sampling, CountsSumToShotsAndConverge) {
    const Vector3r p(0.2, 0.5, 0.3);
    const ShotCounts c = sample_counts(p, 1'000'000, 7);
    EXPECT_EQ(c.n[0] + c.n[1] + c.n[2], 1'000'000u);
    EXPECT_LT((c.frequencies() - p).cwiseAbs().maxCoeff(), 2e-3);
}

TEST(Sampling, ZeroProbabilityNeverSampled) {
    const ShotCounts c = sample_counts(Vector3r(1.0, 0.0, 0.0), 1000, 1);
    EXPECT_EQ(c.n[0], 1000u);
}

TEST(Confusion, ReferenceIsColumnStochastic) {
    const ConfusionMatrix c = ConfusionMatrix::reference();
    EXPECT_NO_THROW(c.validate());
    EXPECT_DOUBLE_EQ(c.a(0, 0), 0.985);
    EXPECT_DOUBLE_EQ(c.a(1, 1), 0.943);
    EXPECT_DOUBLE_EQ(c.a(2, 2), 0.945);
}

TEST(Confusion, ValidateRejectsBadColumns) {
    ConfusionMatrix c;
    c.a(0, 0) = 0.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Mitigation, IdentityLeavesFrequencies) {
    const Vector3r f(0.1, 0.6, 0.3);
    const MitigationResult m = mitigate(f, ConfusionMatrix::identity());
    EXPECT_LT((m.probabilities - f).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_FALSE(m.clipped);
}

TEST(Mitigation, InvertsConfusionExactly) {
    const ConfusionMatrix c = ConfusionMatrix::reference();
    const Vector3r p(0.25, 0.45, 0.30);
    EXPECT_LT((mitigate(c.apply(p), c).probabilities - p).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Mitigation, ClipsNegativeEstimates) {
    const MitigationResult m = mitigate(Vector3r(1.0, 0.0, 0.0), ConfusionMatrix::reference());
    EXPECT_TRUE(m.clipped);
    EXPECT_GE(m.probabilities.minCoeff(), 0.0);
    EXPECT_NEAR(m.probabilities.sum(), 1.0, 1e-15);
}

TEST(Mitigation, FlagsIllConditionedMatrix) {
    ConfusionMatrix c;
    c.a << 0.5, 0.5, 0.0,
           0.5, 0.5 - 1e-9, 0.0,
           0.0, 1e-9, 1.0;
    EXPECT_TRUE(mitigate(Vector3r(0.3, 0.3, 0.4), c).ill_conditioned);
}

TEST(Confusion, ReassignedCountsFollowColumns) {
    ShotCounts truth;
    truth.n = {0, 1'000'000, 0};
    truth.shots = 1'000'000;
    const ShotCounts c = apply_confusion(truth, ConfusionMatrix::reference(), 3);
    EXPECT_NEAR(c.frequencies()(1), 0.943, 2e-3);
    EXPECT_EQ(c.shots, truth.shots);
}

TEST(GateErrors, NoErrorMatchesIdeal) {
    const GateSequence seq = sample_sequence();
    const Vector3r ideal = probabilities(apply_sequence(Flavor::e, seq));
    const Vector3r noisy = density_probabilities(inject_gate_errors(seq, Flavor::e, GateErrorModel{}));
    EXPECT_LT((ideal - noisy).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(GateErrors, UnderRotationAccumulatesQuadratically) {
    GateErrorModel m{0.008, 0.0};
    Matrix3c rho0 = Matrix3c::Zero();
    rho0(1, 1) = 1.0;
    auto p1_after = [&](int n) {
        std::vector<GivensGate> gates(static_cast<std::size_t>(n), GivensGate::make(Subspace::s12, 0.0, kPi));
        return density_probabilities(inject_gate_errors(gates, rho0, m))(1);
    };
    // Even trains return to |1> up to 1 - cos^2(n eps / 2).
    EXPECT_NEAR(1.0 - p1_after(20), std::pow(std::sin(20 * 0.008 / 2), 2), 1e-12);
    EXPECT_NEAR(1.0 - p1_after(40), std::pow(std::sin(40 * 0.008 / 2), 2), 1e-12);
    EXPECT_NEAR((1.0 - p1_after(40)) / (1.0 - p1_after(20)), 4.0, 0.15);
}

TEST(GateErrors, DecayContractsTowardMixedState) {
    GateErrorModel m{0.0, 73.125e3};
    Matrix3c rho0 = Matrix3c::Zero();
    rho0(0, 0) = 1.0;
    double last = 1.0;
    for (int n = 2; n <= 20; n += 2) {
        std::vector<GivensGate> gates(static_cast<std::size_t>(n), GivensGate::make(Subspace::s01, 0.0, kPi));
        const double p0 = density_probabilities(inject_gate_errors(gates, rho0, m))(0);
        EXPECT_LT(p0, last);
        EXPECT_GT(p0, 1.0 / 3.0);
        last = p0;
    }
}

TEST(GateErrors, RejectsExcessiveUnderRotation) {
    EXPECT_THROW(inject_gate_errors(sample_sequence(), Flavor::e, GateErrorModel{4.0, 0.0}), std::invalid_argument);
}
