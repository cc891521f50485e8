#include "nuqutrit/device.hpp"

#include <gtest/gtest.h>

using namespace nuqutrit;

namespace {
Play play(double f, double amp, double phase = 0.0) {
    Play p;
    p.frequency_ghz = f;
    p.amplitude = amp;
    p.phase = phase;
    return p;
}
Vector3r populations(const MockTransmon& dev, const std::vector<Play>& plays) {
    PulseSchedule s;
    s.plays = plays;
    return schedule_unitary(dev, s).col(0).cwiseAbs2();
}
}  // namespace

TEST(Pulse, LiftedEnvelopeVanishesAtEdges) {
    const Play p = play(5.237, 0.2);
    const double td = p.duration_dt * 0.222;
    EXPECT_NEAR(p.envelope(0.0, 0.222), 0.0, 1e-15);
    EXPECT_NEAR(p.envelope(td, 0.222), 0.0, 1e-15);
    EXPECT_NEAR(p.envelope(td / 2, 0.222), 1.0, 1e-15);
}

TEST(Pulse, PiPulseInverts01) {
    const MockTransmon dev;
    EXPECT_GT(populations(dev, {play(dev.f01_ghz, dev.a_pi_01)})(1), 0.999);
}

TEST(Pulse, HalfAmplitudeGivesEqualSuperposition) {
    const MockTransmon dev;
    EXPECT_NEAR(populations(dev, {play(dev.f01_ghz, dev.a_pi_01 / 2)})(1), 0.5, 2e-3);
}

TEST(Pulse, LadderReachesSecondExcitedState) {
    const MockTransmon dev;
    EXPECT_GT(populations(dev, {play(dev.f01_ghz, dev.a_pi_01), play(dev.f12_ghz, dev.a_pi_12)})(2), 0.999);
}

TEST(Pulse, IntegrationConverges) {
    MockTransmon coarse, fine;
    coarse.substeps = 4;
    fine.substeps = 64;
    const Play p = play(coarse.f01_ghz, 0.13, 0.4);
    EXPECT_LT((play_unitary(coarse, p, 0.0) - play_unitary(fine, p, 0.0)).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Pulse, IdleFramePhaseEmerges) {
    MockTransmon dev;
    dev.crosstalk = 0.0;
    PulseSchedule s;
    s.plays = {play(dev.f01_ghz, dev.a_pi_01)};
    const Matrix3c u = schedule_unitary_drive_frame(dev, s);
    const double expected = wrap_phase(kTwoPi * (dev.f12_ghz - dev.f01_ghz) * dev.td_ns());
    EXPECT_NEAR(wrap_phase(std::arg(u(2, 2)) + expected), 0.0, 1e-9);  // idle |2> picks up exp(-i expected)
}

TEST(Pulse, ResultIsUnitary) {
    const MockTransmon dev;
    PulseSchedule s;
    s.plays = {play(dev.f01_ghz, 0.11, 0.3), play(dev.f12_ghz, -0.07, 1.2)};
    EXPECT_TRUE(is_unitary(schedule_unitary(dev, s), 1e-7));  // RK4 truncation
}

TEST(Pulse, InvalidSchedulesThrow) {
    const MockTransmon dev;
    PulseSchedule s;
    s.plays = {play(dev.f01_ghz, 1.5)};
    EXPECT_THROW(schedule_unitary(dev, s), std::invalid_argument);
    Play huge = play(dev.f01_ghz, 0.1);
    huge.duration_dt = 1e9;
    EXPECT_THROW(play_unitary(dev, huge, 0.0), std::length_error);
}

TEST(Pulse, GateAmplitudeScalesWithAngle) {
    const MockTransmon dev;
    const auto cal = PulseCalibration::exact(dev);
    const PulseSchedule s = gates_to_schedule({GivensGate::make(Subspace::s12, 0.3, kPi / 2)}, cal);
    EXPECT_NEAR(s.plays[0].amplitude, cal.a_pi_12 / 2, 1e-15);
    EXPECT_DOUBLE_EQ(s.plays[0].frequency_ghz, dev.f12_ghz);
    PulseCalibration weak = cal;
    weak.a_pi_01 = 0.9;
    EXPECT_THROW(gates_to_schedule({GivensGate::make(Subspace::s01, 0.0, 2 * kPi)}, weak), std::invalid_argument);
}

TEST(Pulse, DensityWithoutDecayMatchesUnitary) {
    const MockTransmon dev;
    PulseSchedule s;
    s.plays = {play(dev.f01_ghz, 0.15)};
    Matrix3c rho = Matrix3c::Zero();
    rho(0, 0) = 1.0;
    const Vector3r a = density_probabilities(simulate_density(dev, s, rho, false));
    EXPECT_LT((a - populations(dev, s.plays)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Pulse, MeasuredShotsAreReproducible) {
    const MockTransmon dev;
    PulseSchedule s;
    s.plays = {play(dev.f01_ghz, dev.a_pi_01 / 2)};
    s.measure = Measure{};
    const PulseResult a = simulate_pulse(dev, s, 5), b = simulate_pulse(dev, s, 5);
    EXPECT_EQ(a.outcome, b.outcome);
    ASSERT_TRUE(a.iq.has_value());
    EXPECT_EQ(a.iq->iq, b.iq->iq);
}

TEST(Readout, CloudsSeparateAtSweetSpot) {
    const ReadoutModel r;
    EXPECT_GT(r.separation(4.0, 0.91) / r.width(4.0, 0.91), r.separation(2.0, 0.5) / r.width(2.0, 0.5));
    EXPECT_THROW(r.width(0.0, 0.9), std::invalid_argument);
}

TEST(Device, ValidateRejectsBadConfig) {
    MockTransmon d;
    d.f12_ghz = 6.0;
    EXPECT_THROW(d.validate(), std::invalid_argument);
}

TEST(Device, DriftChangesJobsDeterministically) {
    MockTransmon d;
    d.drift = true;
    EXPECT_EQ(d.for_job(3, 9).a_pi_01, d.for_job(3, 9).a_pi_01);
    EXPECT_NE(d.for_job(3, 9).a_pi_01, d.a_pi_01);
    d.drift = false;
    EXPECT_EQ(d.for_job(3, 9).a_pi_01, d.a_pi_01);
}
