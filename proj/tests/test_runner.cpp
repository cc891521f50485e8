#include "nuqutrit/runner.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nuqutrit;

TEST(Config, DefaultsMatchFigures) {
    const auto f3 = ScenarioConfig::vacuum_preset();
    EXPECT_EQ(f3.points, 297);
    EXPECT_NEAR(f3.grid_max * kPhasePerUnit * f3.params.dm2_21, kTwoPi, 1e-12);
    EXPECT_EQ(f3.initial.size(), 3u);
    const auto f4 = ScenarioConfig::matter_preset();
    EXPECT_EQ(f4.vm, (std::vector<double>{0.0, 1e-5, 1e-4, 1e-3}));
    const auto f5 = ScenarioConfig::cp_preset();
    EXPECT_DOUBLE_EQ(f5.fixed, 295.0);
    EXPECT_EQ(f5.shots, 4096u);
    EXPECT_EQ(f5.delta.size(), 4u);
}

TEST(Config, ValidationRejectsBadGrids) {
    auto c = ScenarioConfig::vacuum_preset();
    c.points = 1;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = ScenarioConfig::vacuum_preset();
    c.vm = {1e-4};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = ScenarioConfig::cp_preset();
    c.grid_min = 0.0;
    EXPECT_THROW(c.validate(), std::domain_error);
}

TEST(Runner, AnalyticStartsWithCertainSurvival) {
    auto c = ScenarioConfig::vacuum_preset();
    const ResultTable t = run_scenario(c);
    for (std::size_t k = 0; k < t.curves.size(); ++k)
        EXPECT_NEAR(t.mean(k, 0)(static_cast<int>(t.curves[k].initial)), 1.0, 1e-15);
}

TEST(Runner, IdealMatchesAnalytic) {
    for (Scenario s : {Scenario::vacuum, Scenario::matter, Scenario::cp}) {
        auto c = ScenarioConfig::defaults(s);
        c.mode = Mode::ideal;
        EXPECT_LT(score(run_scenario(c), analytic_reference(c)).max_abs_error, 1e-9);
    }
}

TEST(Runner, CpAtZeroDeltaEqualsVacuum) {
    auto cp = ScenarioConfig::cp_preset();
    cp.mode = Mode::ideal;
    cp.delta = {0.0};
    auto vac = cp;
    vac.scenario = Scenario::vacuum;
    const ResultTable a = run_scenario(cp), b = run_scenario(vac);
    for (std::size_t i = 0; i < a.grid.size(); ++i) EXPECT_LT((a.mean(0, i) - b.mean(0, i)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Runner, SampledConvergesWithShots) {
    auto c = ScenarioConfig::matter_preset();
    c.mode = Mode::sampled;
    c.shots = 1'000'000;
    c.repeats = 1;
    c.points = 20;
    c.readout = ConfusionMatrix::identity();
    EXPECT_LT(score(run_scenario(c), analytic_reference(c)).max_abs_error, 2e-3);
}

TEST(Runner, ThreadCountDoesNotChangeOutput) {
    auto c = ScenarioConfig::cp_preset();
    c.mode = Mode::sampled;
    c.threads = 1;
    const ResultTable a = run_scenario(c);
    c.threads = 3;
    const ResultTable b = run_scenario(c);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].counts, b.rows[i].counts);
        EXPECT_EQ(a.rows[i].probabilities, b.rows[i].probabilities);
    }
}

TEST(Runner, JobsSplitAtCircuitLimit) {
    auto c = ScenarioConfig::cp_preset();
    c.mode = Mode::sampled;
    c.delta = {0.0};
    c.points = 10;
    c.circuits_per_job = 8;  // 5 points per job
    EXPECT_FALSE(run_scenario(c).failed);
}

TEST(Runner, MatterSuppressesAppearance) {
    auto c = ScenarioConfig::matter_preset();
    const ResultTable t = run_scenario(c);
    double vac = 0.0, dense = 0.0;
    for (std::size_t i = 0; i < t.grid.size(); ++i) {
        vac = std::max(vac, t.mean(0, i)(0));
        dense = std::max(dense, t.mean(3, i)(0));
    }
    EXPECT_LT(dense, 0.5 * vac);
}

TEST(Runner, FailingPointKeepsFinishedRows) {
    auto c = ScenarioConfig::vacuum_preset();
    c.mode = Mode::pulse;
    c.points = 4;
    c.repeats = 1;
    c.shots = 100;
    c.calibration = PulseCalibration::exact(c.device);
    c.calibration->a_pi_01 = 0.9;  // 2 pi rotations exceed the amplitude range
    const ResultTable t = run_scenario(c);
    EXPECT_TRUE(t.failed);
    EXPECT_FALSE(t.failure.empty());
}

TEST(Runner, PulseModeTracksAnalytics) {
    auto c = ScenarioConfig::matter_preset();
    c.mode = Mode::pulse;
    c.vm = {1e-4};
    c.points = 30;
    const ResultTable t = run_scenario(c);
    ASSERT_FALSE(t.failed) << t.failure;
    ASSERT_EQ(t.phase_fits.size(), 1u);
    EXPECT_GT(score(t, analytic_reference(c)).min_r2(), 0.95);
}

TEST(Score, PerfectDataGivesOne) { EXPECT_DOUBLE_EQ(r2_score({0.1, 0.5, 0.9}, {0.1, 0.5, 0.9}), 1.0); }

TEST(Score, ConstantDataIsSentinel) { EXPECT_TRUE(std::isnan(r2_score({0.4, 0.4, 0.4}, {0.1, 0.5, 0.9}))); }

TEST(Score, NeverAboveOne) {
    EXPECT_LE(r2_score({0.1, 0.6, 0.8}, {0.2, 0.5, 0.9}), 1.0);
    EXPECT_THROW(r2_score({0.1}, {0.1, 0.2}), std::invalid_argument);
}

TEST(Score, RelativeErrorsUseFloor) {
    auto c = ScenarioConfig::cp_preset();
    c.mode = Mode::sampled;
    const ScoreReport r = score(run_scenario(c), analytic_reference(c));
    EXPECT_EQ(r.curves.size(), 12u);
    for (const auto& s : r.curves) {
        EXPECT_LE(s.band_fraction + s.below_band_fraction, 1.0 + 1e-12);
        EXPECT_GE(s.r2, 0.92);
    }
}
