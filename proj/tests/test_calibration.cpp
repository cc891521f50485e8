#include "nuqutrit/calibration.hpp"

#include <gtest/gtest.h>

using namespace nuqutrit;

TEST(Calibration, SpectroscopyFindsResonance) {
    const MockTransmon dev;
    PulseCalibration cal = PulseCalibration::backend(dev);
    const auto r = rabi_spectroscopy_12(dev, linspace(4.847, 4.947, 51), 0, 1, cal);
    EXPECT_NEAR(r.f12_ghz, dev.f12_ghz, 0.002);
}

TEST(Calibration, SpectroscopyWithoutPeakThrows) {
    const MockTransmon dev;
    EXPECT_THROW(rabi_spectroscopy_12(dev, linspace(4.60, 4.65, 26), 0, 1, PulseCalibration::backend(dev)),
                 NumericError);
}

TEST(Calibration, RabiAmplitudes) {
    const MockTransmon dev;
    const auto cal = PulseCalibration::exact(dev);
    EXPECT_NEAR(rabi_amplitude(dev, Subspace::s01, linspace(0.0, 0.5, 41), 0, 1, cal).a_pi / dev.a_pi_01, 1.0, 0.01);
    EXPECT_NEAR(rabi_amplitude(dev, Subspace::s12, linspace(0.0, 0.35, 41), 1024, 2, cal).a_pi / dev.a_pi_12, 1.0, 0.03);
}

TEST(Calibration, ErrorAmplificationRecoversInjectedErrors) {
    const MockTransmon dev;
    const auto r = error_amplification(dev, 100, 8192, 3, PulseCalibration::backend(dev));
    EXPECT_NEAR(r.under_rotation, dev.under_rotation_12, 0.2 * dev.under_rotation_12);
    EXPECT_NEAR(r.decay_rate_khz, dev.decay_rate_khz, 0.2 * dev.decay_rate_khz);
}

TEST(Calibration, ErrorAmplificationSign) {
    MockTransmon dev;
    dev.under_rotation_12 = -0.008;
    const auto r = error_amplification(dev, 100, 0, 3, PulseCalibration::backend(dev));
    EXPECT_LT(r.under_rotation, 0.0);
}

TEST(Calibration, PerfectGatesGiveFlatTrain) {
    MockTransmon dev;
    dev.under_rotation_12 = 0.0;
    dev.decay_rate_khz = 0.0;
    dev.crosstalk = 0.0;
    const auto r = error_amplification(dev, 100, 0, 3, PulseCalibration::backend(dev));
    for (std::size_t n = 0; n < r.magnitude_curve.y.size(); n += 2) EXPECT_GT(r.magnitude_curve.y[n], 0.999);
    EXPECT_LT(std::abs(r.under_rotation), 1e-3);
}

TEST(Readout, SilhouetteDegenerateCases) {
    IQDataset one;
    one.points = {{cplx(0, 0), 0}, {cplx(1, 0), 0}};
    EXPECT_EQ(silhouette(one), -1.0);
    IQDataset two;
    two.points = {{cplx(0, 0), 0}, {cplx(0.1, 0), 0}, {cplx(10, 0), 1}, {cplx(10.1, 0), 1}};
    EXPECT_GT(silhouette(two), 0.98);
}

TEST(Readout, SilhouettePicksSweetSpot) {
    const MockTransmon dev;
    const auto r = silhouette_optimize(dev, linspace(2.0, 5.0, 13), linspace(0.4, 1.0, 13), 200, 4);
    EXPECT_NEAR(r.best_duration_us, 4.0, 0.25 + 1e-9);
    EXPECT_NEAR(r.best_amplitude, 0.91, 0.05 + 1e-9);
    EXPECT_EQ(r.cells.size(), 169u);
}

TEST(Readout, DiscriminatorAccuracies) {
    const MockTransmon dev;
    const auto d = train_discriminator(readout_experiment(dev, 4.0, 0.91, 20000, 5));
    EXPECT_NEAR(d.accuracy(0), 0.985, 0.01);
    EXPECT_NEAR(d.accuracy(1), 0.943, 0.01);
    EXPECT_NEAR(d.accuracy(2), 0.945, 0.01);
    EXPECT_NO_THROW(d.confusion.validate());
}

TEST(Readout, DiscriminatorRejectsUnbalancedData) {
    IQDataset d;
    d.points = {{cplx(0, 0), 0}, {cplx(0, 1), 0}, {cplx(5, 0), 1}, {cplx(5, 1), 1}, {cplx(9, 9), 2}, {cplx(9, 8), 2},
                {cplx(9, 7), 2}};
    EXPECT_THROW(train_discriminator(d), std::invalid_argument);
}

TEST(Readout, CalibrationCircuitsEstimateConfusion) {
    const MockTransmon dev;
    const auto d = train_discriminator(readout_experiment(dev, 4.0, 0.91, 5000, 6));
    const ConfusionMatrix c = calibration_circuits(dev, d.classifier, 50000, 7);
    EXPECT_NO_THROW(c.validate());
    EXPECT_LT((c.a - d.confusion.a).cwiseAbs().maxCoeff(), 0.02);
}
