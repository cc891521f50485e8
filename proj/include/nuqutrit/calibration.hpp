#pragma once

#include "nuqutrit/curve_fit.hpp"
#include "nuqutrit/device.hpp"
#include "nuqutrit/vm.hpp"

#include <cstdint>
#include <vector>

namespace nuqutrit {

struct Curve {
    std::vector<double> x;
    std::vector<double> y;
};

/// Measured population of one level; shots = 0 returns the exact probability.
double measure_population(const Vector3r& probs, int level, std::uint64_t shots, std::uint64_t seed);

struct SpectroscopyResult {
    double f12_ghz = 0.0;
    Curve curve;  // drive frequency (GHz), P(|2>)
    CurveFitResult fit;
};

/// |1> is prepared with a {01} pi pulse, then a {12} pi-amplitude pulse is swept in frequency.
/// Throws NumericError when the fitted Lorentzian peak is below 0.1 or outside the window.
SpectroscopyResult rabi_spectroscopy_12(const MockTransmon& dev, const std::vector<double>& freq_grid_ghz,
                                        std::uint64_t shots, std::uint64_t seed,
                                        const PulseCalibration& cal);

struct RabiResult {
    double a_pi = 0.0;
    Curve curve;  // amplitude, population of the upper level
    CurveFitResult fit;
};

/// Resonant amplitude sweep in one subspace; A_pi is half the fitted cosine period.
RabiResult rabi_amplitude(const MockTransmon& dev, Subspace subspace, const std::vector<double>& amp_grid,
                          std::uint64_t shots, std::uint64_t seed, const PulseCalibration& cal);

struct ErrorAmplificationResult {
    double under_rotation = 0.0;  // rad per {12} pi pulse; positive means the pulse falls short
    double decay_rate_khz = 0.0;
    Curve magnitude_curve;  // [R12(pi)]^n R01(pi): P(|1>) vs n
    Curve sign_curve;       // [R12(pi)]^n R12(pi/2) R01(pi): P(|1>) vs n
    CurveFitResult magnitude_fit;
    CurveFitResult sign_fit;
};

/// Runs both trains for n = 0..n_max through the density-matrix device and fits damped cosines.
/// Frame slips are compensated with the calibrated frequencies.
ErrorAmplificationResult error_amplification(const MockTransmon& dev, int n_max, std::uint64_t shots,
                                             std::uint64_t seed, const PulseCalibration& cal);

struct IQDataset {
    std::vector<IQPoint> points;
    std::array<std::size_t, 3> class_counts() const;
};

/// shots_per_state readout shots for each prepared level.
IQDataset readout_experiment(const MockTransmon& dev, double duration_us, double amplitude,
                             std::uint64_t shots_per_state, std::uint64_t seed);

/// Mean silhouette coefficient of labelled points (Euclidean in the IQ plane). Returns -1 when
/// fewer than two clusters are populated.
double silhouette(const IQDataset& data);

struct HeatmapCell {
    double duration_us = 0.0;
    double amplitude = 0.0;
    double score = 0.0;
};

struct SilhouetteResult {
    std::vector<HeatmapCell> cells;
    double best_duration_us = 0.0;
    double best_amplitude = 0.0;
    double best_score = -1.0;
};

/// Ties go to the lowest duration, then the lowest amplitude.
SilhouetteResult silhouette_optimize(const MockTransmon& dev, std::vector<double> durations_us,
                                     std::vector<double> amplitudes, std::uint64_t shots_per_state,
                                     std::uint64_t seed);

struct Discriminator {
    std::array<cplx, 3> centroids{};
    int classify(cplx iq) const;
};

struct DiscriminatorResult {
    Discriminator classifier;
    ConfusionMatrix confusion;  // from held-out points
    Vector3r accuracy;
};

/// Nearest-centroid classifier trained on even-indexed points of each class, evaluated on the rest.
DiscriminatorResult train_discriminator(const IQDataset& data);

/// Classify n_k readout shots of each true level through the discriminator.
ShotCounts classify_shots(const MockTransmon& dev, const Discriminator& disc, const std::array<std::uint64_t, 3>& truth,
                          std::uint64_t seed);

/// Confusion matrix from three state-preparation circuits read through the discriminator.
ConfusionMatrix calibration_circuits(const MockTransmon& dev, const Discriminator& disc, std::uint64_t shots,
                                     std::uint64_t seed);

struct CalibrationOptions {
    std::vector<double> freq_grid_ghz;  // empty: 4.847 .. 4.947 GHz in 2 MHz steps
    std::vector<double> amp_grid_01;    // empty: 0 .. 0.5 in 0.0125 steps
    std::vector<double> amp_grid_12;    // empty: 0 .. 0.35 in 0.00875 steps
    std::vector<double> durations_us;   // empty: 2 .. 5 in 0.25 steps
    std::vector<double> amplitudes;     // empty: 0.4 .. 1.0 in 0.05 steps
    std::uint64_t shots = 8192;
    std::uint64_t readout_shots = 300;
    int n_max = 100;
    std::uint64_t seed = 2023;
};

struct CalibrationReport {
    SpectroscopyResult spectroscopy;
    RabiResult rabi01;
    RabiResult rabi12;
    SilhouetteResult readout;
    DiscriminatorResult discriminator;
    ErrorAmplificationResult amplification;
    PulseCalibration calibrated;
    MockTransmon truth;
};

CalibrationReport calibrate(const MockTransmon& dev, const CalibrationOptions& opts);

std::vector<double> linspace(double lo, double hi, int n);

}  // namespace nuqutrit
