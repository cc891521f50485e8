#pragma once

#include "nuqutrit/decomposition.hpp"
#include "nuqutrit/device.hpp"
#include "nuqutrit/phase_advance.hpp"
#include "nuqutrit/pmns.hpp"
#include "nuqutrit/vm.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nuqutrit {

enum class Mode { analytic, ideal, sampled, noisy, pulse };
enum class SweepAxis { L_over_E, E };

std::string_view mode_name(Mode m);
Mode parse_mode(std::string_view s);
std::string_view axis_name(SweepAxis a);
SweepAxis parse_axis(std::string_view s);

/// L/E (km/GeV) at which Phi01 completes one period.
double full_phi01_period(const OscillationParams& p);

struct ScenarioConfig {
    Scenario scenario = Scenario::vacuum;
    std::vector<Flavor> initial{Flavor::e, Flavor::mu, Flavor::tau};
    SweepAxis axis = SweepAxis::L_over_E;
    double grid_min = 0.0;
    double grid_max = 1.0;
    int points = 297;
    double fixed = 1.0;              // E in GeV on the L/E axis, L in km on the E axis
    std::vector<double> vm{0.0};     // eV^2
    std::vector<double> delta{0.0};  // rad
    Mode mode = Mode::analytic;
    std::uint64_t shots = 8192;
    int repeats = 4;
    std::uint64_t seed = 2023;
    int circuits_per_job = 300;  // three of them are readout calibration circuits
    int threads = 0;             // 0: hardware concurrency

    OscillationParams params = OscillationParams::nufit51();
    ConfusionMatrix readout = ConfusionMatrix::reference();  // sampled and noisy modes
    GateErrorModel gate_errors{0.008, 73.125e3};              // noisy mode
    MockTransmon device = MockTransmon::jakarta_q0();          // pulse mode
    std::optional<PulseCalibration> calibration;               // pulse mode; exact when absent
    std::uint64_t readout_training_shots = 2000;               // pulse mode discriminator

    /// Full Phi01 period in L/E at E = 1 GeV, all three initial flavors.
    static ScenarioConfig vacuum_preset();
    /// vm in {0, 1e-5, 1e-4, 1e-3} eV^2, initial nu_mu, same L/E window as vacuum_preset.
    static ScenarioConfig matter_preset();
    /// L = 295 km, E in [0.1, 2] GeV, delta in {-pi/2, 0, pi/2, pi}, initial nu_mu.
    static ScenarioConfig cp_preset();
    static ScenarioConfig defaults(Scenario s);

    void validate() const;
    bool exact() const { return mode == Mode::analytic || mode == Mode::ideal; }
    int effective_repeats() const { return exact() ? 1 : repeats; }
    std::uint64_t effective_shots() const { return exact() ? 0 : shots; }
    int points_per_job() const { return circuits_per_job - 3; }
};

struct CurveSpec {
    Flavor initial = Flavor::e;
    double vm = 0.0;
    double delta = 0.0;
};

/// Curves in a fixed order: initial flavor outermost, then vm, then delta.
std::vector<CurveSpec> enumerate_curves(const ScenarioConfig& cfg);
std::vector<double> sweep_grid(const ScenarioConfig& cfg);
Baseline baseline_at(const ScenarioConfig& cfg, double x);

struct ResultRow {
    std::size_t curve = 0;
    std::size_t point = 0;
    int repeat = 0;
    double x = 0.0;
    ShotCounts counts;       // classified outcome counts; empty in exact modes
    Vector3r probabilities;  // mitigated frequencies, or exact probabilities
    bool ok = true;
};

struct PhaseCharacterization {
    double vm = 0.0;
    PhaseFitResult fit;
};

struct ResultTable {
    ScenarioConfig config;
    std::vector<CurveSpec> curves;
    std::vector<double> grid;
    std::vector<ResultRow> rows;  // curve-major, then point, then repeat
    std::vector<PhaseCharacterization> phase_fits;  // pulse mode
    bool failed = false;
    std::string failure;

    const ResultRow& row(std::size_t curve, std::size_t point, int repeat) const;
    /// Mean over repeats of the recorded probabilities.
    Vector3r mean(std::size_t curve, std::size_t point) const;
};

/// Probabilities from the closed-form oscillation formulas (DMP in matter).
Vector3r analytic_probabilities(const OscillationParams& p, const CurveSpec& c, const Baseline& b);
/// The compiled Givens circuit for one curve at one baseline.
GateSequence curve_circuit(const ScenarioConfig& cfg, const CurveSpec& c, const Baseline& b);

/// Executes every grid point, repeat, and curve. Per-point seeds derive from
/// (seed, global point index, repeat), so the output does not depend on the thread count.
/// A failing point marks the table failed; rows finished before it are kept.
ResultTable run_scenario(const ScenarioConfig& cfg);

/// Same config forced to analytic mode.
ResultTable analytic_reference(const ScenarioConfig& cfg);

struct CurveScore {
    std::size_t curve = 0;
    Flavor final_flavor = Flavor::e;
    double r2 = 0.0;             // NaN when the data have zero variance
    double mean_relative = 0.0;  // over points with reference probability above the floor
    double max_relative = 0.0;
    double band_fraction = 0.0;  // share of those points with relative error in [1%, 10%]
    double below_band_fraction = 0.0;
    std::size_t scored_points = 0;
};

struct ScoreReport {
    std::vector<CurveScore> curves;
    std::uint64_t shots = 0;
    int repeats = 0;
    double min_r2() const;
    double band_fraction() const;  // pooled over every scored point
    double max_abs_error = 0.0;
};

inline constexpr double kRelativeErrorFloor = 0.05;

/// R^2 = 1 - sum (y - y0)^2 / sum (y - mean(y))^2 with y the measured curve and y0 the reference.
double r2_score(const std::vector<double>& y, const std::vector<double>& y0);

ScoreReport score(const ResultTable& table, const ResultTable& reference);

}  // namespace nuqutrit
