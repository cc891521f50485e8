#pragma once

#include "nuqutrit/decomposition.hpp"
#include "nuqutrit/linalg.hpp"
#include "nuqutrit/vm.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace nuqutrit {

/// Synthetic readout response. Cloud k is centred at S(d, a) * centroid[k] with
/// S = a (1 - exp(-d / tau)) and isotropic width
/// sigma0 / sqrt(d) * (1 + kappa_d (d - d_knee)+) * (1 + kappa_a (a - a_knee)+).
struct ReadoutModel {
    std::array<cplx, 3> centroid{cplx(-3.1028649143, -1.1739500858), cplx(2.1224664182, -1.1739500858),
                                 cplx(0.9803984961, 2.3479001715)};
    double sigma0 = 2.0;
    double tau_us = 1.0;
    double d_knee_us = 4.0;
    double a_knee = 0.91;
    double kappa_d = 0.6;
    double kappa_a = 4.0;

    double separation(double duration_us, double amplitude) const;
    double width(double duration_us, double amplitude) const;
    cplx mean(int level, double duration_us, double amplitude) const;
};

struct MockTransmon {
    double f01_ghz = 5.237;
    double f12_ghz = 4.897;
    double a_pi_01 = 0.2;
    double a_pi_12 = 0.2 / std::numbers::sqrt2;
    double dt_ns = 0.222;
    double td_dt = 160.0;
    double sigma_dt = 40.0;
    double under_rotation_12 = 0.008;  // deficit of the backend {12} pi amplitude, rad per pulse
    double decay_rate_khz = 73.125;
    double crosstalk = 0.3;  // relative coupling of every drive to the transition it does not target
    int substeps = 4;       // RK4 steps per dt sample
    ReadoutModel readout;
    double readout_duration_us = 4.0;
    double readout_amplitude = 0.91;
    double ej_over_ec = 33.65;  // metadata only

    bool drift = false;
    double drift_centroid = 0.02;   // relative random-walk step of the centroids per job
    double drift_amplitude = 0.002; // relative random-walk step of the pi amplitudes per job

    static MockTransmon jakarta_q0() { return {}; }
    void validate() const;

    double td_ns() const { return td_dt * dt_ns; }
    double gate_duration_s() const { return td_ns() * 1e-9; }
    /// The {12} pi amplitude the backend starts from before error amplification.
    double backend_a_pi_12() const { return a_pi_12 * (1.0 - under_rotation_12 / kPi); }

    /// Device state for job index `job`: random walk of centroids and amplitudes when drifting.
    MockTransmon for_job(std::uint64_t job, std::uint64_t seed) const;
};

/// Gaussian envelope amplitude * exp(-(t - Td/2)^2 / (2 sigma^2)). When lifted, the edge value is
/// subtracted and the result rescaled so the envelope starts and ends at zero with the same peak.
struct Play {
    double frequency_ghz = 0.0;
    double phase = 0.0;
    double amplitude = 0.0;
    double duration_dt = 160.0;
    double sigma_dt = 40.0;
    bool lifted = true;

    double envelope(double t_ns, double dt_ns) const;   // unit peak
    double envelope_area_ns(double dt_ns) const;        // integral of envelope over the play
};

struct Measure {
    double duration_us = 4.0;
    double amplitude = 0.91;
};

struct PulseSchedule {
    std::vector<Play> plays;
    std::optional<Measure> measure;

    void validate(double dt_ns) const;
    double duration_dt() const;
};

struct IQPoint {
    cplx iq;
    int label = -1;  // prepared level when known
};

struct PulseResult {
    QutritState state;
    std::optional<IQPoint> iq;
    int outcome = -1;  // projective outcome drawn when measured
};

inline constexpr long long kMaxIntegrationSteps = 200'000'000;

/// Propagator of one play starting at t_start_ns, in the interaction picture of the idle
/// Hamiltonian diag(0, 0, 2 pi (f12 - f01)) written in the f01 frame.
Matrix3c play_unitary(const MockTransmon& dev, const Play& play, double t_start_ns);

/// Product of the plays in time order (interaction picture; populations are frame independent).
Matrix3c schedule_unitary(const MockTransmon& dev, const PulseSchedule& schedule);

/// Same propagator expressed in the f01 drive frame, where an idle |2> accumulates 2 pi (f12 - f01) t.
Matrix3c schedule_unitary_drive_frame(const MockTransmon& dev, const PulseSchedule& schedule);

PulseResult simulate_pulse(const MockTransmon& dev, const PulseSchedule& schedule, std::uint64_t seed,
                           const QutritState& initial = QutritState{});

/// Density-matrix execution: after each play the state is depolarized with
/// q = 1 - exp(-2 pi decay Td).
Matrix3c simulate_density(const MockTransmon& dev, const PulseSchedule& schedule, const Matrix3c& rho0,
                          bool decoherence = true);

/// What the experimenter believes about the device; used to turn gates into plays.
struct PulseCalibration {
    double f01_ghz = 5.237;
    double f12_ghz = 4.897;
    double a_pi_01 = 0.2;
    double a_pi_12 = 0.2 / std::numbers::sqrt2;
    double td_dt = 160.0;
    double sigma_dt = 40.0;
    bool lifted = true;

    static PulseCalibration exact(const MockTransmon& dev);
    static PulseCalibration backend(const MockTransmon& dev);
};

/// One play per gate: amplitude theta / pi * A_pi, phase = gate axis, resonant frequency of the subspace.
PulseSchedule gates_to_schedule(const std::vector<GivensGate>& gates, const PulseCalibration& cal);

/// Single readout shot for a given level.
IQPoint sample_iq(const MockTransmon& dev, int level, double duration_us, double amplitude, Rng& rng);

}  // namespace nuqutrit
