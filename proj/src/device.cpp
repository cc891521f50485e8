#include "nuqutrit/device.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nuqutrit {

namespace {

struct Couplings {
    double k01 = 0.0;  // rad/ns per unit amplitude
    double k12 = 0.0;
};

/// Coupling constants are fixed by the reference pi pulse: a Td, sigma Gaussian of amplitude A_pi.
Couplings couplings_for(const MockTransmon& dev, const Play& play) {
    Play reference;
    reference.duration_dt = dev.td_dt;
    reference.sigma_dt = dev.sigma_dt;
    reference.lifted = play.lifted;
    const double area = reference.envelope_area_ns(dev.dt_ns);
    Couplings c;
    c.k01 = kPi / (dev.a_pi_01 * area);
    c.k12 = kPi / (dev.a_pi_12 * area);
    const bool near01 = std::abs(play.frequency_ghz - dev.f01_ghz) <= std::abs(play.frequency_ghz - dev.f12_ghz);
    (near01 ? c.k12 : c.k01) *= dev.crosstalk;
    return c;
}

/// -i H(t) U for the tridiagonal interaction-picture Hamiltonian.
Matrix3c derivative(const Matrix3c& u, cplx h01, cplx h12) {
    // H = [[0, conj(h01), 0], [h01, 0, conj(h12)], [0, h12, 0]]
    Matrix3c out;
    for (int c = 0; c < 3; ++c) {
        out(0, c) = -kI * (std::conj(h01) * u(1, c));
        out(1, c) = -kI * (h01 * u(0, c) + std::conj(h12) * u(2, c));
        out(2, c) = -kI * (h12 * u(1, c));
    }
    return out;
}

double detuning12(const MockTransmon& dev) { return kTwoPi * (dev.f12_ghz - dev.f01_ghz); }

}  // namespace

double ReadoutModel::separation(double duration_us, double amplitude) const {
    return amplitude * (1.0 - std::exp(-duration_us / tau_us));
}

double ReadoutModel::width(double duration_us, double amplitude) const {
    if (!(duration_us > 0.0)) throw std::invalid_argument("readout duration must be positive");
    return sigma0 / std::sqrt(duration_us) * (1.0 + kappa_d * std::max(0.0, duration_us - d_knee_us)) *
           (1.0 + kappa_a * std::max(0.0, amplitude - a_knee));
}

cplx ReadoutModel::mean(int level, double duration_us, double amplitude) const {
    return separation(duration_us, amplitude) * centroid.at(static_cast<std::size_t>(level));
}

void MockTransmon::validate() const {
    if (!(f12_ghz < f01_ghz) || !(f12_ghz > 0.0)) throw std::invalid_argument("device requires 0 < f12 < f01");
    for (double a : {a_pi_01, a_pi_12})
        if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("pi amplitudes must lie in (0, 1]");
    if (!(dt_ns > 0.0) || !(td_dt > 0.0) || !(sigma_dt > 0.0)) throw std::invalid_argument("pulse timing must be positive");
    if (decay_rate_khz < 0.0) throw std::invalid_argument("decay rate must be non-negative");
    if (!(crosstalk >= 0.0)) throw std::invalid_argument("crosstalk scale must be non-negative");
    if (substeps < 1) throw std::invalid_argument("substeps must be at least 1");
}

double Play::envelope(double t_ns, double dt_ns) const {
    const double td = duration_dt * dt_ns;
    const double sigma = sigma_dt * dt_ns;
    const double g = std::exp(-(t_ns - 0.5 * td) * (t_ns - 0.5 * td) / (2.0 * sigma * sigma));
    if (!lifted) return g;
    const double edge = std::exp(-td * td / (8.0 * sigma * sigma));
    return (g - edge) / (1.0 - edge);
}

double Play::envelope_area_ns(double dt_ns) const {
    const double td = duration_dt * dt_ns;
    const double sigma = sigma_dt * dt_ns;
    const double area = std::sqrt(kTwoPi) * sigma * std::erf(td / (2.0 * std::numbers::sqrt2 * sigma));
    if (!lifted) return area;
    const double edge = std::exp(-td * td / (8.0 * sigma * sigma));
    return (area - td * edge) / (1.0 - edge);
}

MockTransmon MockTransmon::for_job(std::uint64_t job, std::uint64_t seed) const {
    if (!drift) return *this;
    MockTransmon d = *this;
    Rng rng(derive_seed(seed, 0xd21f7ULL));
    std::normal_distribution<double> n01(0.0, 1.0);
    for (std::uint64_t j = 0; j < job; ++j) {
        for (auto& c : d.readout.centroid) c *= cplx(1.0 + drift_centroid * n01(rng), drift_centroid * n01(rng));
        d.a_pi_01 *= 1.0 + drift_amplitude * n01(rng);
        d.a_pi_12 *= 1.0 + drift_amplitude * n01(rng);
    }
    return d;
}

void PulseSchedule::validate(double dt_ns) const {
    if (!(dt_ns > 0.0)) throw std::invalid_argument("dt must be positive");
    for (const auto& p : plays) {
        if (!(p.duration_dt > 0.0) || std::abs(p.duration_dt - std::round(p.duration_dt)) > 1e-9)
            throw std::invalid_argument("play duration must be a positive multiple of dt");
        if (!(p.sigma_dt > 0.0)) throw std::invalid_argument("envelope width must be positive");
        if (!(std::abs(p.amplitude) <= 1.0)) throw std::invalid_argument("play amplitude outside [-1, 1]");
        if (!(p.frequency_ghz > 0.0) || !std::isfinite(p.phase)) throw std::invalid_argument("invalid play carrier");
    }
    if (measure && (!(measure->duration_us > 0.0) || !(measure->amplitude >= 0.0 && measure->amplitude <= 1.0)))
        throw std::invalid_argument("invalid measurement pulse");
}

double PulseSchedule::duration_dt() const {
    double t = 0.0;
    for (const auto& p : plays) t += p.duration_dt;
    return t;
}

Matrix3c play_unitary(const MockTransmon& dev, const Play& play, double t_start_ns) {
    const Couplings c = couplings_for(dev, play);
    const double delta2 = detuning12(dev);
    const double carrier = kTwoPi * (play.frequency_ghz - dev.f01_ghz);
    const double td = play.duration_dt * dev.dt_ns;
    const long long steps = std::llround(play.duration_dt) * dev.substeps;
    if (steps > kMaxIntegrationSteps) throw std::length_error("pulse needs too many integration steps");
    const double h = td / static_cast<double>(steps);

    auto drive = [&](double tau, cplx& h01, cplx& h12) {
        // tau is time since the start of the play
        const double env = play.amplitude * play.envelope(tau, dev.dt_ns);
        const cplx d = env * std::polar(1.0, play.phase - carrier * tau);
        h01 = 0.5 * c.k01 * d;
        h12 = 0.5 * c.k12 * d * std::polar(1.0, delta2 * (t_start_ns + tau));
    };

    Matrix3c u = Matrix3c::Identity();
    cplx a01, a12, b01, b12, e01, e12;
    for (long long s = 0; s < steps; ++s) {
        const double t = static_cast<double>(s) * h;
        drive(t, a01, a12);
        drive(t + 0.5 * h, b01, b12);
        drive(t + h, e01, e12);
        const Matrix3c k1 = derivative(u, a01, a12);
        const Matrix3c k2 = derivative(u + 0.5 * h * k1, b01, b12);
        const Matrix3c k3 = derivative(u + 0.5 * h * k2, b01, b12);
        const Matrix3c k4 = derivative(u + h * k3, e01, e12);
        u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return u;
}

Matrix3c schedule_unitary(const MockTransmon& dev, const PulseSchedule& schedule) {
    dev.validate();
    schedule.validate(dev.dt_ns);
    long long total = 0;
    for (const auto& p : schedule.plays) total += std::llround(p.duration_dt) * dev.substeps;
    if (total > kMaxIntegrationSteps) throw std::length_error("schedule needs too many integration steps");

    Matrix3c u = Matrix3c::Identity();
    double t = 0.0;
    for (const auto& p : schedule.plays) {
        u = play_unitary(dev, p, t) * u;
        t += p.duration_dt * dev.dt_ns;
    }
    return u;
}

Matrix3c schedule_unitary_drive_frame(const MockTransmon& dev, const PulseSchedule& schedule) {
    const double t = schedule.duration_dt() * dev.dt_ns;
    Matrix3c idle = Matrix3c::Identity();
    idle(2, 2) = std::polar(1.0, -detuning12(dev) * t);
    return idle * schedule_unitary(dev, schedule);
}

IQPoint sample_iq(const MockTransmon& dev, int level, double duration_us, double amplitude, Rng& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    const double w = dev.readout.width(duration_us, amplitude);
    const double re = n01(rng);
    const double im = n01(rng);
    return {dev.readout.mean(level, duration_us, amplitude) + w * cplx(re, im), level};
}

PulseResult simulate_pulse(const MockTransmon& dev, const PulseSchedule& schedule, std::uint64_t seed,
                           const QutritState& initial) {
    PulseResult r;
    r.state.amplitudes = schedule_unitary(dev, schedule) * initial.amplitudes;
    if (schedule.measure) {
        Rng rng(seed);
        const Vector3r p = probabilities(r.state);
        std::discrete_distribution<int> pick({p(0), p(1), p(2)});
        r.outcome = pick(rng);
        r.iq = sample_iq(dev, r.outcome, schedule.measure->duration_us, schedule.measure->amplitude, rng);
    }
    return r;
}

Matrix3c simulate_density(const MockTransmon& dev, const PulseSchedule& schedule, const Matrix3c& rho0,
                          bool decoherence) {
    dev.validate();
    schedule.validate(dev.dt_ns);
    Matrix3c rho = rho0;
    double t = 0.0;
    for (const auto& p : schedule.plays) {
        const Matrix3c u = play_unitary(dev, p, t);
        rho = u * rho * u.adjoint();
        if (decoherence) {
            const double q = 1.0 - std::exp(-kTwoPi * dev.decay_rate_khz * 1e3 * p.duration_dt * dev.dt_ns * 1e-9);
            rho = (1.0 - q) * rho + (q / 3.0) * Matrix3c::Identity();
        }
        t += p.duration_dt * dev.dt_ns;
    }
    return rho;
}

PulseCalibration PulseCalibration::exact(const MockTransmon& dev) {
    return {dev.f01_ghz, dev.f12_ghz, dev.a_pi_01, dev.a_pi_12, dev.td_dt, dev.sigma_dt, true};
}

PulseCalibration PulseCalibration::backend(const MockTransmon& dev) {
    PulseCalibration c = exact(dev);
    c.a_pi_12 = dev.backend_a_pi_12();
    return c;
}

PulseSchedule gates_to_schedule(const std::vector<GivensGate>& gates, const PulseCalibration& cal) {
    PulseSchedule s;
    for (const auto& g : gates) {
        const bool is01 = g.subspace == Subspace::s01;
        Play p;
        p.frequency_ghz = is01 ? cal.f01_ghz : cal.f12_ghz;
        p.phase = g.phi;
        p.amplitude = g.theta / kPi * (is01 ? cal.a_pi_01 : cal.a_pi_12);
        p.duration_dt = cal.td_dt;
        p.sigma_dt = cal.sigma_dt;
        p.lifted = cal.lifted;
        if (!(std::abs(p.amplitude) <= 1.0))
            throw std::invalid_argument("gate angle needs amplitude beyond 1: " + std::to_string(p.amplitude));
        s.plays.push_back(p);
    }
    return s;
}

}  // namespace nuqutrit
