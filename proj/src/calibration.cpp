#include "nuqutrit/calibration.hpp"

#include "nuqutrit/phase_advance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nuqutrit {

namespace {

Matrix3c ground() {
    Matrix3c rho = Matrix3c::Zero();
    rho(0, 0) = 1.0;
    return rho;
}

Play resonant_play(double freq, double amplitude, const PulseCalibration& cal, double phase = 0.0) {
    Play p;
    p.frequency_ghz = freq;
    p.phase = phase;
    p.amplitude = amplitude;
    p.duration_dt = cal.td_dt;
    p.sigma_dt = cal.sigma_dt;
    p.lifted = cal.lifted;
    return p;
}

constexpr double kMinPeakHeight = 0.1;

/// Folds a fitted (a, w, p) cosine so that a >= 0 and w lies in [0, pi] for unit-spaced samples.
void fold_cosine(double& a, double& w, double& p) {
    if (a < 0.0) {
        a = -a;
        p += kPi;
    }
    w = std::remainder(w, kTwoPi);
    if (w < 0.0) {
        w = -w;
        p = -p;
    }
    p = wrap_phase(p);
}

std::vector<double> or_default(const std::vector<double>& v, double lo, double hi, int n) {
    return v.empty() ? linspace(lo, hi, n) : v;
}

}  // namespace

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 2) throw std::invalid_argument("grid needs at least two points");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
    return out;
}

double measure_population(const Vector3r& probs, int level, std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) return probs(level);
    return sample_counts(probs, shots, seed).frequencies()(level);
}

SpectroscopyResult rabi_spectroscopy_12(const MockTransmon& dev, const std::vector<double>& freq_grid_ghz,
                                        std::uint64_t shots, std::uint64_t seed, const PulseCalibration& cal) {
    if (freq_grid_ghz.size() < 5) throw std::invalid_argument("spectroscopy grid needs at least five points");
    SpectroscopyResult r;
    for (std::size_t i = 0; i < freq_grid_ghz.size(); ++i) {
        PulseSchedule s;
        s.plays = {resonant_play(cal.f01_ghz, cal.a_pi_01, cal), resonant_play(freq_grid_ghz[i], cal.a_pi_12, cal)};
        const Vector3r p = density_probabilities(simulate_density(dev, s, ground()));
        r.curve.x.push_back(freq_grid_ghz[i]);
        r.curve.y.push_back(measure_population(p, 2, shots, derive_seed(seed, i)));
    }
    r.fit = curve_fit(CurveModel::lorentzian, r.curve.x, r.curve.y);
    r.f12_ghz = r.fit.params(1);
    const auto [lo, hi] = std::minmax_element(freq_grid_ghz.begin(), freq_grid_ghz.end());
    if (!(r.f12_ghz >= *lo && r.f12_ghz <= *hi) || !(r.fit.params(0) > kMinPeakHeight))
        throw NumericError("no resonance peak inside the spectroscopy window", r.fit.residual_norm);
    return r;
}

RabiResult rabi_amplitude(const MockTransmon& dev, Subspace subspace, const std::vector<double>& amp_grid,
                          std::uint64_t shots, std::uint64_t seed, const PulseCalibration& cal) {
    if (amp_grid.size() < 8) throw std::invalid_argument("amplitude grid needs at least eight points");
    RabiResult r;
    const bool is01 = subspace == Subspace::s01;
    for (std::size_t i = 0; i < amp_grid.size(); ++i) {
        PulseSchedule s;
        if (!is01) s.plays.push_back(resonant_play(cal.f01_ghz, cal.a_pi_01, cal));
        s.plays.push_back(resonant_play(is01 ? cal.f01_ghz : cal.f12_ghz, amp_grid[i], cal));
        const Vector3r p = density_probabilities(simulate_density(dev, s, ground()));
        r.curve.x.push_back(amp_grid[i]);
        r.curve.y.push_back(measure_population(p, is01 ? 1 : 2, shots, derive_seed(seed, i)));
    }
    r.fit = curve_fit(CurveModel::cosine, r.curve.x, r.curve.y);
    const double w = std::abs(r.fit.params(1));
    if (!(w > 0.0) || !std::isfinite(w)) throw NumericError("Rabi oscillation not resolved", r.fit.residual_norm);
    r.a_pi = kPi / w;
    return r;
}

ErrorAmplificationResult error_amplification(const MockTransmon& dev, int n_max, std::uint64_t shots,
                                             std::uint64_t seed, const PulseCalibration& cal) {
    if (n_max < 20) throw std::invalid_argument("error amplification needs n_max >= 20");
    const PhaseAdvanceModel frames = PhaseAdvanceModel::from_device(cal.f01_ghz, cal.f12_ghz, cal.td_dt, dev.dt_ns);

    auto run_train = [&](bool with_half, std::uint64_t stream) {
        std::vector<GivensGate> gates{GivensGate::make(Subspace::s01, 0.0, kPi)};
        if (with_half) gates.push_back(GivensGate::make(Subspace::s12, 0.0, kPi / 2.0));
        const std::size_t lead = gates.size();
        for (int n = 0; n < n_max; ++n) gates.push_back(GivensGate::make(Subspace::s12, 0.0, kPi));
        GateSequence seq;
        seq.gates = gates;
        const PulseSchedule schedule = gates_to_schedule(compensate(seq, frames).gates, cal);

        // Prefixes of one long train are the shorter trains.
        Curve c;
        Matrix3c rho = ground();
        double t = 0.0;
        const double q = 1.0 - std::exp(-kTwoPi * dev.decay_rate_khz * 1e3 * dev.gate_duration_s());
        for (std::size_t k = 0; k < schedule.plays.size(); ++k) {
            const Play& play = schedule.plays[k];
            const Matrix3c u = play_unitary(dev, play, t);
            rho = u * rho * u.adjoint();
            rho = (1.0 - q) * rho + (q / 3.0) * Matrix3c::Identity();
            t += play.duration_dt * dev.dt_ns;
            if (k + 1 >= lead) {
                const int n = static_cast<int>(k + 1 - lead);
                c.x.push_back(n);
                c.y.push_back(measure_population(density_probabilities(rho), 1, shots, derive_seed(seed, stream, n)));
            }
        }
        return c;
    };

    ErrorAmplificationResult r;
    r.magnitude_curve = run_train(false, 1);
    r.sign_curve = run_train(true, 2);
    r.magnitude_fit = curve_fit(CurveModel::damped_cosine, r.magnitude_curve.x, r.magnitude_curve.y);
    r.sign_fit = curve_fit(CurveModel::damped_cosine, r.sign_curve.x, r.sign_curve.y);

    double a = r.magnitude_fit.params(0), w = r.magnitude_fit.params(1), p = r.magnitude_fit.params(2);
    fold_cosine(a, w, p);
    const double magnitude = kPi - w;
    double as = r.sign_fit.params(0), ws = r.sign_fit.params(1), ps = r.sign_fit.params(2);
    fold_cosine(as, ws, ps);
    // Sign train: P1 = 1/2 (1 + cos(n (pi - eps) + pi/2 - eps/2)); a shortfall leaves the phase near +pi/2.
    const double sign = ps >= 0.0 ? 1.0 : -1.0;
    r.under_rotation = sign * magnitude;
    const double k = r.magnitude_fit.params(4);
    r.decay_rate_khz = k / (kTwoPi * dev.gate_duration_s()) * 1e-3;
    return r;
}

std::array<std::size_t, 3> IQDataset::class_counts() const {
    std::array<std::size_t, 3> c{0, 0, 0};
    for (const auto& p : points) {
        if (p.label < 0 || p.label > 2) throw std::invalid_argument("IQ point without a valid label");
        ++c[static_cast<std::size_t>(p.label)];
    }
    return c;
}

IQDataset readout_experiment(const MockTransmon& dev, double duration_us, double amplitude,
                             std::uint64_t shots_per_state, std::uint64_t seed) {
    if (!(duration_us > 0.0) || !(amplitude >= 0.0 && amplitude <= 1.0))
        throw std::invalid_argument("invalid measurement pulse");
    IQDataset d;
    d.points.reserve(3 * shots_per_state);
    for (int level = 0; level < 3; ++level) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(level)));
        for (std::uint64_t s = 0; s < shots_per_state; ++s)
            d.points.push_back(sample_iq(dev, level, duration_us, amplitude, rng));
    }
    return d;
}

double silhouette(const IQDataset& data) {
    const auto counts = data.class_counts();
    int populated = 0;
    for (auto c : counts) populated += c > 0 ? 1 : 0;
    if (populated < 2) return -1.0;

    const std::size_t n = data.points.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, 3> sum{0.0, 0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) sum[static_cast<std::size_t>(data.points[j].label)] += std::abs(data.points[i].iq - data.points[j].iq);
        const auto own = static_cast<std::size_t>(data.points[i].label);
        if (counts[own] <= 1) continue;  // singleton clusters score 0
        const double a = sum[own] / static_cast<double>(counts[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < 3; ++k)
            if (k != own && counts[k] > 0) b = std::min(b, sum[k] / static_cast<double>(counts[k]));
        const double m = std::max(a, b);
        total += m > 0.0 ? (b - a) / m : 0.0;
    }
    return total / static_cast<double>(n);
}

SilhouetteResult silhouette_optimize(const MockTransmon& dev, std::vector<double> durations_us,
                                     std::vector<double> amplitudes, std::uint64_t shots_per_state,
                                     std::uint64_t seed) {
    if (durations_us.empty() || amplitudes.empty()) throw std::invalid_argument("readout grids must be nonempty");
    std::sort(durations_us.begin(), durations_us.end());
    std::sort(amplitudes.begin(), amplitudes.end());
    SilhouetteResult r;
    std::uint64_t cell = 0;
    for (double d : durations_us) {
        for (double a : amplitudes) {
            const double s = silhouette(readout_experiment(dev, d, a, shots_per_state, derive_seed(seed, cell++)));
            r.cells.push_back({d, a, s});
            if (r.cells.size() == 1 || s > r.best_score) {
                r.best_score = s;
                r.best_duration_us = d;
                r.best_amplitude = a;
            }
        }
    }
    return r;
}

int Discriminator::classify(cplx iq) const {
    int best = 0;
    for (int k = 1; k < 3; ++k)
        if (std::abs(iq - centroids[k]) < std::abs(iq - centroids[best])) best = k;
    return best;
}

DiscriminatorResult train_discriminator(const IQDataset& data) {
    const auto counts = data.class_counts();
    for (auto c : counts)
        if (c < 2) throw std::invalid_argument("every class needs at least two points");
    if (counts[0] != counts[1] || counts[1] != counts[2]) throw std::invalid_argument("dataset is not balanced");

    std::array<cplx, 3> sum{};
    std::array<std::size_t, 3> seen{0, 0, 0}, used{0, 0, 0};
    for (const auto& p : data.points) {
        const auto k = static_cast<std::size_t>(p.label);
        if (seen[k]++ % 2 == 0) {
            sum[k] += p.iq;
            ++used[k];
        }
    }
    DiscriminatorResult r;
    for (std::size_t k = 0; k < 3; ++k) r.classifier.centroids[k] = sum[k] / static_cast<double>(used[k]);

    Matrix3r tally = Matrix3r::Zero();
    seen = {0, 0, 0};
    for (const auto& p : data.points) {
        const auto k = static_cast<std::size_t>(p.label);
        if (seen[k]++ % 2 == 1) tally(r.classifier.classify(p.iq), static_cast<int>(k)) += 1.0;
    }
    for (int j = 0; j < 3; ++j) tally.col(j) /= tally.col(j).sum();
    r.confusion.a = tally;
    r.accuracy = tally.diagonal();
    return r;
}

ShotCounts classify_shots(const MockTransmon& dev, const Discriminator& disc, const std::array<std::uint64_t, 3>& truth,
                          std::uint64_t seed) {
    ShotCounts out;
    out.seed = seed;
    Rng rng(seed);
    for (int level = 0; level < 3; ++level) {
        for (std::uint64_t s = 0; s < truth[level]; ++s) {
            const IQPoint p = sample_iq(dev, level, dev.readout_duration_us, dev.readout_amplitude, rng);
            ++out.n[static_cast<std::size_t>(disc.classify(p.iq))];
        }
        out.shots += truth[level];
    }
    return out;
}

ConfusionMatrix calibration_circuits(const MockTransmon& dev, const Discriminator& disc, std::uint64_t shots,
                                     std::uint64_t seed) {
    if (shots == 0) throw std::invalid_argument("calibration circuits need shots");
    ConfusionMatrix cm;
    for (int level = 0; level < 3; ++level) {
        std::array<std::uint64_t, 3> truth{0, 0, 0};
        truth[level] = shots;
        cm.a.col(level) = classify_shots(dev, disc, truth, derive_seed(seed, level)).frequencies();
    }
    return cm;
}

CalibrationReport calibrate(const MockTransmon& dev, const CalibrationOptions& opts) {
    CalibrationReport rep;
    rep.truth = dev;
    PulseCalibration cal = PulseCalibration::backend(dev);
    cal.f12_ghz = 0.0;  // unknown until spectroscopy

    const auto freqs = or_default(opts.freq_grid_ghz, 4.847, 4.947, 51);
    rep.spectroscopy = rabi_spectroscopy_12(dev, freqs, opts.shots, derive_seed(opts.seed, 1), cal);
    cal.f12_ghz = rep.spectroscopy.f12_ghz;

    rep.rabi01 = rabi_amplitude(dev, Subspace::s01, or_default(opts.amp_grid_01, 0.0, 0.5, 41), opts.shots,
                                derive_seed(opts.seed, 2), cal);
    rep.rabi12 = rabi_amplitude(dev, Subspace::s12, or_default(opts.amp_grid_12, 0.0, 0.35, 41), opts.shots,
                                derive_seed(opts.seed, 3), cal);

    rep.amplification = error_amplification(dev, opts.n_max, opts.shots, derive_seed(opts.seed, 4), cal);
    cal.a_pi_12 = cal.a_pi_12 / (1.0 - rep.amplification.under_rotation / kPi);

    rep.readout = silhouette_optimize(dev, or_default(opts.durations_us, 2.0, 5.0, 13),
                                      or_default(opts.amplitudes, 0.4, 1.0, 13), opts.readout_shots,
                                      derive_seed(opts.seed, 5));
    MockTransmon tuned = dev;
    tuned.readout_duration_us = rep.readout.best_duration_us;
    tuned.readout_amplitude = rep.readout.best_amplitude;
    rep.discriminator = train_discriminator(readout_experiment(tuned, tuned.readout_duration_us,
                                                               tuned.readout_amplitude, 2 * opts.shots,
                                                               derive_seed(opts.seed, 6)));
    rep.calibrated = cal;
    return rep;
}

}  // namespace nuqutrit
