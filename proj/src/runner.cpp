#include "nuqutrit/runner.hpp"

#include "nuqutrit/calibration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace nuqutrit {

namespace {

constexpr std::uint64_t kJobStream = 0x10b;
constexpr std::uint64_t kReadoutStream = 0x2ead;
constexpr std::uint64_t kCharacterizationStream = 0xc4a2;
constexpr int kCharacterizationPoints = 40;

Vector3r column(const Matrix3r& m, Flavor f) { return m.col(static_cast<int>(f)); }

Vector3r unit(int level) {
    Vector3r e = Vector3r::Zero();
    e(level) = 1.0;
    return e;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Runs body(i) for i in [0, n) on a pool; the first exception is stored and later work skipped.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body, std::string& error) {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || stop.load()) return;
            try {
                body(i);
            } catch (const std::exception& e) {
                std::lock_guard lock(mu);
                if (!stop.exchange(true)) error = e.what();
            }
        }
    };
    const int t = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (t == 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    for (int k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

struct PulseContext {
    MockTransmon device;
    PulseCalibration cal;
    Discriminator disc;
    std::map<double, std::vector<double>> phis;  // by vm
};

Vector3r pulse_probabilities(const MockTransmon& dev, const PulseCalibration& cal, const std::vector<GivensGate>& gates,
                             Flavor initial) {
    const Matrix3c u = schedule_unitary(dev, gates_to_schedule(gates, cal));
    const Vector3c psi = u.col(static_cast<int>(initial));
    return psi.cwiseAbs2();
}

ShotCounts pulse_counts(const PulseContext& ctx, const MockTransmon& dev, const Vector3r& probs, std::uint64_t shots,
                        std::uint64_t seed) {
    Rng rng(seed);
    const auto truth = draw_multinomial(probs, shots, rng);
    ShotCounts c = classify_shots(dev, ctx.disc, truth, derive_seed(seed, 1));
    c.seed = seed;
    return c;
}

/// Fits the device phase advances of one gate pattern from uncompensated runs over a wide L/E window.
PhaseFitResult characterize_phases(const ScenarioConfig& cfg, const PulseContext& ctx, double vm) {
    std::vector<double> deltas{0.0};
    if (cfg.scenario == Scenario::cp) deltas = {-kPi / 2.0, 0.0, kPi / 2.0, kPi};
    const double span = full_phi01_period(cfg.params);
    const std::uint64_t shots = cfg.shots * static_cast<std::uint64_t>(cfg.repeats);
    const std::uint64_t base = derive_seed(cfg.seed, kCharacterizationStream, static_cast<std::uint64_t>(vm * 1e12));
    const ConfusionMatrix cm = calibration_circuits(ctx.device, ctx.disc, shots, derive_seed(base, 0));

    std::vector<PhaseObservation> data;
    std::uint64_t k = 1;
    for (double delta : deltas) {
        for (int i = 0; i < kCharacterizationPoints; ++i) {
            const double x = span * i / (kCharacterizationPoints - 1);
            for (Flavor f : {Flavor::e, Flavor::mu, Flavor::tau}) {
                const GateSequence seq = curve_circuit(cfg, {f, vm, delta}, Baseline::from_L_over_E(x));
                const Vector3r probs = pulse_probabilities(ctx.device, ctx.cal, seq.gates, f);
                const ShotCounts c = pulse_counts(ctx, ctx.device, probs, shots, derive_seed(base, k++));
                const Vector3r p = mitigate(c.frequencies(), cm).probabilities;
                data.push_back({seq, f, p * static_cast<double>(shots)});
            }
        }
    }
    PhaseFitOptions opts;
    opts.seed = base;
    return fit_phase_advances(data, opts);
}

}  // namespace

std::string_view mode_name(Mode m) {
    switch (m) {
        case Mode::analytic: return "analytic";
        case Mode::ideal: return "ideal";
        case Mode::sampled: return "sampled";
        case Mode::noisy: return "noisy";
        case Mode::pulse: return "pulse";
    }
    return "?";
}

Mode parse_mode(std::string_view s) {
    for (Mode m : {Mode::analytic, Mode::ideal, Mode::sampled, Mode::noisy, Mode::pulse})
        if (mode_name(m) == s) return m;
    throw std::invalid_argument("unknown mode: " + std::string(s));
}

std::string_view axis_name(SweepAxis a) { return a == SweepAxis::L_over_E ? "L_over_E" : "E"; }

SweepAxis parse_axis(std::string_view s) {
    if (s == "L_over_E") return SweepAxis::L_over_E;
    if (s == "E") return SweepAxis::E;
    throw std::invalid_argument("unknown sweep axis: " + std::string(s));
}

double full_phi01_period(const OscillationParams& p) { return kTwoPi / (kPhasePerUnit * p.dm2_21); }

ScenarioConfig ScenarioConfig::vacuum_preset() {
    ScenarioConfig c;
    c.scenario = Scenario::vacuum;
    c.initial = {Flavor::e, Flavor::mu, Flavor::tau};
    c.axis = SweepAxis::L_over_E;
    c.grid_min = 0.0;
    c.grid_max = full_phi01_period(c.params);
    c.fixed = 1.0;
    return c;
}

ScenarioConfig ScenarioConfig::matter_preset() {
    ScenarioConfig c = vacuum_preset();
    c.scenario = Scenario::matter;
    c.initial = {Flavor::mu};
    c.vm = {0.0, 1e-5, 1e-4, 1e-3};
    return c;
}

ScenarioConfig ScenarioConfig::cp_preset() {
    ScenarioConfig c;
    c.scenario = Scenario::cp;
    c.initial = {Flavor::mu};
    c.axis = SweepAxis::E;
    c.grid_min = 0.1;
    c.grid_max = 2.0;
    c.fixed = 295.0;
    c.delta = {-kPi / 2.0, 0.0, kPi / 2.0, kPi};
    c.shots = 4096;
    return c;
}

ScenarioConfig ScenarioConfig::defaults(Scenario s) {
    switch (s) {
        case Scenario::vacuum: return vacuum_preset();
        case Scenario::matter: return matter_preset();
        case Scenario::cp: return cp_preset();
    }
    return vacuum_preset();
}

void ScenarioConfig::validate() const {
    if (points < 2) throw std::invalid_argument("grid needs at least two points");
    if (!(grid_max > grid_min)) throw std::invalid_argument("grid maximum must exceed its minimum");
    if (initial.empty()) throw std::invalid_argument("no initial flavor");
    if (vm.empty() || delta.empty()) throw std::invalid_argument("vm and delta lists must be nonempty");
    if (axis == SweepAxis::E && !(grid_min > 0.0)) throw std::domain_error("energies must be positive");
    if (axis == SweepAxis::L_over_E && (!(grid_min >= 0.0) || !(fixed > 0.0)))
        throw std::domain_error("L/E grid needs L/E >= 0 and E > 0");
    if (axis == SweepAxis::E && !(fixed >= 0.0)) throw std::domain_error("baseline must be non-negative");
    for (double v : vm)
        if (!(v >= 0.0 && v <= kMaxMatterPotential)) throw std::domain_error("vm outside [0, 1e-2] eV^2");
    if (scenario == Scenario::vacuum && (vm != std::vector<double>{0.0} || delta != std::vector<double>{0.0}))
        throw std::invalid_argument("vacuum scenario takes vm = 0 and delta = 0 only");
    if (scenario == Scenario::matter && delta != std::vector<double>{0.0})
        throw std::invalid_argument("matter scenario takes delta = 0 only");
    if (!exact() && (shots == 0 || repeats < 1)) throw std::invalid_argument("shots and repeats must be positive");
    if (circuits_per_job < 4) throw std::invalid_argument("a job needs room beyond its three calibration circuits");
    readout.validate();
    if (mode == Mode::pulse) device.validate();
}

std::vector<CurveSpec> enumerate_curves(const ScenarioConfig& cfg) {
    std::vector<CurveSpec> out;
    for (Flavor f : cfg.initial)
        for (double v : cfg.vm)
            for (double d : cfg.delta) out.push_back({f, v, d});
    return out;
}

std::vector<double> sweep_grid(const ScenarioConfig& cfg) {
    std::vector<double> g(static_cast<std::size_t>(cfg.points));
    for (int i = 0; i < cfg.points; ++i) g[i] = cfg.grid_min + (cfg.grid_max - cfg.grid_min) * i / (cfg.points - 1);
    return g;
}

Baseline baseline_at(const ScenarioConfig& cfg, double x) {
    if (cfg.axis == SweepAxis::E) return {cfg.fixed, x};
    return {x * cfg.fixed, cfg.fixed};
}

const ResultRow& ResultTable::row(std::size_t curve, std::size_t point, int repeat) const {
    const std::size_t reps = static_cast<std::size_t>(config.effective_repeats());
    return rows.at((curve * grid.size() + point) * reps + static_cast<std::size_t>(repeat));
}

Vector3r ResultTable::mean(std::size_t curve, std::size_t point) const {
    const int reps = config.effective_repeats();
    Vector3r m = Vector3r::Zero();
    for (int r = 0; r < reps; ++r) m += row(curve, point, r).probabilities;
    return m / reps;
}

Vector3r analytic_probabilities(const OscillationParams& p, const CurveSpec& c, const Baseline& b) {
    OscillationParams q = p;
    q.delta = c.delta;
    return column(oscillation_matrix(q, c.vm, b), c.initial);
}

GateSequence curve_circuit(const ScenarioConfig& cfg, const CurveSpec& c, const Baseline& b) {
    OscillationParams q = cfg.params;
    q.delta = c.delta;
    return compile_circuit(q, cfg.scenario, c.vm, b);
}

ResultTable run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    ResultTable t;
    t.config = cfg;
    t.curves = enumerate_curves(cfg);
    t.grid = sweep_grid(cfg);
    const std::size_t np = t.grid.size();
    const int reps = cfg.effective_repeats();
    const std::uint64_t shots = cfg.effective_shots();
    const std::size_t per_job = static_cast<std::size_t>(cfg.points_per_job());
    const std::size_t jobs_per_curve = (np + per_job - 1) / per_job;
    const int threads = resolve_threads(cfg.threads);

    t.rows.resize(t.curves.size() * np * static_cast<std::size_t>(reps));
    for (std::size_t c = 0; c < t.curves.size(); ++c)
        for (std::size_t i = 0; i < np; ++i)
            for (int r = 0; r < reps; ++r) {
                ResultRow& row = t.rows[(c * np + i) * reps + r];
                row.curve = c;
                row.point = i;
                row.repeat = r;
                row.x = t.grid[i];
                row.ok = false;
            }

    PulseContext ctx;
    if (cfg.mode == Mode::pulse) {
        ctx.device = cfg.device;
        ctx.cal = cfg.calibration.value_or(PulseCalibration::exact(cfg.device));
        ctx.disc = train_discriminator(readout_experiment(ctx.device, ctx.device.readout_duration_us,
                                                          ctx.device.readout_amplitude, cfg.readout_training_shots,
                                                          derive_seed(cfg.seed, kReadoutStream)))
                       .classifier;
        std::vector<double> vms;
        for (const auto& c : t.curves)
            if (std::find(vms.begin(), vms.end(), c.vm) == vms.end()) vms.push_back(c.vm);
        std::vector<PhaseFitResult> fits(vms.size());
        std::string error;
        parallel_for(
            vms.size(), threads, [&](std::size_t k) { fits[k] = characterize_phases(cfg, ctx, vms[k]); }, error);
        if (!error.empty()) {
            t.failed = true;
            t.failure = "phase characterization: " + error;
            return t;
        }
        for (std::size_t k = 0; k < vms.size(); ++k) {
            ctx.phis[vms[k]] = fits[k].phis;
            t.phase_fits.push_back({vms[k], fits[k]});
        }
    }

    // Per-job readout calibration: three state-preparation circuits ahead of the job's points.
    struct JobContext {
        MockTransmon device;
        ConfusionMatrix confusion;
    };
    std::vector<JobContext> jobs;
    if (!cfg.exact()) {
        jobs.resize(t.curves.size() * jobs_per_curve * static_cast<std::size_t>(reps));
        std::string error;
        parallel_for(
            jobs.size(), threads,
            [&](std::size_t j) {
                const std::size_t r = j % reps, job = (j / reps) % jobs_per_curve, c = j / reps / jobs_per_curve;
                const std::uint64_t job_index = c * jobs_per_curve + job;
                const std::uint64_t seed = derive_seed(cfg.seed, (kJobStream << 40) | job_index, r);
                JobContext& jc = jobs[j];
                if (cfg.mode == Mode::pulse) {
                    jc.device = ctx.device.drift ? ctx.device.for_job(job_index * reps + r, cfg.seed) : ctx.device;
                    jc.confusion = calibration_circuits(jc.device, ctx.disc, shots, seed);
                } else {
                    for (int k = 0; k < 3; ++k)
                        jc.confusion.a.col(k) = apply_confusion(unit(k), cfg.readout, shots, derive_seed(seed, k)).frequencies();
                }
            },
            error);
        if (!error.empty()) {
            t.failed = true;
            t.failure = "readout calibration: " + error;
            return t;
        }
    }

    std::string error;
    parallel_for(
        t.curves.size() * np, threads,
        [&](std::size_t cell) {
            const std::size_t c = cell / np, i = cell % np;
            const CurveSpec& spec = t.curves[c];
            const Baseline b = baseline_at(cfg, t.grid[i]);
            Vector3r exact_probs;
            GateSequence seq;
            if (cfg.mode == Mode::analytic) {
                exact_probs = analytic_probabilities(cfg.params, spec, b);
            } else {
                seq = curve_circuit(cfg, spec, b);
                if (cfg.mode != Mode::pulse) exact_probs = probabilities(apply_sequence(spec.initial, seq));
            }
            if (cfg.mode == Mode::noisy) exact_probs = density_probabilities(inject_gate_errors(seq, spec.initial, cfg.gate_errors));

            for (int r = 0; r < reps; ++r) {
                ResultRow& row = t.rows[(c * np + i) * reps + r];
                if (cfg.exact()) {
                    row.probabilities = exact_probs;
                    row.ok = true;
                    continue;
                }
                const JobContext& jc = jobs[(c * jobs_per_curve + i / per_job) * reps + r];
                const std::uint64_t seed = derive_seed(cfg.seed, c * np + i, r);
                if (cfg.mode == Mode::pulse) {
                    if (r == 0) {
                        const GateSequence request = compensate(seq, ctx.phis.at(spec.vm));
                        exact_probs = pulse_probabilities(jc.device, ctx.cal, request.gates, spec.initial);
                    }
                    row.counts = pulse_counts(ctx, jc.device, exact_probs, shots, seed);
                } else {
                    row.counts = apply_confusion(exact_probs, cfg.readout, shots, seed);
                }
                row.probabilities = mitigate(row.counts.frequencies(), jc.confusion).probabilities;
                row.ok = true;
            }
        },
        error);
    if (!error.empty()) {
        t.failed = true;
        t.failure = error;
    }
    return t;
}

ResultTable analytic_reference(const ScenarioConfig& cfg) {
    ScenarioConfig a = cfg;
    a.mode = Mode::analytic;
    return run_scenario(a);
}

double r2_score(const std::vector<double>& y, const std::vector<double>& y0) {
    if (y.size() != y0.size() || y.empty()) throw std::invalid_argument("r2_score needs aligned nonempty curves");
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - y0[i]) * (y[i] - y0[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    double scale = 0.0;
    for (double v : y) scale += v * v;
    if (ss_tot <= 1e-28 * std::max(1.0, scale)) return std::numeric_limits<double>::quiet_NaN();
    return 1.0 - ss_res / ss_tot;
}

double ScoreReport::min_r2() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : curves)
        if (!std::isnan(c.r2)) m = std::min(m, c.r2);
    return m;
}

double ScoreReport::band_fraction() const {
    double in = 0.0, total = 0.0;
    for (const auto& c : curves) {
        in += c.band_fraction * static_cast<double>(c.scored_points);
        total += static_cast<double>(c.scored_points);
    }
    return total > 0.0 ? in / total : 0.0;
}

ScoreReport score(const ResultTable& table, const ResultTable& reference) {
    if (table.grid != reference.grid || table.curves.size() != reference.curves.size())
        throw std::invalid_argument("score needs tables on the same grid and curves");
    ScoreReport rep;
    rep.shots = table.config.effective_shots();
    rep.repeats = table.config.effective_repeats();
    for (std::size_t c = 0; c < table.curves.size(); ++c) {
        for (int f = 0; f < 3; ++f) {
            std::vector<double> y, y0;
            CurveScore s;
            s.curve = c;
            s.final_flavor = static_cast<Flavor>(f);
            double in_band = 0.0, below = 0.0, sum_rel = 0.0;
            for (std::size_t i = 0; i < table.grid.size(); ++i) {
                const double yi = table.mean(c, i)(f);
                const double ref = reference.mean(c, i)(f);
                y.push_back(yi);
                y0.push_back(ref);
                rep.max_abs_error = std::max(rep.max_abs_error, std::abs(yi - ref));
                if (std::abs(ref) > kRelativeErrorFloor) {
                    const double rel = std::abs(yi - ref) / std::abs(ref);
                    ++s.scored_points;
                    sum_rel += rel;
                    s.max_relative = std::max(s.max_relative, rel);
                    if (rel >= 0.01 && rel <= 0.10) in_band += 1.0;
                    if (rel < 0.01) below += 1.0;
                }
            }
            s.r2 = r2_score(y, y0);
            if (s.scored_points > 0) {
                const double n = static_cast<double>(s.scored_points);
                s.mean_relative = sum_rel / n;
                s.band_fraction = in_band / n;
                s.below_band_fraction = below / n;
            }
            rep.curves.push_back(s);
        }
    }
    return rep;
}

}  // namespace nuqutrit
