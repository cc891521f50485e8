#include "support.hpp"

#include "nuqutrit/calibration.hpp"
#include "nuqutrit/decomposition.hpp"
#include "nuqutrit/io.hpp"
#include "nuqutrit/phase_advance.hpp"
#include "nuqutrit/pmns.hpp"
#include "nuqutrit/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

using namespace nuqutrit;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
    std::printf("%s criterion %s: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string f(const char* format, double a, double b = 0, double c = 0, double d = 0, double e = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c, d, e);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double max_gate_curve_error(const ScenarioConfig& cfg) {
    ScenarioConfig ideal = cfg;
    ideal.mode = Mode::ideal;
    return score(run_scenario(ideal), analytic_reference(ideal)).max_abs_error;
}

void criterion1() {
    const auto t0 = Clock::now();
    ScenarioConfig cfg = ScenarioConfig::vacuum_preset();
    cfg.points = 300;
    cfg.threads = 1;
    double err = 0.0;
    std::size_t gates = 0;
    for (double x : sweep_grid(cfg))
        for (Flavor a : cfg.initial) {
            const GateSequence seq = curve_circuit(cfg, {a, 0.0, 0.0}, baseline_at(cfg, x));
            gates = seq.size();
            const Vector3r p = probabilities(apply_sequence(a, seq));
            const Vector3r ref = analytic_probabilities(cfg.params, {a, 0.0, 0.0}, baseline_at(cfg, x));
            err = std::max(err, (p - ref).cwiseAbs().maxCoeff());
        }
    const double t = seconds_since(t0);
    report("1 (vacuum oracle)", err < 1e-9 && t < 5.0 && gates == 6,
           f("%.0f gates, max abs error %.2e over 3x3 flavors x 300 points, %.3f s", double(gates), err, t));
}

void criterion2() {
    ScenarioConfig cfg = ScenarioConfig::matter_preset();
    cfg.initial = {Flavor::e, Flavor::mu, Flavor::tau};
    double err = 0.0, dmp_exact = 0.0;
    for (double vm : cfg.vm)
        for (double x : sweep_grid(cfg))
            for (Flavor a : cfg.initial) {
                const Baseline b = baseline_at(cfg, x);
                const CurveSpec c{a, vm, 0.0};
                const Vector3r p = probabilities(apply_sequence(a, curve_circuit(cfg, c, b)));
                const Vector3r dmp = analytic_probabilities(cfg.params, c, b);
                const Vector3r exact = exact_matter_matrix(cfg.params, vm, b).col(static_cast<int>(a));
                err = std::max(err, (p - dmp).cwiseAbs().maxCoeff());
                dmp_exact = std::max(dmp_exact, (dmp - exact).cwiseAbs().maxCoeff());
            }
    report("2 (matter oracle)", err < 1e-9 && dmp_exact <= 1e-2,
           f("circuit vs DMP %.2e; DMP vs exact diagonalization %.2e (bound 1e-2)", err, dmp_exact));
}

void criterion3() {
    ScenarioConfig cfg = ScenarioConfig::cp_preset();
    cfg.initial = {Flavor::e, Flavor::mu, Flavor::tau};
    double err = 0.0, reduction = 0.0;
    std::size_t gates = 0;
    for (double d : cfg.delta)
        for (double x : sweep_grid(cfg))
            for (Flavor a : cfg.initial) {
                const Baseline b = baseline_at(cfg, x);
                const GateSequence seq = curve_circuit(cfg, {a, 0.0, d}, b);
                gates = seq.size();
                const Vector3r p = probabilities(apply_sequence(a, seq));
                err = std::max(err, (p - analytic_probabilities(cfg.params, {a, 0.0, d}, b)).cwiseAbs().maxCoeff());
                if (d == 0.0) {
                    ScenarioConfig vac = cfg;
                    vac.scenario = Scenario::vacuum;
                    const Vector3r pv = probabilities(apply_sequence(a, curve_circuit(vac, {a, 0.0, 0.0}, b)));
                    reduction = std::max(reduction, (p - pv).cwiseAbs().maxCoeff());
                }
            }
    report("3 (CP oracle)", err < 1e-9 && reduction < 1e-12 && gates == 8,
           f("%.0f gates, max abs error %.2e; delta=0 vs vacuum circuit %.2e", double(gates), err, reduction));
}

void criterion4() {
    const OscillationParams nf = OscillationParams::nufit51();
    double worst = verify_decomposition(build_pmns(nf), decompose(nf, Scenario::vacuum).r);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        const OscillationParams p = fixtures::random_params(rng);
        worst = std::max(worst, verify_decomposition(build_pmns(p), decompose(p, Scenario::cp).r));
    }
    const AlphaAngles a = solve_alphas(nf);
    // Strip the leading theta12 rotation so the three fitted angles are alpha1..alpha3 themselves.
    const Matrix3c g12 = givens_matrix(decompose(nf, Scenario::vacuum).r.gates.front());
    const FitDecompositionResult fit = fit_decomposition(build_pmns(nf) * g12.adjoint());
    const double dcos = std::max({std::abs(std::abs(std::cos(a.alpha1 / 2)) - std::abs(std::cos(fit.alphas.alpha1 / 2))),
                                  std::abs(std::abs(std::cos(a.alpha2 / 2)) - std::abs(std::cos(fit.alphas.alpha2 / 2))),
                                  std::abs(std::abs(std::cos(a.alpha3 / 2)) - std::abs(std::cos(fit.alphas.alpha3 / 2)))});
    report("4 (decomposition certificate)", worst < 1e-10 && dcos < 1e-6,
           f("max residual %.2e over NuFIT + 100 random draws; fitted |cos(alpha/2)| deviation %.2e", worst, dcos));
}

void criterion5() {
    bool ok = true;
    std::string detail;
    for (Scenario s : {Scenario::vacuum, Scenario::matter, Scenario::cp}) {
        ScenarioConfig cfg = ScenarioConfig::defaults(s);
        cfg.mode = Mode::sampled;
        cfg.shots = 8192;
        cfg.repeats = 4;
        const auto t0 = Clock::now();
        const ResultTable t = run_scenario(cfg);
        const double secs = seconds_since(t0);
        const ResultTable ref = analytic_reference(cfg);
        const ScoreReport r = score(t, ref);
        double single_band = 0.0, single_n = 0.0;
        for (const auto& row : t.rows) {
            const Vector3r y0 = ref.mean(row.curve, row.point);
            for (int k = 0; k < 3; ++k) {
                if (y0[k] <= kRelativeErrorFloor) continue;
                const double e = std::abs(row.probabilities[k] - y0[k]) / y0[k];
                single_band += (e >= 0.01 && e <= 0.10) ? 1.0 : 0.0;
                single_n += 1.0;
            }
        }
        double below = 0.0, n = 0.0;
        for (const auto& c : r.curves) {
            below += c.below_band_fraction * static_cast<double>(c.scored_points);
            n += static_cast<double>(c.scored_points);
        }
        const bool pass = !t.failed && r.min_r2() >= 0.92 && r.band_fraction() > 0.5 && secs < 60.0;
        ok &= pass;
        detail += std::string(scenario_name(s)) +
                  f(": min R2 %.4f, share in [1%%,10%%] %.2f, below 1%% %.2f, single-repeat share %.2f, %.2f s; ",
                    r.min_r2(), r.band_fraction(), n > 0 ? below / n : 0.0,
                    single_n > 0 ? single_band / single_n : 0.0, secs);
    }
    report("5 (sampled pipeline)", ok, detail + "gates: R2 >= 0.92, in-band share of repeat means > 0.5, < 60 s");
}

void criterion6() {
    const MockTransmon dev = MockTransmon::jakarta_q0();
    PulseCalibration cal = PulseCalibration::backend(dev);
    cal.f12_ghz = 0.0;
    const std::vector<double> freqs = linspace(4.847, 4.947, 51);
    const double step = freqs[1] - freqs[0];
    const SpectroscopyResult spec = rabi_spectroscopy_12(dev, freqs, 8192, 61, cal);
    cal.f12_ghz = spec.f12_ghz;

    double rabi0 = 0.0, rabi1024 = 0.0;
    for (Subspace s : {Subspace::s01, Subspace::s12}) {
        const auto grid = s == Subspace::s01 ? linspace(0.0, 0.5, 41) : linspace(0.0, 0.35, 41);
        const double truth = s == Subspace::s01 ? dev.a_pi_01 : dev.a_pi_12;
        rabi0 = std::max(rabi0, std::abs(rabi_amplitude(dev, s, grid, 0, 62, cal).a_pi / truth - 1.0));
        rabi1024 = std::max(rabi1024, std::abs(rabi_amplitude(dev, s, grid, 1024, 63, cal).a_pi / truth - 1.0));
    }

    const SilhouetteResult sil = silhouette_optimize(dev, linspace(2.0, 5.0, 13), linspace(0.4, 1.0, 13), 300, 64);
    const bool sil_ok = std::abs(sil.best_duration_us - 4.0) <= 0.25 + 1e-9 && std::abs(sil.best_amplitude - 0.91) <= 0.05 + 1e-9;

    const ErrorAmplificationResult ea = error_amplification(dev, 100, 8192, 65, cal);
    const double e_eps = std::abs(ea.under_rotation / dev.under_rotation_12 - 1.0);
    const double e_dec = std::abs(ea.decay_rate_khz / dev.decay_rate_khz - 1.0);

    const bool ok = std::abs(spec.f12_ghz - dev.f12_ghz) <= step && rabi0 < 0.01 && rabi1024 < 0.03 && sil_ok &&
                    e_eps < 0.2 && e_dec < 0.2;
    report("6 (calibration recovery)", ok,
           f("f12 %.5f GHz (step %.3f); A_pi error %.2e noiseless, %.2e at 1024 shots; ", spec.f12_ghz, step, rabi0,
             rabi1024) +
               f("readout optimum (%.2f us, %.2f); eps %.5f rad, decay %.2f kHz", sil.best_duration_us,
                 sil.best_amplitude, ea.under_rotation, ea.decay_rate_khz));
}

void criterion7() {
    const MockTransmon dev = MockTransmon::jakarta_q0();
    const PhaseAdvanceModel model = PhaseAdvanceModel::from_device(dev.f01_ghz, dev.f12_ghz, dev.td_dt, dev.dt_ns);
    ScenarioConfig cfg = ScenarioConfig::cp_preset();
    double closure = 0.0;
    for (Scenario s : {Scenario::vacuum, Scenario::matter, Scenario::cp}) {
        cfg.scenario = s;
        for (double x : linspace(0.1, 2.0, 25))
            for (Flavor a : {Flavor::e, Flavor::mu, Flavor::tau}) {
                const CurveSpec c{a, s == Scenario::matter ? 1e-4 : 0.0, s == Scenario::cp ? 0.7 : 0.0};
                const GateSequence seq = curve_circuit(cfg, c, baseline_at(cfg, x));
                const Vector3r ideal = probabilities(apply_sequence(a, seq));
                const Vector3r run = probabilities(apply_sequence(a, apply_phase_advances(compensate(seq, model), model)));
                closure = std::max(closure, (ideal - run).cwiseAbs().maxCoeff());
            }
    }

    const auto& table = io::reported_phase_table();
    double exact = 0.0, sampled = 0.0;
    for (const auto& row : {table[0], table[3]}) {
        const Scenario s = row.phis.size() == 5 ? Scenario::vacuum : Scenario::cp;
        const auto design = fixtures::phase_design(s, row.phis, 0, 0);
        const auto truth = canonical_gauge(design.front().ideal.gates, row.phis);
        exact = std::max(exact, fixtures::max_phase_error(fit_phase_advances(design).phis, truth));
        const auto noisy = fixtures::phase_design(s, row.phis, 8192 * 4, 77);
        sampled = std::max(sampled, fixtures::max_phase_error(fit_phase_advances(noisy).phis, truth));
    }
    report("7 (phase-advance closure)", closure < 1e-12 && exact < 1e-6 && sampled < 0.05,
           f("compensation residual %.2e; 5- and 7-phase fits off by %.2e (exact), %.2e rad (8192x4 shots)", closure,
             exact, sampled));
}

void criterion8() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "nuqutrit_acceptance";
    bool ok = true;
    std::string detail;
    for (Mode m : {Mode::sampled, Mode::noisy, Mode::pulse}) {
        ScenarioConfig cfg = ScenarioConfig::matter_preset();
        cfg.mode = m;
        if (m == Mode::pulse) {
            cfg.vm = {1e-4};
            cfg.points = 40;
        }
        cfg.threads = 4;
        const ResultTable first = run_scenario(cfg);
        io::write_manifest(first, dir / "manifest.json");
        ScenarioConfig replay = io::config_from_manifest(io::read_json(dir / "manifest.json"));
        replay.threads = 1;
        const ResultTable second = run_scenario(replay);
        bool same = first.rows.size() == second.rows.size() && !first.failed && !second.failed;
        for (std::size_t i = 0; same && i < first.rows.size(); ++i) same = first.rows[i].counts == second.rows[i].counts;
        ok &= same;
        detail += std::string(mode_name(m)) + (same ? " identical" : " DIFFERENT") + "; ";
    }
    fs::remove_all(dir);
    report("8 (determinism)", ok, detail + "manifest replay with 4 vs 1 threads");
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                      criterion5, criterion6, criterion7, criterion8};
    for (const auto& c : criteria) {
        try {
            c();
        } catch (const std::exception& e) {
            std::printf("FAIL criterion: exception %s\n", e.what());
            ++failures;
        }
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
