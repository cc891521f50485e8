#include "nuqutrit/calibration.hpp"
#include "nuqutrit/io.hpp"
#include "nuqutrit/runner.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace nuqutrit;

namespace {

struct RunFlags {
    std::string mode;
    std::optional<std::uint64_t> shots;
    std::optional<int> repeats;
    std::optional<std::uint64_t> seed;
    std::optional<int> points;
    std::optional<int> threads;
    std::string config;
    std::string out;
    std::string device;
    double min_r2 = 0.92;
};

fs::path output_dir(const std::string& flag, const std::string& leaf) {
    if (!flag.empty()) return flag;
    const char* env = std::getenv(io::kOutputEnv);
    return fs::path(env && *env ? env : "out") / leaf;
}

bool gate(const char* name, bool ok, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    return ok;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

int run_scenario_command(Scenario scenario, const RunFlags& f) {
    ScenarioConfig cfg = ScenarioConfig::defaults(scenario);
    if (!f.config.empty()) {
        io::json j = io::read_json(f.config);
        if (j.contains("scenario") && parse_scenario(j.at("scenario").get<std::string>()) != scenario)
            throw std::invalid_argument("config scenario does not match the subcommand");
        j["scenario"] = scenario_name(scenario);
        cfg = io::config_from_json(j);
    }
    if (!f.mode.empty()) cfg.mode = parse_mode(f.mode);
    if (f.shots) cfg.shots = *f.shots;
    if (f.repeats) cfg.repeats = *f.repeats;
    if (f.seed) cfg.seed = *f.seed;
    if (f.points) cfg.points = *f.points;
    if (f.threads) cfg.threads = *f.threads;
    if (!f.device.empty()) cfg.device = io::device_from_json(io::read_json(f.device));
    cfg.validate();

    const ResultTable table = run_scenario(cfg);
    const ResultTable reference = analytic_reference(cfg);
    const ScoreReport report = score(table, reference);

    const fs::path dir =
        output_dir(f.out, std::string(scenario_name(scenario)) + "-" + std::string(mode_name(cfg.mode)));
    io::write_csv(table, dir / "results.csv");
    io::write_manifest(table, dir / "manifest.json", &report);
    io::write_text(dir / "score.json", io::score_to_json(report, table).dump(2) + "\n");
    io::write_gnuplot(table, reference, dir / "plots");
    std::printf("wrote %s\n", dir.string().c_str());

    bool ok = gate("run", !table.failed, table.failed ? table.failure : "all points executed");
    double worst = 0.0;
    for (const auto& r : table.rows)
        worst = std::max(worst, std::abs(r.probabilities.sum() - 1.0) + std::max(0.0, -r.probabilities.minCoeff()));
    ok &= gate("probabilities", worst < 1e-9, "max simplex violation " + num(worst));

    ScenarioConfig ideal = cfg;
    ideal.mode = Mode::ideal;
    const double consistency = score(run_scenario(ideal), reference).max_abs_error;
    ok &= gate("compiled-circuit consistency", consistency < 1e-9, "max |ideal - analytic| " + num(consistency));

    if (cfg.mode == Mode::sampled || cfg.mode == Mode::pulse)
        ok &= gate("R2", report.min_r2() >= f.min_r2, "min R2 " + num(report.min_r2()) + " (gate " + num(f.min_r2) + ")");
    else
        std::printf("INFO R2: min %s\n", num(report.min_r2()).c_str());
    std::printf("INFO relative error: share in [1%%, 10%%] %s over points with P > %s\n",
                num(report.band_fraction()).c_str(), num(kRelativeErrorFloor).c_str());
    return ok ? 0 : 1;
}

int calibrate_command(const RunFlags& f) {
    MockTransmon dev = f.device.empty() ? MockTransmon::jakarta_q0() : io::device_from_json(io::read_json(f.device));
    CalibrationOptions opts;
    if (f.shots) opts.shots = *f.shots;
    if (f.seed) opts.seed = *f.seed;
    const CalibrationReport rep = calibrate(dev, opts);
    const fs::path dir = output_dir(f.out, "calibrate");
    io::write_text(dir / "calibration.json", io::calibration_report_to_json(rep).dump(2) + "\n");
    io::write_text(dir / "heatmap.csv", io::heatmap_csv(rep.readout));
    std::printf("wrote %s\n", dir.string().c_str());

    bool ok = true;
    ok &= gate("spectroscopy", std::abs(rep.spectroscopy.f12_ghz - dev.f12_ghz) <= 0.002,
               "f12 " + num(rep.spectroscopy.f12_ghz) + " GHz");
    ok &= gate("rabi01", std::abs(rep.rabi01.a_pi / dev.a_pi_01 - 1.0) <= 0.03, "A_pi " + num(rep.rabi01.a_pi));
    ok &= gate("rabi12", std::abs(rep.rabi12.a_pi / dev.a_pi_12 - 1.0) <= 0.03, "A_pi " + num(rep.rabi12.a_pi));
    ok &= gate("readout", rep.readout.best_score > 0.0,
               "best (" + num(rep.readout.best_duration_us) + " us, " + num(rep.readout.best_amplitude) +
                   ") silhouette " + num(rep.readout.best_score));
    ok &= gate("discriminator", rep.discriminator.accuracy.minCoeff() > 0.5,
               "accuracy " + num(rep.discriminator.accuracy(0)) + " " + num(rep.discriminator.accuracy(1)) + " " +
                   num(rep.discriminator.accuracy(2)));
    std::printf("INFO error amplification: under-rotation %s rad, decay %s kHz\n",
                num(rep.amplification.under_rotation).c_str(), num(rep.amplification.decay_rate_khz).c_str());
    return ok ? 0 : 1;
}

int score_command(const std::string& manifest_path, const std::string& results_path, bool replay,
                  const std::string& out) {
    const io::json m = io::read_json(manifest_path);
    const ScenarioConfig cfg = io::config_from_manifest(m);
    const ResultTable reference = analytic_reference(cfg);

    ResultTable table = reference;
    table.config = cfg;
    const fs::path csv = results_path.empty() ? fs::path(manifest_path).parent_path() / "results.csv" : fs::path(results_path);
    table.rows = io::read_csv(csv);
    if (table.rows.size() != table.curves.size() * table.grid.size() * static_cast<std::size_t>(cfg.effective_repeats()))
        throw std::invalid_argument("results do not match the manifest grid");
    const ScoreReport report = score(table, reference);
    const io::json js = io::score_to_json(report, table);
    if (!out.empty()) io::write_text(out, js.dump(2) + "\n");
    std::printf("min R2 %s, share of relative errors in [1%%, 10%%] %s\n", num(report.min_r2()).c_str(),
                num(report.band_fraction()).c_str());

    bool ok = true;
    const std::string recorded = m.at("counts_digest").get<std::string>();
    char digest[20];
    std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(io::counts_digest(table)));
    ok &= gate("results match manifest", recorded == digest, std::string("digest ") + digest);
    if (replay) {
        std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(io::counts_digest(run_scenario(cfg))));
        ok &= gate("replay", recorded == digest, std::string("digest ") + digest);
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neutrino oscillations on a simulated transmon qutrit"};
    app.require_subcommand(1);
    RunFlags flags;

    auto add_run_flags = [&](CLI::App* sub) {
        sub->add_option("--mode", flags.mode, "analytic | ideal | sampled | noisy | pulse");
        sub->add_option("--shots", flags.shots, "shots per circuit");
        sub->add_option("--repeats", flags.repeats, "independent repeats per point");
        sub->add_option("--seed", flags.seed, "master seed");
        sub->add_option("--points", flags.points, "grid points per curve");
        sub->add_option("--threads", flags.threads, "worker threads (0: all cores)");
        sub->add_option("--config", flags.config, "scenario JSON file");
        sub->add_option("--out", flags.out, std::string("output directory (default $") + io::kOutputEnv + "/<run>)");
        sub->add_option("--device", flags.device, "device JSON file");
        sub->add_option("--min-r2", flags.min_r2, "R2 gate for sampled and pulse modes");
    };
    CLI::App* vacuum = app.add_subcommand("vacuum", "vacuum oscillations over one Phi01 period");
    CLI::App* matter = app.add_subcommand("matter", "matter oscillations for several potentials");
    CLI::App* cp = app.add_subcommand("cp", "CP-violating appearance at a fixed baseline");
    for (auto* s : {vacuum, matter, cp}) add_run_flags(s);

    CLI::App* cal = app.add_subcommand("calibrate", "calibrate the mock transmon");
    cal->add_option("--shots", flags.shots, "shots per calibration point");
    cal->add_option("--seed", flags.seed, "master seed");
    cal->add_option("--out", flags.out, "output directory");
    cal->add_option("--device", flags.device, "device JSON file");

    std::string manifest_path, results_path, score_out;
    bool replay = false;
    CLI::App* sc = app.add_subcommand("score", "score a results table against analytics");
    sc->add_option("--manifest", manifest_path, "run manifest")->required();
    sc->add_option("--results", results_path, "results CSV (default: next to the manifest)");
    sc->add_option("--out", score_out, "score JSON output file");
    sc->add_flag("--replay", replay, "rerun the manifest and compare counts");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*vacuum) return run_scenario_command(Scenario::vacuum, flags);
        if (*matter) return run_scenario_command(Scenario::matter, flags);
        if (*cp) return run_scenario_command(Scenario::cp, flags);
        if (*cal) return calibrate_command(flags);
        if (*sc) return score_command(manifest_path, results_path, replay, score_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
