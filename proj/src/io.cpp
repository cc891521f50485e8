#include "nuqutrit/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nuqutrit::io {

namespace fs = std::filesystem;

namespace {

constexpr double kDeg = 180.0 / kPi;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
void take(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }
cplx complex_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json curve_to_json(const Curve& c) { return {{"x", c.x}, {"y", c.y}}; }

json fit_to_json(const CurveFitResult& f) {
    std::vector<double> p(f.params.data(), f.params.data() + f.params.size());
    std::vector<double> e(f.std_errors.data(), f.std_errors.data() + f.std_errors.size());
    return {{"model", curve_model_name(f.model)}, {"params", p}, {"std_errors", e}, {"residual_norm", f.residual_norm}};
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot open", p);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(std::string("invalid JSON (") + e.what() + ")", p);
    }
}

void write_text(const fs::path& p, const std::string& text) {
    std::error_code ec;
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + p.parent_path().string(), p);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write", p);
    out << text;
    if (!out) throw IoError("write failed", p);
}

OscillationParams params_from_json(const json& j, const OscillationParams& base) {
    OscillationParams p = base;
    if (j.contains("theta12_deg")) p.theta12 = j.at("theta12_deg").get<double>() / kDeg;
    if (j.contains("theta23_deg")) p.theta23 = j.at("theta23_deg").get<double>() / kDeg;
    if (j.contains("theta13_deg")) p.theta13 = j.at("theta13_deg").get<double>() / kDeg;
    if (j.contains("delta_deg")) p.delta = j.at("delta_deg").get<double>() / kDeg;
    take(j, "dm2_21_ev2", p.dm2_21);
    take(j, "dm2_31_ev2", p.dm2_31);
    return p;
}

json params_to_json(const OscillationParams& p) {
    return {{"theta12_deg", p.theta12 * kDeg}, {"theta23_deg", p.theta23 * kDeg}, {"theta13_deg", p.theta13 * kDeg},
            {"delta_deg", p.delta * kDeg},     {"dm2_21_ev2", p.dm2_21},           {"dm2_31_ev2", p.dm2_31}};
}

MockTransmon device_from_json(const json& j, const MockTransmon& base) {
    MockTransmon d = base;
    take(j, "f01_ghz", d.f01_ghz);
    take(j, "f12_ghz", d.f12_ghz);
    take(j, "a_pi_01", d.a_pi_01);
    take(j, "a_pi_12", d.a_pi_12);
    take(j, "dt_ns", d.dt_ns);
    take(j, "td_dt", d.td_dt);
    take(j, "sigma_dt", d.sigma_dt);
    take(j, "under_rotation_12", d.under_rotation_12);
    take(j, "decay_rate_khz", d.decay_rate_khz);
    take(j, "crosstalk", d.crosstalk);
    take(j, "substeps", d.substeps);
    take(j, "readout_duration_us", d.readout_duration_us);
    take(j, "readout_amplitude", d.readout_amplitude);
    take(j, "ej_over_ec", d.ej_over_ec);
    take(j, "drift", d.drift);
    take(j, "drift_centroid", d.drift_centroid);
    take(j, "drift_amplitude", d.drift_amplitude);
    if (j.contains("readout")) {
        const json& r = j.at("readout");
        if (r.contains("centroids"))
            for (std::size_t k = 0; k < 3; ++k) d.readout.centroid[k] = complex_from_json(r.at("centroids").at(k));
        take(r, "sigma0", d.readout.sigma0);
        take(r, "tau_us", d.readout.tau_us);
        take(r, "d_knee_us", d.readout.d_knee_us);
        take(r, "a_knee", d.readout.a_knee);
        take(r, "kappa_d", d.readout.kappa_d);
        take(r, "kappa_a", d.readout.kappa_a);
    }
    d.validate();
    return d;
}

json device_to_json(const MockTransmon& d) {
    json cents = json::array();
    for (const auto& c : d.readout.centroid) cents.push_back(complex_to_json(c));
    return {{"f01_ghz", d.f01_ghz},
            {"f12_ghz", d.f12_ghz},
            {"a_pi_01", d.a_pi_01},
            {"a_pi_12", d.a_pi_12},
            {"dt_ns", d.dt_ns},
            {"td_dt", d.td_dt},
            {"sigma_dt", d.sigma_dt},
            {"under_rotation_12", d.under_rotation_12},
            {"decay_rate_khz", d.decay_rate_khz},
            {"crosstalk", d.crosstalk},
            {"substeps", d.substeps},
            {"readout_duration_us", d.readout_duration_us},
            {"readout_amplitude", d.readout_amplitude},
            {"ej_over_ec", d.ej_over_ec},
            {"drift", d.drift},
            {"drift_centroid", d.drift_centroid},
            {"drift_amplitude", d.drift_amplitude},
            {"readout",
             {{"centroids", cents},
              {"sigma0", d.readout.sigma0},
              {"tau_us", d.readout.tau_us},
              {"d_knee_us", d.readout.d_knee_us},
              {"a_knee", d.readout.a_knee},
              {"kappa_d", d.readout.kappa_d},
              {"kappa_a", d.readout.kappa_a}}}};
}

PulseCalibration calibration_from_json(const json& j, const PulseCalibration& base) {
    PulseCalibration c = base;
    take(j, "f01_ghz", c.f01_ghz);
    take(j, "f12_ghz", c.f12_ghz);
    take(j, "a_pi_01", c.a_pi_01);
    take(j, "a_pi_12", c.a_pi_12);
    take(j, "td_dt", c.td_dt);
    take(j, "sigma_dt", c.sigma_dt);
    take(j, "lifted", c.lifted);
    return c;
}

json calibration_to_json(const PulseCalibration& c) {
    return {{"f01_ghz", c.f01_ghz}, {"f12_ghz", c.f12_ghz}, {"a_pi_01", c.a_pi_01}, {"a_pi_12", c.a_pi_12},
            {"td_dt", c.td_dt},     {"sigma_dt", c.sigma_dt}, {"lifted", c.lifted}};
}

json confusion_to_json(const ConfusionMatrix& c) {
    json rows = json::array();
    for (int i = 0; i < 3; ++i) rows.push_back({c.a(i, 0), c.a(i, 1), c.a(i, 2)});
    return rows;
}

ConfusionMatrix confusion_from_json(const json& j) {
    ConfusionMatrix c;
    if (j.is_object()) {
        Vector3r d;
        for (int k = 0; k < 3; ++k) d(k) = j.at("accuracies").at(k).get<double>();
        c = ConfusionMatrix::from_accuracies(d);
    } else {
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) c.a(i, k) = j.at(i).at(k).get<double>();
    }
    c.validate();
    return c;
}

json sequence_to_json(const GateSequence& seq) {
    json gates = json::array();
    for (const auto& g : seq.gates)
        gates.push_back({{"subspace", subspace_name(g.subspace)}, {"phi", g.phi}, {"theta", g.theta}});
    return {{"order", "application"}, {"scenario", scenario_name(seq.scenario)}, {"gates", gates}};
}

GateSequence sequence_from_json(const json& j) {
    GateSequence s;
    const std::string order = j.value("order", "application");
    if (order != "application" && order != "matrix") throw std::invalid_argument("unknown gate order: " + order);
    if (j.contains("scenario")) s.scenario = parse_scenario(j.at("scenario").get<std::string>());
    for (const auto& g : j.at("gates"))
        s.gates.push_back(GivensGate::make(parse_subspace(g.at("subspace").get<std::string>()),
                                           g.at("phi").get<double>(), g.at("theta").get<double>()));
    if (order == "matrix") std::reverse(s.gates.begin(), s.gates.end());
    return s;
}

ScenarioConfig config_from_json(const json& j) {
    const Scenario s = j.contains("scenario") ? parse_scenario(j.at("scenario").get<std::string>()) : Scenario::vacuum;
    ScenarioConfig c = ScenarioConfig::defaults(s);
    if (j.contains("params")) c.params = params_from_json(j.at("params"), c.params);
    if (j.contains("initial")) {
        c.initial.clear();
        for (const auto& f : j.at("initial")) c.initial.push_back(parse_flavor(f.get<std::string>()));
    }
    if (j.contains("axis")) c.axis = parse_axis(j.at("axis").get<std::string>());
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        take(g, "min", c.grid_min);
        take(g, "max", c.grid_max);
        take(g, "points", c.points);
    } else if (!j.contains("axis") && s != Scenario::cp) {
        c.grid_max = full_phi01_period(c.params);
    }
    take(j, "fixed", c.fixed);
    take(j, "vm", c.vm);
    take(j, "delta", c.delta);
    if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
    take(j, "shots", c.shots);
    take(j, "repeats", c.repeats);
    take(j, "seed", c.seed);
    take(j, "circuits_per_job", c.circuits_per_job);
    take(j, "threads", c.threads);
    if (j.contains("readout")) c.readout = confusion_from_json(j.at("readout"));
    if (j.contains("gate_errors")) {
        const json& g = j.at("gate_errors");
        take(g, "under_rotation", c.gate_errors.under_rotation);
        take(g, "decay_rate_hz", c.gate_errors.decay_rate_hz);
        take(g, "gate_duration_s", c.gate_errors.gate_duration_s);
    }
    if (j.contains("device")) c.device = device_from_json(j.at("device"));
    if (j.contains("calibration") && !j.at("calibration").is_null())
        c.calibration = calibration_from_json(j.at("calibration"), PulseCalibration::exact(c.device));
    take(j, "readout_training_shots", c.readout_training_shots);
    c.validate();
    return c;
}

json config_to_json(const ScenarioConfig& c) {
    json init = json::array();
    for (Flavor f : c.initial) init.push_back(flavor_name(f));
    return {{"scenario", scenario_name(c.scenario)},
            {"initial", init},
            {"axis", axis_name(c.axis)},
            {"grid", {{"min", c.grid_min}, {"max", c.grid_max}, {"points", c.points}}},
            {"fixed", c.fixed},
            {"vm", c.vm},
            {"delta", c.delta},
            {"mode", mode_name(c.mode)},
            {"shots", c.shots},
            {"repeats", c.repeats},
            {"seed", c.seed},
            {"circuits_per_job", c.circuits_per_job},
            {"threads", c.threads},
            {"params", params_to_json(c.params)},
            {"readout", confusion_to_json(c.readout)},
            {"gate_errors",
             {{"under_rotation", c.gate_errors.under_rotation},
              {"decay_rate_hz", c.gate_errors.decay_rate_hz},
              {"gate_duration_s", c.gate_errors.gate_duration_s}}},
            {"device", device_to_json(c.device)},
            {"calibration", c.calibration ? calibration_to_json(*c.calibration) : json(nullptr)},
            {"readout_training_shots", c.readout_training_shots}};
}

std::string results_csv(const ResultTable& t) {
    std::ostringstream out;
    out << "scenario,curve,init_flavor,vm,delta," << axis_name(t.config.axis)
        << ",repeat,n0,n1,n2,shots,seed,p0,p1,p2,ok\n";
    const std::string scen(scenario_name(t.config.scenario));
    for (const auto& r : t.rows) {
        const CurveSpec& c = t.curves.at(r.curve);
        out << scen << ',' << r.curve << ',' << flavor_name(c.initial) << ',' << fmt(c.vm) << ',' << fmt(c.delta)
            << ',' << fmt(r.x) << ',' << r.repeat << ',' << r.counts.n[0] << ',' << r.counts.n[1] << ','
            << r.counts.n[2] << ',' << r.counts.shots << ',' << r.counts.seed << ',' << fmt(r.probabilities(0))
            << ',' << fmt(r.probabilities(1)) << ',' << fmt(r.probabilities(2)) << ',' << (r.ok ? 1 : 0) << '\n';
    }
    if (t.failed) out << "# failed: " << t.failure << '\n';
    return out.str();
}

void write_csv(const ResultTable& t, const fs::path& p) { write_text(p, results_csv(t)); }

std::vector<ResultRow> read_csv(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot open", p);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV", p);
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto f = split(line, ',');
        if (f.size() != 16) throw IoError("malformed CSV row", p);
        ResultRow r;
        r.curve = std::stoull(f[1]);
        r.x = std::strtod(f[5].c_str(), nullptr);
        r.repeat = std::stoi(f[6]);
        for (int k = 0; k < 3; ++k) r.counts.n[k] = std::stoull(f[7 + k]);
        r.counts.shots = std::stoull(f[10]);
        r.counts.seed = std::stoull(f[11]);
        for (int k = 0; k < 3; ++k) r.probabilities(k) = std::strtod(f[12 + k].c_str(), nullptr);
        r.ok = f[15] == "1";
        rows.push_back(r);
    }
    return rows;
}

std::uint64_t counts_digest(const ResultTable& t) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& r : t.rows) {
        for (auto n : r.counts.n) mix(n);
        mix(r.counts.shots);
        mix(r.counts.seed);
    }
    return h;
}

json manifest(const ResultTable& t, const ScoreReport* report) {
    char digest[20];
    std::snprintf(digest, sizeof digest, "%016" PRIx64, counts_digest(t));
    json fits = json::array();
    for (const auto& f : t.phase_fits)
        fits.push_back({{"vm", f.vm}, {"phis", f.fit.phis}, {"uncertainty", f.fit.uncertainty}});
    json m = {{"tool", "nuqutrit"},
              {"version", kVersion},
              {"config", config_to_json(t.config)},
              {"seeds",
               {{"master", t.config.seed},
                {"point", "derive_seed(master, curve * points + point, repeat)"},
                {"job", "derive_seed(master, 0x10b << 40 | curve * jobs_per_curve + job, repeat)"}}},
              {"rows", t.rows.size()},
              {"counts_digest", digest},
              {"status", t.failed ? "failed" : "ok"},
              {"failure", t.failure},
              {"phase_fits", fits}};
    if (report) m["score"] = score_to_json(*report, t);
    return m;
}

void write_manifest(const ResultTable& t, const fs::path& p, const ScoreReport* report) {
    write_text(p, manifest(t, report).dump(2) + "\n");
}

ScenarioConfig config_from_manifest(const json& m) { return config_from_json(m.at("config")); }

std::vector<fs::path> write_gnuplot(const ResultTable& t, const ResultTable& reference, const fs::path& dir) {
    std::vector<fs::path> files;
    std::ostringstream script;
    script << "set xlabel '" << (t.config.axis == SweepAxis::E ? "E (GeV)" : "L/E (km/GeV)") << "'\n"
           << "set ylabel 'probability'\nset yrange [0:1]\n";
    for (std::size_t c = 0; c < t.curves.size(); ++c) {
        const CurveSpec& spec = t.curves[c];
        std::ostringstream out;
        out << "# init=" << flavor_name(spec.initial) << " vm=" << fmt(spec.vm) << " delta=" << fmt(spec.delta)
            << "\n# x p_e p_mu p_tau analytic_e analytic_mu analytic_tau\n";
        for (std::size_t i = 0; i < t.grid.size(); ++i) {
            const Vector3r m = t.mean(c, i), a = reference.mean(c, i);
            out << fmt(t.grid[i]);
            for (int k = 0; k < 3; ++k) out << ' ' << fmt(m(k));
            for (int k = 0; k < 3; ++k) out << ' ' << fmt(a(k));
            out << '\n';
        }
        const fs::path file = dir / ("curve_" + std::to_string(c) + ".dat");
        write_text(file, out.str());
        files.push_back(file);
        script << "set title 'init " << flavor_name(spec.initial) << ", vm " << fmt(spec.vm) << ", delta "
               << fmt(spec.delta) << "'\nplot";
        for (int k = 0; k < 3; ++k)
            script << (k ? "," : "") << " '" << file.filename().string() << "' u 1:" << 5 + k << " w l lc " << k + 1
                   << " t 'analytic " << flavor_name(static_cast<Flavor>(k)) << "', '' u 1:" << 2 + k << " w p lc "
                   << k + 1 << " pt 7 ps 0.4 notitle";
        script << "\npause -1\n";
    }
    const fs::path gp = dir / "plot.gp";
    write_text(gp, script.str());
    files.push_back(gp);
    return files;
}

json score_to_json(const ScoreReport& r, const ResultTable& t) {
    json curves = json::array();
    for (const auto& s : r.curves) {
        const CurveSpec& c = t.curves.at(s.curve);
        curves.push_back({{"curve", s.curve},
                          {"init_flavor", flavor_name(c.initial)},
                          {"final_flavor", flavor_name(s.final_flavor)},
                          {"vm", c.vm},
                          {"delta", c.delta},
                          {"r2", std::isnan(s.r2) ? json(nullptr) : json(s.r2)},
                          {"mean_relative_error", s.mean_relative},
                          {"max_relative_error", s.max_relative},
                          {"band_fraction", s.band_fraction},
                          {"below_band_fraction", s.below_band_fraction},
                          {"scored_points", s.scored_points}});
    }
    return {{"shots", r.shots},
            {"repeats", r.repeats},
            {"min_r2", r.min_r2()},
            {"band_fraction", r.band_fraction()},
            {"max_abs_error", r.max_abs_error},
            {"relative_error_floor", kRelativeErrorFloor},
            {"curves", curves}};
}

json calibration_report_to_json(const CalibrationReport& r) {
    json cents = json::array();
    for (const auto& c : r.discriminator.classifier.centroids) cents.push_back(complex_to_json(c));
    return {{"spectroscopy",
             {{"f12_ghz", r.spectroscopy.f12_ghz}, {"curve", curve_to_json(r.spectroscopy.curve)},
              {"fit", fit_to_json(r.spectroscopy.fit)}}},
            {"rabi01", {{"a_pi", r.rabi01.a_pi}, {"curve", curve_to_json(r.rabi01.curve)}, {"fit", fit_to_json(r.rabi01.fit)}}},
            {"rabi12", {{"a_pi", r.rabi12.a_pi}, {"curve", curve_to_json(r.rabi12.curve)}, {"fit", fit_to_json(r.rabi12.fit)}}},
            {"error_amplification",
             {{"under_rotation", r.amplification.under_rotation},
              {"decay_rate_khz", r.amplification.decay_rate_khz},
              {"magnitude_curve", curve_to_json(r.amplification.magnitude_curve)},
              {"sign_curve", curve_to_json(r.amplification.sign_curve)},
              {"magnitude_fit", fit_to_json(r.amplification.magnitude_fit)},
              {"sign_fit", fit_to_json(r.amplification.sign_fit)}}},
            {"readout",
             {{"best_duration_us", r.readout.best_duration_us},
              {"best_amplitude", r.readout.best_amplitude},
              {"best_score", r.readout.best_score}}},
            {"discriminator",
             {{"centroids", cents},
              {"accuracy", {r.discriminator.accuracy(0), r.discriminator.accuracy(1), r.discriminator.accuracy(2)}},
              {"confusion", confusion_to_json(r.discriminator.confusion)}}},
            {"calibrated", calibration_to_json(r.calibrated)},
            {"truth", device_to_json(r.truth)}};
}

std::string heatmap_csv(const SilhouetteResult& r) {
    std::ostringstream out;
    out << "duration_us,amplitude,silhouette\n";
    for (const auto& c : r.cells) out << fmt(c.duration_us) << ',' << fmt(c.amplitude) << ',' << fmt(c.score) << '\n';
    return out.str();
}

std::vector<PhaseTableRow> parse_phase_table(const std::string& text) {
    std::vector<PhaseTableRow> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto f = split(line, ';');
        if (f.size() < 3) throw std::invalid_argument("phase table row needs event, figure and phases: " + line);
        PhaseTableRow row{trim(f[0]), trim(f[1]), {}};
        for (std::size_t k = 2; k < f.size(); ++k) {
            std::string cell = trim(f[k]);
            while (!cell.empty() && cell.back() == ',') cell.pop_back();
            if (cell.empty() || cell == "N/A") continue;
            std::size_t used = 0;
            const double v = std::stod(cell, &used);
            if (used != cell.size()) throw std::invalid_argument("bad phase entry: " + cell);
            row.phis.push_back(wrap_phase(v));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

const std::vector<PhaseTableRow>& reported_phase_table() {
    static const std::vector<PhaseTableRow> table = parse_phase_table(
        "nu_e;3ab;-1.5312;-0.4341;5.9253,;6.5312;-0.4005;N/A;N/A\n"
        "nu_mu;3cd 4abc;1.7018;-6.2831;-0.0497;3.2981;-6.4306;N/A;N/A\n"
        "nu_tau;3ef;1.7409;-0.6074;-0.6796;3.2591;-0.7130;N/A;N/A\n"
        "nu_mu;5;-1.9599;0.0299;0.0299;0.0299;0.0299;-5.8599;0.0611\n");
    return table;
}

}  // namespace nuqutrit::io
