#pragma once

#include "nuqutrit/calibration.hpp"
#include "nuqutrit/runner.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace nuqutrit::io {

using nlohmann::json;

/// Raised for unreadable or unwritable files; the message carries the path.
class IoError : public std::runtime_error {
public:
    IoError(const std::string& what, std::filesystem::path path)
        : std::runtime_error(what + ": " + path.string()), path_(std::move(path)) {}
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline constexpr const char* kVersion = "1.0.0";
/// Default output directory when --out is not given.
inline constexpr const char* kOutputEnv = "NUQUTRIT_OUT";

json read_json(const std::filesystem::path& p);
void write_text(const std::filesystem::path& p, const std::string& text);  // creates parent directories

/// Keys theta12_deg, theta23_deg, theta13_deg, delta_deg, dm2_21_ev2, dm2_31_ev2; missing keys keep `base`.
OscillationParams params_from_json(const json& j, const OscillationParams& base = OscillationParams::nufit51());
json params_to_json(const OscillationParams& p);

MockTransmon device_from_json(const json& j, const MockTransmon& base = MockTransmon::jakarta_q0());
json device_to_json(const MockTransmon& d);

PulseCalibration calibration_from_json(const json& j, const PulseCalibration& base);
json calibration_to_json(const PulseCalibration& c);

json confusion_to_json(const ConfusionMatrix& c);
ConfusionMatrix confusion_from_json(const json& j);

/// Gate list with an "order" field: "application" lists the first gate to act first, "matrix"
/// lists gates as written in a product (leftmost acts last) and is reversed on load.
json sequence_to_json(const GateSequence& seq);
GateSequence sequence_from_json(const json& j);

/// Values absent from j keep the scenario defaults.
ScenarioConfig config_from_json(const json& j);
json config_to_json(const ScenarioConfig& c);

/// Stable column order: scenario, curve, init_flavor, vm, delta, <axis>, repeat, n0, n1, n2,
/// shots, seed, p0, p1, p2, ok. Doubles are written with 17 significant digits.
std::string results_csv(const ResultTable& t);
void write_csv(const ResultTable& t, const std::filesystem::path& p);
std::vector<ResultRow> read_csv(const std::filesystem::path& p);

/// FNV-1a over every count and seed, in row order.
std::uint64_t counts_digest(const ResultTable& t);

json manifest(const ResultTable& t, const ScoreReport* report = nullptr);
void write_manifest(const ResultTable& t, const std::filesystem::path& p, const ScoreReport* report = nullptr);
/// The configuration recorded in a manifest; running it reproduces the recorded digest.
ScenarioConfig config_from_manifest(const json& m);

/// One whitespace-separated file per curve (x, measured p0..p2, analytic p0..p2) plus a plot script.
std::vector<std::filesystem::path> write_gnuplot(const ResultTable& t, const ResultTable& reference,
                                                 const std::filesystem::path& dir);

json score_to_json(const ScoreReport& r, const ResultTable& t);
json calibration_report_to_json(const CalibrationReport& r);
std::string heatmap_csv(const SilhouetteResult& r);

struct PhaseTableRow {
    std::string event;
    std::string figure;
    std::vector<double> phis;  // wrapped to (-pi, pi]
};

/// Parses rows of "event;figure;phi1;...;phi7" with N/A for absent entries and tolerates a
/// trailing comma on a number.
std::vector<PhaseTableRow> parse_phase_table(const std::string& text);
/// Published hardware phase advances, kept as annotations.
const std::vector<PhaseTableRow>& reported_phase_table();

}  // namespace nuqutrit::io
