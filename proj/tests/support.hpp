#pragma once

#include "nuqutrit/phase_advance.hpp"
#include "nuqutrit/runner.hpp"
#include "nuqutrit/vm.hpp"

#include <random>
#include <vector>

namespace nuqutrit::fixtures {

/// Phase-characterization data: the requested circuits over one Phi01 period at E = 1 GeV for
/// every initial flavor (pooled over four CP phases for the 8-gate pattern), executed with the
/// axes shifted by `phis`. shots = 0 stores exact probabilities scaled to 32768.
inline std::vector<PhaseObservation> phase_design(Scenario scenario, const std::vector<double>& phis,
                                                  std::uint64_t shots, std::uint64_t seed, int points = 40) {
    ScenarioConfig cfg = ScenarioConfig::vacuum_preset();
    cfg.scenario = scenario;
    std::vector<double> deltas{0.0};
    if (scenario == Scenario::cp) deltas = {-kPi / 2.0, 0.0, kPi / 2.0, kPi};
    const double span = full_phi01_period(cfg.params);
    std::vector<PhaseObservation> data;
    std::uint64_t k = 0;
    for (double d : deltas)
        for (int i = 0; i < points; ++i)
            for (Flavor f : {Flavor::e, Flavor::mu, Flavor::tau}) {
                const GateSequence seq = curve_circuit(cfg, {f, 0.0, d}, Baseline::from_L_over_E(span * i / (points - 1)));
                const Vector3r p = probabilities(apply_sequence(f, shift_axes(seq, phis)));
                const Vector3r counts = shots == 0 ? Vector3r(p * 32768.0)
                                                   : Vector3r(sample_counts(p, shots, derive_seed(seed, k++))
                                                                  .frequencies() * static_cast<double>(shots));
                data.push_back({seq, f, counts});
            }
    return data;
}

inline double max_phase_error(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(wrap_phase(a[i] - b[i])));
    return m;
}

/// Random mixing parameters: angles uniform in (0, pi/2), delta uniform in (-pi, pi].
inline OscillationParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ang(0.01, kPi / 2.0 - 0.01), ph(-kPi, kPi);
    OscillationParams p = OscillationParams::nufit51();
    p.theta12 = ang(rng);
    p.theta23 = ang(rng);
    p.theta13 = ang(rng);
    p.delta = ph(rng);
    return p;
}

}  // namespace nuqutrit::fixtures
