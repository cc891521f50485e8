#include "nuqutrit/phase_advance.hpp"

#include "nuqutrit/optimize.hpp"
#include "nuqutrit/rng.hpp"
#include "nuqutrit/vm.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nuqutrit {

namespace {

constexpr double kProbabilityFloor = 1e-300;

struct Gauge {
    std::vector<int> free;  // indices into the phase vector that are optimized
    std::vector<int> pinned;
};

Gauge gauge_for(const std::vector<GivensGate>& gates) {
    Gauge g;
    bool seen[2] = {false, false};
    if (!gates.empty()) seen[static_cast<int>(gates.front().subspace)] = true;
    for (std::size_t i = 1; i < gates.size(); ++i) {
        const int s = static_cast<int>(gates[i].subspace);
        if (!seen[s]) {
            seen[s] = true;
            g.pinned.push_back(static_cast<int>(i - 1));
        } else {
            g.free.push_back(static_cast<int>(i - 1));
        }
    }
    return g;
}

std::vector<double> expand(const Gauge& g, std::size_t k, const opt::Vec& x) {
    std::vector<double> phis(k, 0.0);
    for (std::size_t j = 0; j < g.free.size(); ++j) phis[g.free[j]] = x(static_cast<int>(j));
    return phis;
}

}  // namespace

PhaseAdvanceModel PhaseAdvanceModel::from_device(double f01_ghz, double f12_ghz, double td_dt, double dt_ns) {
    if (!(td_dt > 0.0) || !(dt_ns > 0.0)) throw std::invalid_argument("pulse duration must be positive");
    PhaseAdvanceModel m;
    // GHz x ns is dimensionless cycles.
    m.omega_off = wrap_phase(kTwoPi * (f12_ghz - f01_ghz) * td_dt * dt_ns);
    return m;
}

std::vector<double> PhaseAdvanceModel::advances(const std::vector<GivensGate>& gates) const {
    std::vector<double> out(gates.size(), 0.0);
    double reg01 = 0.0, reg12 = 0.0;
    for (std::size_t i = 0; i < gates.size(); ++i) {
        out[i] = wrap_phase(gates[i].subspace == Subspace::s01 ? reg01 : reg12);
        reg12 += omega_off;
        if (gates[i].subspace == Subspace::s12) reg01 += stark01;
    }
    return out;
}

std::vector<double> predicted_phases(const std::vector<GivensGate>& gates, const PhaseAdvanceModel& model) {
    const auto a = model.advances(gates);
    return a.empty() ? a : std::vector<double>(a.begin() + 1, a.end());
}

GateSequence shift_axes(const GateSequence& seq, const std::vector<double>& phis) {
    if (seq.gates.empty() && phis.empty()) return seq;
    if (phis.size() + 1 != seq.gates.size()) throw std::invalid_argument("need one phase per gate after the first");
    GateSequence out = seq;
    for (std::size_t i = 1; i < out.gates.size(); ++i) {
        auto& g = out.gates[i];
        g = GivensGate::make(g.subspace, g.phi + phis[i - 1], g.theta);
    }
    return out;
}

GateSequence apply_phase_advances(const GateSequence& seq, const PhaseAdvanceModel& model) {
    if (seq.empty()) return seq;
    return shift_axes(seq, predicted_phases(seq.gates, model));
}

GateSequence compensate(const GateSequence& seq, const std::vector<double>& phis) {
    std::vector<double> neg(phis.size());
    std::transform(phis.begin(), phis.end(), neg.begin(), [](double p) { return -p; });
    return shift_axes(seq, neg);
}

GateSequence compensate(const GateSequence& seq, const PhaseAdvanceModel& model) {
    if (seq.empty()) return seq;
    return compensate(seq, predicted_phases(seq.gates, model));
}

std::vector<double> canonical_gauge(const std::vector<GivensGate>& gates, const std::vector<double>& phis) {
    if (phis.size() + 1 != gates.size()) throw std::invalid_argument("need one phase per gate after the first");
    std::vector<double> out(phis);
    double ref[2] = {0.0, 0.0};
    bool seen[2] = {false, false};
    seen[static_cast<int>(gates.front().subspace)] = true;
    for (std::size_t i = 1; i < gates.size(); ++i) {
        const int s = static_cast<int>(gates[i].subspace);
        if (!seen[s]) {
            seen[s] = true;
            ref[s] = phis[i - 1];
        }
        out[i - 1] = wrap_phase(phis[i - 1] - ref[s]);
    }
    return out;
}

double phase_log_likelihood(const std::vector<PhaseObservation>& data, const std::vector<double>& phis) {
    double ll = 0.0;
    for (const auto& obs : data) {
        const Vector3r p = probabilities(apply_sequence(obs.initial, shift_axes(obs.ideal, phis)));
        for (int k = 0; k < 3; ++k)
            if (obs.counts(k) > 0.0) ll += obs.counts(k) * std::log(std::max(p(k), kProbabilityFloor));
    }
    return ll;
}

PhaseFitResult fit_phase_advances(const std::vector<PhaseObservation>& data, const PhaseFitOptions& opts) {
    if (data.empty()) throw std::invalid_argument("no observations");
    const auto& pattern = data.front().ideal.gates;
    if (pattern.size() < 2) throw std::invalid_argument("template needs at least two gates");
    for (const auto& obs : data) {
        if (obs.ideal.gates.size() != pattern.size()) throw std::invalid_argument("observations differ in gate count");
        for (std::size_t i = 0; i < pattern.size(); ++i)
            if (obs.ideal.gates[i].subspace != pattern[i].subspace)
                throw std::invalid_argument("observations differ in subspace pattern");
    }
    const std::size_t k = pattern.size() - 1;
    const Gauge gauge = gauge_for(pattern);
    const int dim = static_cast<int>(gauge.free.size());
    if (data.size() < static_cast<std::size_t>(dim)) throw std::invalid_argument("fewer observations than free phases");

    // Normalized against the saturated model so values stay O(1) regardless of the shot count.
    double total = 0.0, saturated = 0.0;
    for (const auto& obs : data) {
        const double n = obs.counts.sum();
        total += n;
        for (int j = 0; j < 3; ++j)
            if (obs.counts(j) > 0.0) saturated += obs.counts(j) * std::log(obs.counts(j) / n);
    }
    if (!(total > 0.0)) throw std::invalid_argument("observations carry no counts");

    int evaluations = 0;
    auto objective = [&](const opt::Vec& x) {
        ++evaluations;
        return (saturated - phase_log_likelihood(data, expand(gauge, k, x))) / total;
    };

    std::vector<opt::Vec> starts{opt::Vec::Zero(dim)};
    Rng rng(opts.seed);
    std::uniform_real_distribution<double> uni(-kPi, kPi);
    for (int s = 0; s < opts.random_starts; ++s) {
        opt::Vec x(dim);
        for (int j = 0; j < dim; ++j) x(j) = uni(rng);
        starts.push_back(x);
    }
    std::vector<std::pair<double, int>> ranked;
    for (std::size_t s = 0; s < starts.size(); ++s) ranked.emplace_back(objective(starts[s]), static_cast<int>(s));
    std::sort(ranked.begin(), ranked.end());

    opt::MinimizeResult best;
    best.value = std::numeric_limits<double>::infinity();
    const int refine = std::min<int>(opts.refined_starts, static_cast<int>(ranked.size()));
    for (int r = 0; r < refine; ++r) {
        opt::NelderMeadOptions nm;
        nm.initial_step = 0.4;
        nm.x_tol = 1e-9;
        nm.f_tol = 1e-16;
        const auto res = opt::nelder_mead(objective, starts[ranked[r].second], nm);
        if (res.value < best.value) best = res;
    }
    const auto polished = opt::newton_polish(objective, best.x, 40);
    if (polished.value <= best.value) best.x = polished.x, best.value = polished.value;
    if (!std::isfinite(best.value)) throw NumericError("phase-advance likelihood fit stagnated", best.value);

    PhaseFitResult out;
    std::vector<double> phis = expand(gauge, k, best.x);
    for (auto& p : phis) p = wrap_phase(p);
    out.phis = phis;
    out.log_likelihood = phase_log_likelihood(data, phis);
    out.ideal_log_likelihood = phase_log_likelihood(data, std::vector<double>(k, 0.0));
    out.uncertainty.assign(k, 0.0);

    // Curvature of the unnormalized negative log-likelihood.
    const opt::Mat hess = opt::numeric_hessian(objective, best.x, 1e-4) * total;
    Eigen::SelfAdjointEigenSolver<opt::Mat> es(hess);
    const bool positive = dim == 0 || es.eigenvalues().minCoeff() > 0.0;
    opt::Mat cov = positive && dim > 0 ? opt::Mat(hess.inverse()) : opt::Mat::Zero(dim, dim);
    for (int j = 0; j < dim; ++j)
        out.uncertainty[gauge.free[j]] = positive ? std::sqrt(cov(j, j)) : std::numeric_limits<double>::infinity();
    out.evaluations = evaluations;
    return out;
}

}  // namespace nuqutrit
