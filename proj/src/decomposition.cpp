#include "nuqutrit/decomposition.hpp"

#include "nuqutrit/optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nuqutrit {

namespace {

constexpr double kAxis01 = kPi / 2.0;
constexpr double kAxis12 = 3.0 * kPi / 2.0;

/// Rotation angles are 4pi-periodic; keep them in (-2pi, 2pi].
double wrap_angle(double theta) {
    double r = std::remainder(theta, 2.0 * kTwoPi);
    if (r <= -kTwoPi) r += 2.0 * kTwoPi;
    return r;
}

double checked_acos(double x) {
    if (std::abs(x) > 1.0 + 1e-9) throw std::domain_error("alpha relation outside [-1, 1]: " + std::to_string(x));
    return std::acos(std::clamp(x, -1.0, 1.0));
}

std::vector<GivensGate> mixing_gates(const AlphaAngles& a, double theta12, double axis01) {
    return {GivensGate::make(Subspace::s01, kAxis01, -2.0 * theta12),
            GivensGate::make(Subspace::s01, axis01, a.alpha3),
            GivensGate::make(Subspace::s12, kAxis12, a.alpha2),
            GivensGate::make(Subspace::s01, axis01, a.alpha1)};
}

std::vector<GivensGate> inverse_gates(const AlphaAngles& a, double theta12, double axis01) {
    return {GivensGate::make(Subspace::s01, axis01, -a.alpha1),
            GivensGate::make(Subspace::s12, kAxis12, -a.alpha2),
            GivensGate::make(Subspace::s01, axis01, -a.alpha3),
            GivensGate::make(Subspace::s01, kAxis01, 2.0 * theta12)};
}

Matrix3c rotation_product(const Eigen::VectorXd& x, bool free_axes) {
    const double p1 = free_axes ? x(6) : kAxis01;
    const double p2 = free_axes ? x(7) : kAxis12;
    const double p3 = free_axes ? x(8) : kAxis01;
    Matrix3c x0 = Matrix3c::Zero();
    for (int k = 0; k < 3; ++k) x0(k, k) = std::exp(kI * x(3 + k));
    return x0 * givens_matrix({Subspace::s01, p1, x(0)}) * givens_matrix({Subspace::s12, p2, x(1)}) *
           givens_matrix({Subspace::s01, p3, x(2)});
}

}  // namespace

std::string_view subspace_name(Subspace s) { return s == Subspace::s01 ? "01" : "12"; }

Subspace parse_subspace(std::string_view s) {
    if (s == "01") return Subspace::s01;
    if (s == "12") return Subspace::s12;
    throw std::invalid_argument("unknown subspace: " + std::string(s));
}

GivensGate GivensGate::make(Subspace s, double phi, double theta) {
    return {s, wrap_phase(phi), wrap_angle(theta)};
}

std::string_view scenario_name(Scenario s) {
    switch (s) {
        case Scenario::vacuum: return "vacuum";
        case Scenario::matter: return "matter";
        case Scenario::cp: return "cp";
    }
    return "?";
}

Scenario parse_scenario(std::string_view s) {
    if (s == "vacuum") return Scenario::vacuum;
    if (s == "matter") return Scenario::matter;
    if (s == "cp") return Scenario::cp;
    throw std::invalid_argument("unknown scenario: " + std::string(s));
}

Matrix3c givens_matrix(const GivensGate& g) {
    const int m = g.subspace == Subspace::s01 ? 0 : 1;
    const int n = m + 1;
    const double c = std::cos(g.theta / 2.0);
    const double s = std::sin(g.theta / 2.0);
    Matrix3c r = Matrix3c::Identity();
    r(m, m) = c;
    r(n, n) = c;
    r(m, n) = -kI * s * std::exp(-kI * g.phi);
    r(n, m) = -kI * s * std::exp(kI * g.phi);
    return r;
}

Matrix3c reconstruct(const std::vector<GivensGate>& gates) {
    Matrix3c m = Matrix3c::Identity();
    for (const auto& g : gates) m = givens_matrix(g) * m;
    return m;
}

Matrix3c reconstruct(const GateSequence& seq) { return reconstruct(seq.gates); }

double verify_decomposition(const Matrix3c& u, const std::vector<GivensGate>& gates) {
    return offdiag_max(u * reconstruct(gates).adjoint());
}

double verify_decomposition(const Matrix3c& u, const GateSequence& seq) {
    return verify_decomposition(u, seq.gates);
}

AlphaAngles solve_alphas(double theta12, double theta23, double theta13) {
    const double c13 = std::cos(theta13), s23 = std::sin(theta23), c23 = std::cos(theta23);
    const double den_sq = 1.0 - c13 * c13 * c23 * c23;

    AlphaAngles base;
    base.alpha2 = 2.0 * checked_acos(c13 * c23);
    if (den_sq < 1e-24) {
        base.degenerate = true;
    } else {
        const double den = std::sqrt(den_sq);
        base.alpha1 = 2.0 * checked_acos(-c13 * s23 / den);
        base.alpha3 = 2.0 * checked_acos(-s23 / den);
    }

    const Matrix3c u = build_pmns({theta12, theta23, theta13, 0.0, 0.0, 0.0});
    double best = std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < 8; ++mask) {
        AlphaAngles a = base;
        a.sign1 = (mask & 4) ? -1 : 1;
        a.sign2 = (mask & 2) ? -1 : 1;
        a.sign3 = (mask & 1) ? -1 : 1;
        a.alpha1 *= a.sign1;
        a.alpha2 *= a.sign2;
        a.alpha3 *= a.sign3;
        const double residual = verify_decomposition(u, mixing_gates(a, theta12, kAxis01));
        if (residual < 1e-10) return a;
        best = std::min(best, residual);
    }
    throw NumericError("no alpha branch reproduces the mixing matrix", best);
}

AlphaAngles solve_alphas(const OscillationParams& p) { return solve_alphas(p.theta12, p.theta23, p.theta13); }

AlphaAngles solve_alphas(const MatterParams& m) {
    return solve_alphas(m.theta12_hat, m.theta23_hat, m.theta13_hat);
}

Decomposition decompose(const OscillationParams& p, Scenario scenario, double vm) {
    if (vm < 0.0) throw std::domain_error("matter potential must be non-negative");
    if (scenario != Scenario::cp && p.delta != 0.0)
        throw std::invalid_argument("vacuum and matter decompositions require delta = 0; use the cp scenario");
    if (scenario == Scenario::vacuum && vm != 0.0)
        throw std::invalid_argument("vacuum decomposition takes no matter potential");

    OscillationParams eff = p;
    if (vm > 0.0) eff = matter_effective_params(p, vm).effective(p);

    const AlphaAngles a = solve_alphas(eff);
    const double axis01 = kAxis01 + (scenario == Scenario::cp ? eff.delta : 0.0);

    Decomposition d;
    for (GateSequence* s : {&d.r, &d.r_dag}) {
        s->scenario = scenario;
        s->alphas = a;
        s->source = p;
        s->vm = vm;
    }
    d.r.gates = mixing_gates(a, eff.theta12, axis01);
    d.r_dag.gates = inverse_gates(a, eff.theta12, axis01);
    return d;
}

GateSequence merge_same_axis(const GateSequence& seq, double axis_tol) {
    GateSequence out = seq;
    out.gates.clear();
    for (const auto& g : seq.gates) {
        if (!out.gates.empty()) {
            GivensGate& last = out.gates.back();
            if (last.subspace == g.subspace && std::abs(wrap_phase(last.phi - g.phi)) <= axis_tol) {
                last = GivensGate::make(last.subspace, last.phi, last.theta + g.theta);
                continue;
            }
        }
        out.gates.push_back(g);
    }
    return out;
}

GateSequence insert_evolution(const GateSequence& r, const GateSequence& r_dag, double phi01, double phi12,
                              Scenario scenario) {
    if (!std::isfinite(phi01) || !std::isfinite(phi12)) throw std::domain_error("evolution phases must be finite");
    GateSequence evolved = r;
    for (auto& g : evolved.gates)
        g = GivensGate::make(g.subspace, g.phi - (g.subspace == Subspace::s01 ? phi01 : phi12), g.theta);

    GateSequence before = r_dag;
    if (scenario != Scenario::cp) {
        evolved = merge_same_axis(evolved);
        before = merge_same_axis(before);
    }
    GateSequence out = r;
    out.scenario = scenario;
    out.gates = before.gates;
    out.gates.insert(out.gates.end(), evolved.gates.begin(), evolved.gates.end());
    return out;
}

GateSequence compile_circuit(const OscillationParams& p, Scenario scenario, double vm, const Baseline& b) {
    const Decomposition d = decompose(p, scenario, vm);
    const EvolutionPhases ph =
        vm > 0.0 ? evolution_phases(matter_effective_params(p, vm), b) : evolution_phases(p, b);
    return insert_evolution(d.r, d.r_dag, ph.phi01, ph.phi12, scenario);
}

FitDecompositionResult fit_decomposition(const Matrix3c& u, bool free_axes) {
    if (!is_unitary(u, 1e-10)) throw std::invalid_argument("fit_decomposition expects a unitary matrix");
    const int n = free_axes ? 9 : 6;
    auto residuals = [&](const opt::Vec& x) {
        const Matrix3c diff = rotation_product(x, free_axes) - u;
        opt::Vec r(18);
        for (int i = 0; i < 9; ++i) {
            r(i) = diff(i / 3, i % 3).real();
            r(9 + i) = diff(i / 3, i % 3).imag();
        }
        return r;
    };

    constexpr std::array<double, 4> kStarts{-2.5, -0.8, 0.8, 2.5};
    opt::LevenbergMarquardtOptions lm;
    lm.cost_tol = 1e-28;
    opt::LeastSquaresResult best;
    best.cost = std::numeric_limits<double>::infinity();
    int restarts = 0;
    for (double s1 : kStarts) {
        for (double s2 : kStarts) {
            for (double s3 : kStarts) {
                opt::Vec x0 = opt::Vec::Zero(n);
                x0 << (opt::Vec(3) << s1, s2, s3).finished(), opt::Vec::Zero(n - 3);
                for (int k = 0; k < 3; ++k) x0(3 + k) = std::arg(u(k, k) + cplx(1e-300, 0.0));
                if (free_axes) {
                    x0(6) = kAxis01;
                    x0(7) = kAxis12;
                    x0(8) = kAxis01;
                }
                ++restarts;
                const auto res = opt::levenberg_marquardt(residuals, x0, lm);
                if (res.cost < best.cost) best = res;
                if (best.cost < 1e-26) break;
            }
            if (best.cost < 1e-26) break;
        }
        if (best.cost < 1e-26) break;
    }
    const double objective = std::sqrt(best.cost);
    if (!(objective < 1e-8)) throw NumericError("Givens factorization did not converge", objective);

    FitDecompositionResult out;
    out.alphas.alpha1 = wrap_angle(best.x(0));
    out.alphas.alpha2 = wrap_angle(best.x(1));
    out.alphas.alpha3 = wrap_angle(best.x(2));
    for (int k = 0; k < 3; ++k) out.diagonal_phases(k) = wrap_phase(best.x(3 + k));
    out.axes = free_axes ? Vector3r(wrap_phase(best.x(6)), wrap_phase(best.x(7)), wrap_phase(best.x(8)))
                         : Vector3r(kAxis01, wrap_phase(kAxis12), kAxis01);
    out.objective = objective;
    out.restarts = restarts;
    return out;
}

ScheduleDuration schedule_duration(const GateSequence& seq, double td_dt) {
    if (!(td_dt > 0.0)) throw std::domain_error("pulse duration must be positive");
    ScheduleDuration d;
    d.gates = seq.size();
    for (std::size_t i = 0; i < seq.gates.size(); ++i)
        if (i == 0 || seq.gates[i].subspace != seq.gates[i - 1].subspace) ++d.pulses_merged;
    d.unmerged_dt = static_cast<double>(d.gates) * td_dt;
    d.merged_dt = static_cast<double>(d.pulses_merged) * td_dt;
    d.matches_reported = d.unmerged_dt == d.reported_qutrit_dt || d.merged_dt == d.reported_qutrit_dt;
    return d;
}

}  // namespace nuqutrit
