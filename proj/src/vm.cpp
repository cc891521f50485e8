#include "nuqutrit/vm.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nuqutrit {

QutritState QutritState::basis(int level) {
    if (level < 0 || level > 2) throw std::invalid_argument("qutrit level must be 0, 1 or 2");
    QutritState s;
    s.amplitudes = Vector3c::Zero();
    s.amplitudes(level) = 1.0;
    return s;
}

QutritState apply_gate(const QutritState& s, const GivensGate& g) {
    const int m = g.subspace == Subspace::s01 ? 0 : 1;
    const int n = m + 1;
    const double c = std::cos(g.theta / 2.0);
    const double sn = std::sin(g.theta / 2.0);
    const cplx off_mn = -kI * sn * std::exp(-kI * g.phi);
    const cplx off_nm = -kI * sn * std::exp(kI * g.phi);
    QutritState out = s;
    out.amplitudes(m) = c * s.amplitudes(m) + off_mn * s.amplitudes(n);
    out.amplitudes(n) = off_nm * s.amplitudes(m) + c * s.amplitudes(n);
    return out;
}

QutritState apply_sequence(const QutritState& s, const std::vector<GivensGate>& gates) {
    QutritState out = s;
    for (const auto& g : gates) out = apply_gate(out, g);
    return out;
}

QutritState apply_sequence(Flavor initial, const GateSequence& seq) {
    return apply_sequence(QutritState::flavor(initial), seq.gates);
}

Vector3r probabilities(const QutritState& s) { return s.amplitudes.cwiseAbs2(); }

Vector3r ShotCounts::frequencies() const {
    if (shots == 0) return Vector3r::Zero();
    return Vector3r(static_cast<double>(n[0]), static_cast<double>(n[1]), static_cast<double>(n[2])) /
           static_cast<double>(shots);
}

std::array<std::uint64_t, 3> draw_multinomial(const Vector3r& probs, std::uint64_t shots, Rng& rng) {
    Vector3r p = probs.cwiseMax(0.0);
    const double total = p.sum();
    if (!(total > 0.0) || !std::isfinite(total)) throw std::invalid_argument("probabilities must have positive mass");
    p /= total;

    std::array<std::uint64_t, 3> n{0, 0, 0};
    std::uint64_t remaining = shots;
    double mass = 1.0;
    for (int k = 0; k < 2 && remaining > 0; ++k) {
        const double q = mass > 0.0 ? std::clamp(p(k) / mass, 0.0, 1.0) : 0.0;
        std::binomial_distribution<std::uint64_t> bin(remaining, q);
        n[k] = bin(rng);
        remaining -= n[k];
        mass -= p(k);
    }
    n[2] = remaining;
    return n;
}

ShotCounts sample_counts(const Vector3r& probs, std::uint64_t shots, std::uint64_t seed) {
    ShotCounts c;
    c.shots = shots;
    c.seed = seed;
    if (shots == 0) return c;
    Rng rng(seed);
    c.n = draw_multinomial(probs, shots, rng);
    return c;
}

ConfusionMatrix ConfusionMatrix::reference() {
    ConfusionMatrix cm;
    cm.a << 0.985, 0.045, 0.010,
            0.012, 0.943, 0.045,
            0.003, 0.012, 0.945;
    return cm;
}

ConfusionMatrix ConfusionMatrix::from_accuracies(const Vector3r& diag) {
    ConfusionMatrix cm;
    for (int j = 0; j < 3; ++j) {
        if (!(diag(j) >= 0.0 && diag(j) <= 1.0)) throw std::invalid_argument("accuracy outside [0, 1]");
        for (int i = 0; i < 3; ++i) cm.a(i, j) = i == j ? diag(j) : 0.5 * (1.0 - diag(j));
    }
    return cm;
}

void ConfusionMatrix::validate() const {
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i)
            if (!(a(i, j) >= 0.0 && a(i, j) <= 1.0)) throw std::invalid_argument("confusion entry outside [0, 1]");
        if (std::abs(a.col(j).sum() - 1.0) > 1e-12) throw std::invalid_argument("confusion column does not sum to 1");
    }
}

double ConfusionMatrix::condition_number() const {
    Eigen::JacobiSVD<Matrix3r> svd(a);
    const Vector3r s = svd.singularValues();
    return s(2) > 0.0 ? s(0) / s(2) : std::numeric_limits<double>::infinity();
}

ShotCounts apply_confusion(const Vector3r& probs, const ConfusionMatrix& cm, std::uint64_t shots,
                           std::uint64_t seed) {
    cm.validate();
    return sample_counts(cm.apply(probs.cwiseMax(0.0) / probs.cwiseMax(0.0).sum()), shots, seed);
}

ShotCounts apply_confusion(const ShotCounts& counts, const ConfusionMatrix& cm, std::uint64_t seed) {
    cm.validate();
    ShotCounts out;
    out.shots = counts.shots;
    out.seed = seed;
    Rng rng(seed);
    for (int j = 0; j < 3; ++j) {
        if (counts.n[j] == 0) continue;
        const auto part = draw_multinomial(cm.a.col(j), counts.n[j], rng);
        for (int i = 0; i < 3; ++i) out.n[i] += part[i];
    }
    return out;
}

MitigationResult mitigate(const Vector3r& frequencies, const ConfusionMatrix& cm) {
    MitigationResult r;
    r.condition = cm.condition_number();
    r.ill_conditioned = !(r.condition <= kIllConditioned);
    r.raw = cm.a.fullPivLu().solve(frequencies);
    Vector3r p = r.raw.cwiseMax(0.0);
    r.clipped = (p.array() != r.raw.array()).any();
    const double total = p.sum();
    r.probabilities = total > 0.0 ? Vector3r(p / total) : Vector3r::Constant(1.0 / 3.0);
    return r;
}

double GateErrorModel::depolarizing_probability() const {
    if (decay_rate_hz < 0.0 || gate_duration_s < 0.0) throw std::invalid_argument("error rates must be non-negative");
    return 1.0 - std::exp(-kTwoPi * decay_rate_hz * gate_duration_s);
}

Matrix3c inject_gate_errors(const std::vector<GivensGate>& gates, const Matrix3c& rho0, const GateErrorModel& model) {
    if (!(std::abs(model.under_rotation) < kPi)) throw std::invalid_argument("rotation error must lie in (-pi, pi)");
    const double q = model.depolarizing_probability();
    const double scale = 1.0 - model.under_rotation / kPi;
    Matrix3c rho = rho0;
    for (const auto& g : gates) {
        const Matrix3c u = givens_matrix({g.subspace, g.phi, g.theta * scale});
        rho = u * rho * u.adjoint();
        rho = (1.0 - q) * rho + (q / 3.0) * Matrix3c::Identity();
    }
    return rho;
}

Matrix3c inject_gate_errors(const GateSequence& seq, Flavor initial, const GateErrorModel& model) {
    const int k = static_cast<int>(initial);
    Matrix3c rho = Matrix3c::Zero();
    rho(k, k) = 1.0;
    return inject_gate_errors(seq.gates, rho, model);
}

Vector3r density_probabilities(const Matrix3c& rho) { return rho.diagonal().real(); }

}  // namespace nuqutrit
