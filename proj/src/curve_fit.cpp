#include "nuqutrit/curve_fit.hpp"

#include "nuqutrit/linalg.hpp"
#include "nuqutrit/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace nuqutrit {

namespace {

using opt::Mat;
using opt::Vec;

struct Data {
    Vec x, y;
    double span = 0.0;
    double min_step = 0.0;
};

Data prepare(CurveModel model, const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("xs and ys differ in length");
    const int p = parameter_count(model);
    if (static_cast<int>(xs.size()) < p + 1) throw std::invalid_argument("curve_fit needs at least p + 1 points");
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw std::invalid_argument("non-finite data");
    std::set<double> distinct(xs.begin(), xs.end());
    if (static_cast<int>(distinct.size()) < p) throw std::invalid_argument("rank-deficient design: too few distinct x");

    Data d;
    d.x = Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    d.y = Eigen::Map<const Vec>(ys.data(), static_cast<Eigen::Index>(ys.size()));
    d.span = *distinct.rbegin() - *distinct.begin();
    d.min_step = std::numeric_limits<double>::infinity();
    for (auto it = std::next(distinct.begin()); it != distinct.end(); ++it)
        d.min_step = std::min(d.min_step, *it - *std::prev(it));
    return d;
}

Vec linear_solve(const Mat& a, const Vec& y) { return a.completeOrthogonalDecomposition().solve(y); }

/// Linear coefficients (cos, sin, 1) for a fixed angular frequency; returns RSS.
double project_cosine(const Data& d, double w, double k, bool damped, Vec& coef) {
    const int n = static_cast<int>(d.x.size());
    Mat a(n, damped ? 4 : 3);
    for (int i = 0; i < n; ++i) {
        const double env = damped ? std::exp(-k * d.x(i)) : 1.0;
        a(i, 0) = env * std::cos(w * d.x(i));
        a(i, 1) = env * std::sin(w * d.x(i));
        if (damped) {
            a(i, 2) = env;
            a(i, 3) = 1.0;
        } else {
            a(i, 2) = 1.0;
        }
    }
    coef = linear_solve(a, d.y);
    return (a * coef - d.y).squaredNorm();
}

std::vector<double> frequency_candidates(const Data& d, int keep) {
    const double w_hi = std::isfinite(d.min_step) && d.min_step > 0.0 ? kPi / d.min_step : 1.0;
    const double w_lo = d.span > 0.0 ? 0.25 * kPi / d.span : 1e-3;
    constexpr int kScan = 600;
    std::vector<double> ws(kScan), rss(kScan);
    Vec coef;
    for (int i = 0; i < kScan; ++i) {
        ws[i] = w_lo + (w_hi - w_lo) * i / (kScan - 1);
        rss[i] = project_cosine(d, ws[i], 0.0, false, coef);
    }
    std::vector<std::pair<double, double>> minima;
    for (int i = 0; i < kScan; ++i) {
        const bool left = i == 0 || rss[i] <= rss[i - 1];
        const bool right = i == kScan - 1 || rss[i] <= rss[i + 1];
        if (left && right) minima.emplace_back(rss[i], ws[i]);
    }
    std::sort(minima.begin(), minima.end());
    std::vector<double> out;
    for (int i = 0; i < std::min<int>(keep, static_cast<int>(minima.size())); ++i) out.push_back(minima[i].second);
    if (out.empty()) out.push_back(w_lo);
    return out;
}

Vec cosine_from_linear(double w, const Vec& coef, bool damped, double k) {
    // a cos(wx + p) = a cos p cos wx - a sin p sin wx
    const double amp = std::hypot(coef(0), coef(1));
    const double phase = std::atan2(-coef(1), coef(0));
    if (!damped) return (Vec(4) << amp, w, phase, coef(2)).finished();
    return (Vec(6) << amp, w, phase, coef(2), k, coef(3)).finished();
}

std::vector<Vec> initial_guesses(CurveModel model, const Data& d) {
    std::vector<Vec> out;
    const int n = static_cast<int>(d.x.size());
    switch (model) {
        case CurveModel::line: {
            Mat a(n, 2);
            a.col(0) = d.x;
            a.col(1).setOnes();
            out.push_back(linear_solve(a, d.y));
            break;
        }
        case CurveModel::lorentzian: {
            std::vector<double> sorted(d.y.data(), d.y.data() + n);
            std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
            const double base = sorted[n / 2];
            int peak = 0;
            for (int i = 1; i < n; ++i)
                if (std::abs(d.y(i) - base) > std::abs(d.y(peak) - base)) peak = i;
            const double height = d.y(peak) - base;
            int above = 0;
            for (int i = 0; i < n; ++i)
                if (std::abs(d.y(i) - base) > 0.5 * std::abs(height)) ++above;
            const double step = d.span / std::max(1, n - 1);
            const double g0 = std::max(0.5 * above * step, d.min_step);
            for (double f : {1.0, 0.3, 3.0}) out.push_back((Vec(4) << height, d.x(peak), g0 * f, base).finished());
            break;
        }
        case CurveModel::cosine: {
            Vec coef;
            for (double w : frequency_candidates(d, 3)) {
                project_cosine(d, w, 0.0, false, coef);
                out.push_back(cosine_from_linear(w, coef, false, 0.0));
            }
            break;
        }
        case CurveModel::damped_cosine: {
            Vec coef;
            const double scale = d.span > 0.0 ? 1.0 / d.span : 1.0;
            for (double w : frequency_candidates(d, 3)) {
                for (double k : {0.0, scale, 3.0 * scale}) {
                    project_cosine(d, w, k, true, coef);
                    out.push_back(cosine_from_linear(w, coef, true, k));
                }
            }
            break;
        }
    }
    return out;
}

CurveFitResult finish(CurveModel model, const Data& d, const opt::LeastSquaresResult& best, int starts) {
    CurveFitResult r;
    r.model = model;
    r.params = best.x;
    if (model == CurveModel::lorentzian) r.params(2) = std::abs(r.params(2));
    r.residual_norm = std::sqrt(best.cost);
    r.starts = starts;
    const int n = static_cast<int>(d.x.size());
    const int p = static_cast<int>(best.x.size());
    const double s2 = best.cost / std::max(1, n - p);
    const Mat jtj = best.jacobian.transpose() * best.jacobian;
    r.covariance = s2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
    r.std_errors = r.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    return r;
}

opt::LeastSquaresResult run(CurveModel model, const Data& d, const Vec& guess) {
    auto residuals = [&](const Vec& p) {
        Vec r(d.x.size());
        for (int i = 0; i < d.x.size(); ++i) r(i) = evaluate(model, p, d.x(i)) - d.y(i);
        return r;
    };
    opt::LevenbergMarquardtOptions o;
    o.max_iterations = 400;
    return opt::levenberg_marquardt(residuals, guess, o);
}

}  // namespace

std::string_view curve_model_name(CurveModel m) {
    switch (m) {
        case CurveModel::lorentzian: return "lorentzian";
        case CurveModel::cosine: return "cosine";
        case CurveModel::damped_cosine: return "damped_cosine";
        case CurveModel::line: return "line";
    }
    return "?";
}

int parameter_count(CurveModel m) {
    switch (m) {
        case CurveModel::lorentzian: return 4;
        case CurveModel::cosine: return 4;
        case CurveModel::damped_cosine: return 6;
        case CurveModel::line: return 2;
    }
    return 0;
}

double evaluate(CurveModel m, const Eigen::VectorXd& p, double x) {
    switch (m) {
        case CurveModel::lorentzian: {
            const double g2 = p(2) * p(2);
            return p(3) + p(0) * g2 / ((x - p(1)) * (x - p(1)) + g2);
        }
        case CurveModel::cosine: return p(3) + p(0) * std::cos(p(1) * x + p(2));
        case CurveModel::damped_cosine: return p(5) + std::exp(-p(4) * x) * (p(3) + p(0) * std::cos(p(1) * x + p(2)));
        case CurveModel::line: return p(1) + p(0) * x;
    }
    return 0.0;
}

CurveFitResult curve_fit(CurveModel model, const std::vector<double>& xs, const std::vector<double>& ys,
                         const Eigen::VectorXd& guess) {
    const Data d = prepare(model, xs, ys);
    if (guess.size() != parameter_count(model)) throw std::invalid_argument("guess has the wrong parameter count");
    const auto best = run(model, d, guess);
    if (!std::isfinite(best.cost)) throw NumericError("curve fit diverged", best.cost);
    return finish(model, d, best, 1);
}

CurveFitResult curve_fit(CurveModel model, const std::vector<double>& xs, const std::vector<double>& ys) {
    const Data d = prepare(model, xs, ys);
    opt::LeastSquaresResult best;
    best.cost = std::numeric_limits<double>::infinity();
    const auto guesses = initial_guesses(model, d);
    for (const auto& g : guesses) {
        const auto r = run(model, d, g);
        if (r.cost < best.cost) best = r;
    }
    if (!std::isfinite(best.cost)) throw NumericError("curve fit diverged", best.cost);
    return finish(model, d, best, static_cast<int>(guesses.size()));
}

}  // namespace nuqutrit
