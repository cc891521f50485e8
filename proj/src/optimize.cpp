#include "nuqutrit/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace nuqutrit::opt {

MinimizeResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0,
                           const NelderMeadOptions& opts) {
    const int n = static_cast<int>(x0.size());
    std::vector<Vec> simplex(n + 1, x0);
    std::vector<double> values(n + 1);
    int evals = 0;
    auto eval = [&](const Vec& x) {
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };
    for (int i = 0; i < n; ++i) simplex[i + 1](i) += opts.initial_step;
    for (int i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

    std::vector<int> order(n + 1);
    bool converged = false;
    while (evals < opts.max_evaluations) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
        const int best = order.front(), worst = order.back(), second = order[n - 1];

        double spread = 0.0;
        for (int i = 0; i <= n; ++i) spread = std::max(spread, (simplex[i] - simplex[best]).cwiseAbs().maxCoeff());
        if (spread < opts.x_tol && std::abs(values[worst] - values[best]) < opts.f_tol) {
            converged = true;
            break;
        }

        Vec centroid = Vec::Zero(n);
        for (int i = 0; i <= n; ++i)
            if (i != worst) centroid += simplex[i];
        centroid /= n;

        const Vec reflected = centroid + (centroid - simplex[worst]);
        const double fr = eval(reflected);
        if (fr < values[best]) {
            const Vec expanded = centroid + 2.0 * (centroid - simplex[worst]);
            const double fe = eval(expanded);
            if (fe < fr) {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[second]) {
            simplex[worst] = reflected;
            values[worst] = fr;
            continue;
        }
        const bool outside = fr < values[worst];
        const Vec contracted = outside ? Vec(centroid + 0.5 * (reflected - centroid))
                                       : Vec(centroid + 0.5 * (simplex[worst] - centroid));
        const double fc = eval(contracted);
        if (fc < std::min(fr, values[worst])) {
            simplex[worst] = contracted;
            values[worst] = fc;
            continue;
        }
        for (int i = 0; i <= n; ++i) {
            if (i == best) continue;
            simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
            values[i] = eval(simplex[i]);
        }
    }
    const auto it = std::min_element(values.begin(), values.end());
    const int idx = static_cast<int>(it - values.begin());
    return {simplex[idx], *it, evals, converged};
}

Mat numeric_jacobian(const std::function<Vec(const Vec&)>& r, const Vec& x) {
    const Vec r0 = r(x);
    Mat j(r0.size(), x.size());
    for (int k = 0; k < x.size(); ++k) {
        const double h = 1e-6 * std::max(1.0, std::abs(x(k)));
        Vec xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        j.col(k) = (r(xp) - r(xm)) / (2.0 * h);
    }
    return j;
}

LeastSquaresResult levenberg_marquardt(const std::function<Vec(const Vec&)>& residuals, const Vec& x0,
                                       const LevenbergMarquardtOptions& opts) {
    LeastSquaresResult out;
    Vec x = x0;
    Vec r = residuals(x);
    double cost = r.squaredNorm();
    double lambda = opts.initial_lambda;
    Mat j = numeric_jacobian(residuals, x);
    int it = 0;
    bool converged = false;
    for (; it < opts.max_iterations; ++it) {
        if (cost <= opts.cost_tol) {
            converged = true;
            break;
        }
        const Mat jtj = j.transpose() * j;
        const Vec g = j.transpose() * r;
        if (g.cwiseAbs().maxCoeff() < opts.gradient_tol) {
            converged = true;
            break;
        }
        bool improved = false;
        for (int tries = 0; tries < 40; ++tries) {
            Mat a = jtj;
            for (int k = 0; k < a.rows(); ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-12);
            const Vec step = a.ldlt().solve(-g);
            const Vec xn = x + step;
            const Vec rn = residuals(xn);
            const double cn = rn.squaredNorm();
            if (std::isfinite(cn) && cn < cost) {
                const double rel_step = step.norm() / (x.norm() + 1e-12);
                x = xn;
                r = rn;
                const double drop = cost - cn;
                cost = cn;
                lambda = std::max(lambda / 5.0, 1e-15);
                improved = true;
                if (rel_step < opts.step_tol || drop < 1e-16 * std::max(cost, 1e-300)) converged = true;
                break;
            }
            lambda *= 4.0;
        }
        if (!improved) {
            converged = true;  // no downhill step exists at machine precision
            break;
        }
        if (converged) break;
        j = numeric_jacobian(residuals, x);
    }
    out.x = x;
    out.residuals = r;
    out.jacobian = numeric_jacobian(residuals, x);
    out.cost = cost;
    out.iterations = it;
    out.converged = converged;
    return out;
}

Mat numeric_hessian(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
    const int n = static_cast<int>(x.size());
    Mat hess(n, n);
    const double f0 = f(x);
    for (int i = 0; i < n; ++i) {
        Vec xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        hess(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (h * h);
        for (int k = i + 1; k < n; ++k) {
            Vec a = x, b = x, c = x, d = x;
            a(i) += h; a(k) += h;
            b(i) += h; b(k) -= h;
            c(i) -= h; c(k) += h;
            d(i) -= h; d(k) -= h;
            hess(i, k) = hess(k, i) = (f(a) - f(b) - f(c) + f(d)) / (4.0 * h * h);
        }
    }
    return hess;
}

MinimizeResult newton_polish(const std::function<double(const Vec&)>& f, const Vec& x0, int max_iterations) {
    Vec x = x0;
    double fx = f(x);
    int evals = 1;
    bool converged = false;
    const int n = static_cast<int>(x.size());
    for (int it = 0; it < max_iterations; ++it) {
        Vec g(n);
        const double h = 1e-6;
        for (int i = 0; i < n; ++i) {
            Vec xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            g(i) = (f(xp) - f(xm)) / (2.0 * h);
        }
        const Mat hess = numeric_hessian(f, x, 1e-4);
        evals += 2 * n + 2 * n * n;
        Eigen::SelfAdjointEigenSolver<Mat> es(hess);
        // Regularize indefinite directions so the step stays a descent direction.
        Vec w = es.eigenvalues().cwiseMax(1e-8 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()));
        Vec step = -es.eigenvectors() * (es.eigenvectors().transpose() * g).cwiseQuotient(w);
        double t = 1.0;
        bool accepted = false;
        for (int k = 0; k < 30; ++k) {
            const Vec xn = x + t * step;
            const double fn = f(xn);
            ++evals;
            if (fn <= fx) {
                accepted = true;
                const bool tiny = (t * step).cwiseAbs().maxCoeff() < 1e-12;
                x = xn;
                fx = fn;
                if (tiny) converged = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted || converged) {
            converged = true;
            break;
        }
    }
    return {x, fx, evals, converged};
}

}  // namespace nuqutrit::opt
