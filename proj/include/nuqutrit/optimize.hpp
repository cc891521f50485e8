#pragma once

#include <Eigen/Dense>

#include <functional>

namespace nuqutrit::opt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct MinimizeResult {
    Vec x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    double initial_step = 0.5;
    double x_tol = 1e-10;
    double f_tol = 1e-14;
    int max_evaluations = 20000;
};

/// Derivative-free simplex minimization.
MinimizeResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0,
                           const NelderMeadOptions& opts = {});

struct LeastSquaresResult {
    Vec x;
    Vec residuals;
    Mat jacobian;
    double cost = 0.0;  // sum of squared residuals
    int iterations = 0;
    bool converged = false;
};

struct LevenbergMarquardtOptions {
    int max_iterations = 500;
    double gradient_tol = 1e-14;
    double step_tol = 1e-14;
    double cost_tol = 1e-30;
    double initial_lambda = 1e-3;
};

/// Levenberg-Marquardt on r(x) with a central-difference Jacobian.
LeastSquaresResult levenberg_marquardt(const std::function<Vec(const Vec&)>& residuals, const Vec& x0,
                                       const LevenbergMarquardtOptions& opts = {});

Mat numeric_jacobian(const std::function<Vec(const Vec&)>& r, const Vec& x);

/// Central-difference Hessian of a scalar function.
Mat numeric_hessian(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-4);

/// Newton iterations on a smooth scalar function using finite differences, with backtracking.
MinimizeResult newton_polish(const std::function<double(const Vec&)>& f, const Vec& x0, int max_iterations = 30);

}  // namespace nuqutrit::opt
