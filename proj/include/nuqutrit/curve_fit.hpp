#pragma once

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace nuqutrit {

/// lorentzian:    c + a g^2 / ((x - x0)^2 + g^2)              params (a, x0, g, c)
/// cosine:        c + a cos(w x + p)                          params (a, w, p, c)
/// damped_cosine: c + exp(-k x) (b + a cos(w x + p))          params (a, w, p, b, k, c)
/// line:          c + m x                                     params (m, c)
enum class CurveModel { lorentzian, cosine, damped_cosine, line };

std::string_view curve_model_name(CurveModel m);
int parameter_count(CurveModel m);
double evaluate(CurveModel m, const Eigen::VectorXd& params, double x);

struct CurveFitResult {
    CurveModel model = CurveModel::line;
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;  // s^2 (J^T J)^+ with s^2 = RSS / (n - p)
    Eigen::VectorXd std_errors;
    double residual_norm = 0.0;  // sqrt(RSS)
    int starts = 0;
};

/// Least-squares fit with deterministic starting points derived from the data.
/// Throws std::invalid_argument with fewer than p + 1 points or fewer distinct abscissae than parameters.
CurveFitResult curve_fit(CurveModel model, const std::vector<double>& xs, const std::vector<double>& ys);

/// Same, starting only from the supplied guess.
CurveFitResult curve_fit(CurveModel model, const std::vector<double>& xs, const std::vector<double>& ys,
                         const Eigen::VectorXd& guess);

}  // namespace nuqutrit
