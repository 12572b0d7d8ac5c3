#pragma once

#include <Eigen/Dense>

namespace swapfit {

struct OlsResult {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    Eigen::VectorXd standard_errors;  // sqrt(diag(s^2 (X'X)^-1)), s^2 = rss / (n - k)
    double rss = 0.0;
    Eigen::Index nobs = 0;
    Eigen::Index nparams = 0;
};

// Least squares through a Householder QR of the design. Throws SingularDesign
// when the design is rank deficient and InsufficientData when n <= k.
OlsResult ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response);

// Regularised incomplete beta I_x(a, b) by Lentz's continued fraction
// (relative tolerance 1e-12).
double regularized_incomplete_beta(double x, double a, double b);

// P(F > f) for F ~ F(df_num, df_den).
double f_upper_tail(double f, double df_num, double df_den);

}  // namespace swapfit
