#include "swapfit/stats.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "swapfit/error.hpp"

namespace swapfit {

OlsResult ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response) {
    const Eigen::Index n = design.rows();
    const Eigen::Index k = design.cols();
    if (n <= k) {
        throw Error(ErrorKind::InsufficientData,
                    std::to_string(n) + " observations for " + std::to_string(k) + " parameters");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_check(design);
    if (rank_check.rank() < k) throw Error(ErrorKind::SingularDesign, "design matrix is rank deficient");

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
    OlsResult out;
    out.coefficients = qr.solve(response);
    out.residuals = response - design * out.coefficients;
    out.rss = out.residuals.squaredNorm();
    out.nobs = n;
    out.nparams = k;

    Eigen::MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    Eigen::MatrixXd r_inv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const double s2 = out.rss / static_cast<double>(n - k);
    out.standard_errors = (r_inv.rowwise().squaredNorm() * s2).cwiseSqrt();
    return out;
}

namespace {

// Continued fraction for I_x(a, b), modified Lentz.
double beta_continued_fraction(double x, double a, double b) {
    constexpr double kTiny = 1e-300;
    constexpr double kTol = 1e-12;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kTol) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::DomainError, "beta shapes must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x)
                             + b * std::log1p(-x);
    const double front = std::exp(log_front);
    // Use the continued fraction where it converges fast, symmetry otherwise.
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
    return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double f_upper_tail(double f, double df_num, double df_den) {
    if (!(df_num > 0.0) || !(df_den > 0.0)) throw Error(ErrorKind::DomainError, "F degrees of freedom");
    if (!(f > 0.0)) return 1.0;
    if (std::isinf(f)) return 0.0;
    const double x = df_den / (df_den + df_num * f);
    return regularized_incomplete_beta(x, 0.5 * df_den, 0.5 * df_num);
}

}  // namespace swapfit
