#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace testing {

// Least squares through the normal equations, solved by Gaussian elimination
// with partial pivoting in long double. Returns (coefficients, rss).
inline std::pair<std::vector<long double>, long double> normal_equations_ols(
    const std::vector<std::vector<double>>& rows, const std::vector<double>& y) {
    const std::size_t k = rows.front().size();
    std::vector<std::vector<long double>> a(k, std::vector<long double>(k + 1, 0.0L));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t r = 0; r < k; ++r) {
            for (std::size_t c = 0; c < k; ++c) a[r][c] += (long double)rows[i][r] * rows[i][c];
            a[r][k] += (long double)rows[i][r] * y[i];
        }
    }
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        }
        std::swap(a[col], a[piv]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            const long double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= k; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<long double> beta(k);
    for (std::size_t r = 0; r < k; ++r) beta[r] = a[r][k] / a[r][r];
    long double rss = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        long double fit = 0;
        for (std::size_t c = 0; c < k; ++c) fit += beta[c] * rows[i][c];
        rss += (y[i] - fit) * (y[i] - fit);
    }
    return {beta, rss};
}

}  // namespace testing
