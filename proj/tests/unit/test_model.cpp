#include "support.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "swapfit/model.hpp"

using namespace swapfit;

namespace {

// Normal equations by Cramer's rule in long double: an oracle independent of
// the QR path.
std::vector<double> normal_equations(const std::vector<double>& x, const std::vector<double>& y, int degree) {
    const int k = degree + 1;
    long double m[3][4] = {};
    for (std::size_t i = 0; i < x.size(); ++i) {
        long double pw[5] = {1, x[i], (long double)x[i] * x[i], (long double)x[i] * x[i] * x[i],
                             (long double)x[i] * x[i] * x[i] * x[i]};
        for (int r = 0; r < k; ++r) {
            for (int c = 0; c < k; ++c) m[r][c] += pw[r + c];
            m[r][3] += pw[r] * y[i];
        }
    }
    auto det = [&](int col_replaced) {
        long double a[3][3];
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) a[r][c] = c == col_replaced ? m[r][3] : m[r][c];
        if (k == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
        return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
               + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    };
    const long double d = det(-1);
    std::vector<double> beta(k);  // ascending powers
    for (int c = 0; c < k; ++c) beta[c] = double(det(c) / d);
    // Descending order as ModelSpec stores it.
    return std::vector<double>(beta.rbegin(), beta.rend());
}

SeriesPair noisy_pair(std::uint64_t seed, std::size_t n, double a, double b, double c, double noise) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.5, 4.0);
    std::normal_distribution<double> e(0.0, noise);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = ux(rng);
        y[i] = a * x[i] * x[i] + b * x[i] + c + e(rng);
    }
    return testing::make_pair(x, y);
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("forward evaluation") {
    CHECK(forward(ModelSpec::linear(4.4972, -2.8404), 1.0) == doctest::Approx(1.6568).epsilon(1e-12));
    CHECK(forward(ModelSpec::quadratic(1, 0, 0), 2.0) == 4.0);
    CHECK(forward(ModelSpec::linear(1, 0), 3.25) == 3.25);
}

TEST_CASE("inverse evaluation and its domain") {
    CHECK(inverse(ModelSpec::linear(2, 1), 5.0) == 2.0);
    CHECK(inverse(ModelSpec::quadratic(1, 0, 0), 4.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_ERROR_KIND(inverse(ModelSpec::quadratic(1, 0, 1), 0.0), ErrorKind::InverseDomain);
    ClampedInverse ci = inverse_clamped(ModelSpec::quadratic(1, 0, 1), 0.0);
    CHECK(ci.deficit > 0.0);
    CHECK(ci.value == doctest::Approx(0.0));
    CHECK(inverse_clamped(ModelSpec::quadratic(1, 0, 1), 5.0).deficit == 0.0);
}

TEST_CASE("validation rejects malformed models") {
    CHECK_ERROR_KIND(validate(ModelSpec::linear(0, 1)), ErrorKind::InvalidArgument);
    CHECK_ERROR_KIND(validate(ModelSpec::quadratic(0, 1, 1)), ErrorKind::InvalidArgument);
    CHECK_ERROR_KIND(validate(ModelSpec{Family::Linear, {1, 2, 3}}), ErrorKind::InvalidArgument);
    CHECK(parse_family("quadratic") == Family::Quadratic);
    CHECK_ERROR_KIND(parse_family("cubic"), ErrorKind::InvalidArgument);
}

TEST_CASE("increasing_on follows the branch vertex") {
    ModelSpec q = ModelSpec::quadratic(1, -2, 0);  // vertex at x = 1
    CHECK(increasing_on(q, 1.5, 3.0));
    CHECK_FALSE(increasing_on(q, 0.5, 3.0));
    CHECK_FALSE(increasing_on(ModelSpec::linear(-1, 0), 0.0, 1.0));
}

TEST_CASE("inverse undoes forward on the increasing branch") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coef(-3.0, 3.0), pos(0.01, 5.0);
    int checked = 0;
    for (int i = 0; i < 2000; ++i) {
        const double a = pos(rng), b = coef(rng), c = coef(rng);
        ModelSpec q = ModelSpec::quadratic(a, b, c);
        const double vertex = -b / (2 * a);
        const double x = vertex + pos(rng);
        CHECK(std::abs(inverse(q, forward(q, x)) - x) < 1e-9 * std::max(1.0, std::abs(x)));
        ModelSpec l = ModelSpec::linear(coef(rng) + (i % 2 ? 3.5 : -3.5), c);
        CHECK(std::abs(inverse(l, forward(l, x)) - x) < 1e-9 * std::max(1.0, std::abs(x)));
        ++checked;
    }
    CHECK(checked == 2000);
}

TEST_CASE("losses are infinite for a model that decreases on the data") {
    SeriesPair p = testing::make_pair({1, 2, 3}, {3, 2, 1});
    Assignment z{1, 0, 1};
    CHECK(std::isinf(gmm_loss(p, z, {1, 1}, ModelSpec::linear(-1, 4))));
    CHECK(std::isinf(beta_loss(p, z, {1, 1}, ModelSpec::quadratic(1, -4, 0))));
    CHECK(std::isfinite(gmm_loss(p, z, {1, 1}, ModelSpec::linear(1, 0))));
}

TEST_CASE("gmm loss equals the hand-computed weighted sum") {
    SeriesPair p = testing::make_pair({1, 2, 3}, {3, 4, 8});
    ModelSpec m = ModelSpec::linear(2, 1);
    Assignment z{1, 0, 1};
    // z=1: (3-3)^2/2 + (8-7)^2/2; z=0: (2 - 1.5)^2/0.5
    CHECK(gmm_loss(p, z, {0.5, 2.0}, m) == doctest::Approx(0.5 + 0.5));
    // beta: z=1 terms r_f^2/s1 - r_inv^2/s0; z=0 terms r_inv^2/s0 - r_f^2/s1
    const double expect = (0.0 - 0.0) + (1.0 / 2.0 - 0.25 / 0.5) + (0.25 / 0.5 - 1.0 / 2.0);
    CHECK(beta_loss(p, z, {0.5, 2.0}, m) == doctest::Approx(expect));
}

TEST_CASE("exact data is recovered for any assignment") {
    std::vector<double> x{0.5, 1.0, 1.7, 2.2, 3.1, 4.0}, y;
    for (double v : x) y.push_back(2 * v + 1);
    SeriesPair p = testing::make_pair(x, y);
    for (Assignment z : {Assignment{1, 1, 1, 1, 1, 1}, Assignment{0, 0, 0, 0, 0, 0}, Assignment{1, 0, 1, 0, 0, 1}}) {
        ModelSpec m = fit_gmm_loss(p, z, {0.3, 2.0}, Family::Linear);
        CHECK(std::abs(m.coefficients[0] - 2.0) < 1e-8);
        CHECK(std::abs(m.coefficients[1] - 1.0) < 1e-8);
    }
}

TEST_CASE("all z = 1 reproduces least squares from the normal equations") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        SeriesPair lin = noisy_pair(seed, 40, 0.0, 1.8, 0.4, 0.3);
        Assignment ones(lin.size(), 1);
        auto ref = normal_equations(lin.x, lin.y, 1);
        ModelSpec m = fit_gmm_loss(lin, ones, {1.0, 0.7}, Family::Linear);
        CHECK(std::abs(m.coefficients[0] - ref[0]) < 1e-8);
        CHECK(std::abs(m.coefficients[1] - ref[1]) < 1e-8);
        ModelSpec o = ols_fit(lin, Family::Linear);
        CHECK(std::abs(o.coefficients[0] - ref[0]) < 1e-10);

        SeriesPair quad = noisy_pair(seed + 10, 40, 0.4, 0.8, 0.2, 0.2);
        auto refq = normal_equations(quad.x, quad.y, 2);
        ModelSpec mq = fit_gmm_loss(quad, Assignment(quad.size(), 1), {1.0, 1.0}, Family::Quadratic);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(mq.coefficients[k] - refq[k]) < 1e-8);
    }
}

TEST_CASE("all z = 0 linear fit is the inverted X-on-Y regression") {
    SeriesPair p = noisy_pair(11, 50, 0.0, 2.5, -1.0, 0.4);
    auto xy = normal_equations(p.y, p.x, 1);  // x = c*y + d
    const double a = 1.0 / xy[0], b = -xy[1] / xy[0];
    ModelSpec m = fit_gmm_loss(p, Assignment(p.size(), 0), {0.2, 1.0}, Family::Linear);
    CHECK(std::abs(m.coefficients[0] - a) < 1e-8);
    CHECK(std::abs(m.coefficients[1] - b) < 1e-8);
}

TEST_CASE("local search never worsens its OLS start") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        SeriesPair p = noisy_pair(100 + t, 30, t % 2 ? 0.3 : 0.0, 1.5, 0.5, 0.3);
        const Family f = t % 2 ? Family::Quadratic : Family::Linear;
        Assignment z(p.size());
        for (auto& v : z) v = rng() & 1;
        LossWeights w{0.05 + (rng() % 100) / 100.0, 0.05 + (rng() % 100) / 100.0};
        ModelSpec start = ols_fit(p, f);
        ModelSpec m = fit_gmm_loss(p, z, w, f);
        CHECK(gmm_loss(p, z, w, m) <= gmm_loss(p, z, w, start) + 1e-12);
        CHECK(increasing_on(m, *std::min_element(p.x.begin(), p.x.end()), *std::max_element(p.x.begin(), p.x.end())));
    }
}

TEST_CASE("degenerate design is reported") {
    SeriesPair p = testing::make_pair({2, 2, 2, 2}, {1, 2, 3, 4});
    CHECK_ERROR_KIND(ols_fit(p, Family::Linear), ErrorKind::DegenerateDesign);
    CHECK_ERROR_KIND(fit_gmm_loss(p, Assignment(4, 1), {1, 1}, Family::Linear), ErrorKind::DegenerateDesign);
}

TEST_CASE("beta loss keeps an exact fit, which is stationary") {
    std::vector<double> x{0.5, 1.0, 1.7, 2.2, 3.1, 4.0}, y;
    for (double v : x) y.push_back(2 * v + 1);
    SeriesPair p = testing::make_pair(x, y);
    Assignment ones(p.size(), 1);
    LossWeights w{1.0, 1.0};
    ModelSpec m = fit_beta_loss(p, ones, w, Family::Linear, ModelSpec::linear(2.05, 0.97));
    CHECK(std::abs(m.coefficients[0] - 2.0) < 1e-6);
    CHECK(std::abs(m.coefficients[1] - 1.0) < 1e-6);
    // Central-difference gradient of the loss vanishes at (2, 1).
    const double h = 1e-6;
    for (int k = 0; k < 2; ++k) {
        ModelSpec up = ModelSpec::linear(2, 1), dn = ModelSpec::linear(2, 1);
        up.coefficients[k] += h;
        dn.coefficients[k] -= h;
        CHECK(std::abs((beta_loss(p, ones, w, up) - beta_loss(p, ones, w, dn)) / (2 * h)) < 1e-6);
    }
}

TEST_CASE("beta loss with a z = 0 majority is unbounded and hits the trust region") {
    SeriesPair p = noisy_pair(3, 40, 0.0, 2.0, 1.0, 0.3);
    Assignment z(p.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = i % 3 == 0 ? 1 : 0;
    ModelSpec init = fit_gmm_loss(p, z, {0.1, 0.1}, Family::Linear);
    CHECK_ERROR_KIND(fit_beta_loss(p, z, {0.1, 0.1}, Family::Linear, init), ErrorKind::TrustRegionExhausted);
}

}
