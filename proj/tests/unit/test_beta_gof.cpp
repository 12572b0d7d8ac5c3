#include "support.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "swapfit/beta_gof.hpp"
#include "swapfit/synthetic.hpp"

using namespace swapfit;

TEST_SUITE("beta_gof") {

TEST_CASE("cdf examples and limits") {
    CHECK(volodin_cdf(0.5, 0.3, 0.7) == doctest::Approx(1.0 - 0.3).epsilon(1e-15));
    CHECK(volodin_cdf(0.25, 1.0, 1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(volodin_cdf(0.0, 0.2, 0.4) == 0.0);
    CHECK(volodin_cdf(1.0, 0.2, 0.4) == 1.0);
    CHECK_ERROR_KIND(volodin_cdf(1.5, 1, 1), ErrorKind::DomainError);
    CHECK_ERROR_KIND(volodin_cdf(0.5, 0, 1), ErrorKind::DomainError);
}

TEST_CASE("pdf examples and domain") {
    CHECK(volodin_pdf(0.25, 1.0, 1.0) == doctest::Approx(0.5 / 0.5625).epsilon(1e-15));
    CHECK(volodin_pdf(0.25, 1.0, 1.0) == doctest::Approx(0.8889).epsilon(1e-4));
    CHECK_ERROR_KIND(volodin_pdf(0.0, 1, 1), ErrorKind::DomainError);
    CHECK_ERROR_KIND(volodin_pdf(1.0, 1, 1), ErrorKind::DomainError);
}

TEST_CASE("cdf is continuous at one half and non-decreasing") {
    for (auto [a, b] : {std::pair{0.1, 0.1}, {0.3, 0.7}, {1.0, 1.0}, {2.5, 0.4}}) {
        CHECK(volodin_cdf(0.5 - 1e-12, a, b) == doctest::Approx(volodin_cdf(0.5 + 1e-12, a, b)).epsilon(1e-9));
        double prev = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            const double v = volodin_cdf(i / 1000.0, a, b);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("pdf is the derivative of the cdf") {
    for (auto [a, b] : {std::pair{0.1, 0.1}, {0.3, 0.7}, {1.0, 1.0}, {2.0, 0.5}}) {
        for (double x = 0.05; x < 0.96; x += 0.01) {
            if (std::abs(x - 0.5) < 0.02) continue;
            const double h = 1e-6;
            const double fd = (volodin_cdf(x + h, a, b) - volodin_cdf(x - h, a, b)) / (2 * h);
            CHECK(std::abs(fd - volodin_pdf(x, a, b)) < 1e-6 * std::max(1.0, volodin_pdf(x, a, b)));
        }
    }
}

TEST_CASE("pdf integrates to one") {
    boost::math::quadrature::tanh_sinh<double> integrator;
    for (auto [a, b] : {std::pair{0.1, 0.1}, {0.3, 0.7}, {1.0, 1.0}}) {
        // In double precision 1 - x loses all accuracy near x = 1, so the upper
        // half is integrated through the reflection j(1 - t; a, b) = j(t; b, a),
        // which is checked first where 1 - t is exact enough.
        for (double t = 1e-3; t < 0.5; t += 1e-3) {
            CHECK(volodin_pdf(1.0 - t, a, b) == doctest::Approx(volodin_pdf(t, b, a)).epsilon(1e-11));
        }
        // x = u^(1/a) removes the endpoint singularity of small shapes; the
        // transformed integrand tends to 1 - gamma = b/(a+b) as u -> 0.
        auto lower_half = [&](double sa, double sb) {
            const double k = 1.0 / sa, weight = sb / (sa + sb);
            auto f = [&](double u) {
                const double x = std::pow(u, k);
                return x <= 0 ? weight : volodin_pdf(x, sa, sb) * k * std::pow(u, k - 1);
            };
            return integrator.integrate(f, 0.0, std::pow(0.5, sa));
        };
        const double lo = lower_half(a, b), hi = lower_half(b, a);
        INFO("a=" << a << " b=" << b << " lo=" << lo << " hi=" << hi);
        CHECK(std::abs(lo + hi - 1.0) < 1e-6);
    }
}

TEST_CASE("closed form on two points") {
    std::vector<double> p{0.2, 0.8};
    GofReport r = fit_alpha_beta(p);
    REQUIRE_FALSE(r.one_sided());
    CHECK(*r.alpha_hat == doctest::Approx(1.0 / std::log(4.0)).epsilon(1e-14));
    CHECK(*r.beta_hat == doctest::Approx(1.0 / std::log(4.0)).epsilon(1e-14));
    CHECK(*r.eps_sum == doctest::Approx(2.0 / std::log(4.0)));
    CHECK(r.gamma == 0.5);
    auto [ga, gb] = grid_mle_beta(p);
    CHECK(std::abs(ga - 0.721) <= kGridStep);
    CHECK(std::abs(gb - 0.721) <= kGridStep);
}

TEST_CASE("report bookkeeping: groups, clamp, histogram") {
    std::vector<double> p{0.0, 0.5, 0.51, 1.0, 0.999, 0.05};
    GofReport r = fit_alpha_beta(p);
    CHECK(r.n0 == 3);  // 0, 0.5 and 0.05
    CHECK(r.n1 == 3);
    CHECK(r.clamp_count == 2);
    std::size_t mass = 0;
    for (auto c : r.histogram) mass += c;
    CHECK(mass == p.size());
    CHECK(r.histogram[0] == 1);   // 0.0
    CHECK(r.histogram[1] == 1);   // 0.05 opens the second bin
    CHECK(r.histogram[19] == 2);  // 0.999 and 1.0
}

TEST_CASE("one-sided input gives a partial report or AllOneSided") {
    std::vector<double> low{0.1, 0.2, 0.3};
    GofReport r = fit_alpha_beta(low);
    CHECK(r.one_sided());
    CHECK(r.alpha_hat.has_value());
    CHECK_FALSE(r.beta_hat.has_value());
    CHECK_ERROR_KIND(fit_alpha_beta_strict(low), ErrorKind::AllOneSided);
    CHECK_ERROR_KIND(grid_mle_beta(low), ErrorKind::AllOneSided);
}

TEST_CASE("estimator bounds near the extremes and the middle") {
    std::vector<double> sure{1e-6, 2e-5, 1e-4, 0.99999, 0.9999, 0.99995};
    GofReport a = fit_alpha_beta(sure);
    CHECK(*a.alpha_hat < 0.1);
    CHECK(*a.beta_hat < 0.1);
    std::vector<double> unsure{0.49, 0.48, 0.495, 0.51, 0.52, 0.505};
    GofReport b = fit_alpha_beta(unsure);
    CHECK(*b.alpha_hat > 1.0);
    CHECK(*b.beta_hat > 1.0);
}

TEST_CASE("surety ordering and permutation invariance") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u0(0.01, 0.5), u1(0.5001, 0.99);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> p;
        for (int i = 0; i < 15; ++i) p.push_back(u0(rng));
        for (int i = 0; i < 12; ++i) p.push_back(u1(rng));
        GofReport base = fit_alpha_beta(p);
        std::vector<double> closer = p;
        for (auto& v : closer) {
            if (v <= 0.5) v *= 0.5;
        }
        GofReport c = fit_alpha_beta(closer);
        CHECK(*c.alpha_hat < *base.alpha_hat);
        CHECK(*c.beta_hat == *base.beta_hat);
        std::vector<double> closer1 = p;
        for (auto& v : closer1) {
            if (v > 0.5) v = 1.0 - (1.0 - v) * 0.5;
        }
        CHECK(*fit_alpha_beta(closer1).beta_hat < *base.beta_hat);
        std::shuffle(p.begin(), p.end(), rng);
        GofReport s = fit_alpha_beta(p);
        CHECK(*s.alpha_hat == doctest::Approx(*base.alpha_hat).epsilon(1e-14));
        CHECK(*s.beta_hat == doctest::Approx(*base.beta_hat).epsilon(1e-14));
    }
}

TEST_CASE("closed form agrees with the grid maximiser") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        std::vector<double> p;
        const double spread = 0.05 + 0.4 * u(rng);
        for (int i = 0; i < 30; ++i) {
            // Mass near the ends keeps both estimates inside (0, 3].
            const double e = std::pow(u(rng), 1.0 / spread) * 0.5;
            p.push_back(i % 2 ? e : 1.0 - e);
        }
        GofReport r = fit_alpha_beta(p);
        if (r.one_sided() || *r.alpha_hat > kGridMax || *r.beta_hat > kGridMax) continue;
        auto [ga, gb] = grid_mle_beta(p);
        CHECK(std::abs(ga - *r.alpha_hat) <= kGridStep);
        CHECK(std::abs(gb - *r.beta_hat) <= kGridStep);
    }
}

}
