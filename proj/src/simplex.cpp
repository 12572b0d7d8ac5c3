#include "swapfit/simplex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace swapfit {

namespace {

struct Vertex {
    std::vector<double> x;
    double f = 0.0;
};

class BoxedObjective {
public:
    BoxedObjective(const Objective& f, const SimplexOptions& opt) : f_(f), opt_(opt) {}

    void project(std::vector<double>& x) const {
        if (!opt_.lower.empty()) {
            for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::max(x[k], opt_.lower[k]);
        }
        if (!opt_.upper.empty()) {
            for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::min(x[k], opt_.upper[k]);
        }
    }

    Vertex eval(std::vector<double> x) const {
        project(x);
        double v = f_(x);
        if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
        return {std::move(x), v};
    }

private:
    const Objective& f_;
    const SimplexOptions& opt_;
};

std::vector<Vertex> build_simplex(const BoxedObjective& obj, const std::vector<double>& centre,
                                  double step_fraction) {
    std::vector<Vertex> simplex;
    simplex.push_back(obj.eval(centre));
    for (std::size_t k = 0; k < centre.size(); ++k) {
        std::vector<double> x = centre;
        double step = centre[k] != 0.0 ? step_fraction * std::abs(centre[k]) : 0.00025;
        x[k] += step;
        Vertex v = obj.eval(x);
        if (v.x == simplex.front().x) {
            // Projected back onto the start: step the other way.
            x[k] = centre[k] - step;
            v = obj.eval(x);
        }
        simplex.push_back(std::move(v));
    }
    return simplex;
}

bool spread_small(const std::vector<Vertex>& s, double rel_tol) {
    double lo = s.front().f;
    double hi = s.back().f;
    if (!std::isfinite(hi)) return false;
    double scale = std::abs(lo) + std::abs(hi);
    if (hi - lo <= rel_tol * 0.5 * scale + std::numeric_limits<double>::min()) return true;
    // Vertices coincide to machine precision: nothing left to resolve.
    double diameter = 0.0;
    double size = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        for (std::size_t k = 0; k < s[0].x.size(); ++k) {
            diameter = std::max(diameter, std::abs(s[i].x[k] - s[0].x[k]));
            size = std::max(size, std::abs(s[0].x[k]));
        }
    }
    return diameter <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(size, 1e-300);
}

}  // namespace

SimplexResult nelder_mead(const Objective& f, std::vector<double> start, const SimplexOptions& opt) {
    constexpr double kReflect = 1.0;
    constexpr double kExpand = 2.0;
    constexpr double kContract = 0.5;
    constexpr double kShrink = 0.5;

    BoxedObjective obj(f, opt);
    const std::size_t dim = start.size();
    auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };

    std::vector<Vertex> s = build_simplex(obj, start, opt.initial_step);
    SimplexResult result;
    int rebuilds_left = 1;

    while (result.iterations < opt.max_iters) {
        std::stable_sort(s.begin(), s.end(), by_value);
        if (spread_small(s, opt.rel_tol)) {
            if (rebuilds_left-- > 0) {
                double step = 0.0;
                for (std::size_t i = 1; i < s.size(); ++i) {
                    for (std::size_t k = 0; k < dim; ++k) {
                        double rel = s[0].x[k] != 0.0 ? std::abs(s[i].x[k] - s[0].x[k]) / std::abs(s[0].x[k]) : 0.0;
                        step = std::max(step, rel);
                    }
                }
                std::vector<double> best = s[0].x;
                double best_f = s[0].f;
                s = build_simplex(obj, best, std::clamp(step * 10.0, 1e-9, opt.initial_step));
                s[0].f = best_f;
                continue;
            }
            result.converged = true;
            break;
        }
        ++result.iterations;

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t k = 0; k < dim; ++k) centroid[k] += s[i].x[k];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        auto along = [&](double t) {
            std::vector<double> x(dim);
            for (std::size_t k = 0; k < dim; ++k) x[k] = centroid[k] + t * (s[dim].x[k] - centroid[k]);
            return obj.eval(std::move(x));
        };

        Vertex reflected = along(-kReflect);
        if (reflected.f < s[0].f) {
            Vertex expanded = along(-kExpand);
            s[dim] = expanded.f < reflected.f ? std::move(expanded) : std::move(reflected);
            continue;
        }
        if (reflected.f < s[dim - 1].f) {
            s[dim] = std::move(reflected);
            continue;
        }
        bool outside = reflected.f < s[dim].f;
        Vertex contracted = along(outside ? -kContract : kContract);
        if (contracted.f < (outside ? reflected.f : s[dim].f)) {
            s[dim] = std::move(contracted);
            continue;
        }
        for (std::size_t i = 1; i <= dim; ++i) {
            std::vector<double> x(dim);
            for (std::size_t k = 0; k < dim; ++k) x[k] = s[0].x[k] + kShrink * (s[i].x[k] - s[0].x[k]);
            s[i] = obj.eval(std::move(x));
        }
    }
    std::stable_sort(s.begin(), s.end(), by_value);
    result.x = s[0].x;
    result.value = s[0].f;
    return result;
}

PolishResult polish_least_squares(const ResidualFn& residuals, std::vector<double> start,
                                  int max_iters) {
    const std::size_t dim = start.size();
    PolishResult out;
    out.x = start;
    std::vector<double> r;
    if (!residuals(out.x, r)) {
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }
    auto sum_sq = [](const std::vector<double>& v) {
        return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
    };
    out.value = sum_sq(r);
    const std::size_t m = r.size();
    double lambda = 1e-3;

    for (int it = 0; it < max_iters; ++it) {
        out.iterations = it + 1;
        Eigen::MatrixXd J(m, dim);
        std::vector<double> rp, rm;
        bool ok = true;
        for (std::size_t k = 0; k < dim && ok; ++k) {
            double h = 1e-6 * std::max(std::abs(out.x[k]), 1e-3);
            std::vector<double> xp = out.x, xm = out.x;
            xp[k] += h;
            xm[k] -= h;
            ok = residuals(xp, rp) && residuals(xm, rm);
            if (!ok) break;
            for (std::size_t i = 0; i < m; ++i) J(i, k) = (rp[i] - rm[i]) / (2.0 * h);
        }
        if (!ok) break;
        Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(m));
        Eigen::MatrixXd JtJ = J.transpose() * J;
        Eigen::VectorXd g = J.transpose() * rv;

        bool improved = false;
        for (int tries = 0; tries < 30; ++tries) {
            Eigen::MatrixXd A = JtJ;
            for (std::size_t k = 0; k < dim; ++k) A(k, k) += lambda * std::max(JtJ(k, k), 1e-300);
            Eigen::VectorXd step = A.ldlt().solve(-g);
            std::vector<double> trial(dim);
            for (std::size_t k = 0; k < dim; ++k) trial[k] = out.x[k] + step(static_cast<Eigen::Index>(k));
            std::vector<double> rt;
            if (residuals(trial, rt)) {
                double v = sum_sq(rt);
                if (v <= out.value) {
                    double gain = out.value - v;
                    out.x = std::move(trial);
                    r = std::move(rt);
                    out.value = v;
                    lambda = std::max(lambda * 0.1, 1e-12);
                    improved = gain > 0.0;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if (!improved) break;
    }
    return out;
}

}  // namespace swapfit
