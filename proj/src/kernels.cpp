#include "swapfit/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace swapfit::kernels {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double loss_term(LossKind kind, double x, double y, std::uint8_t z, const ModelSpec& m,
                        const LossWeights& w) {
    double fwd = y - forward(m, x);
    double fwd_sq = fwd * fwd / w.sigma1_sq;
    // The GMM loss only uses the inverse route for Z = 0 points.
    if (kind == LossKind::Gmm && z) return fwd_sq;
    ClampedInverse inv = inverse_clamped(m, y);
    double bwd = x - inv.value;
    double bwd_sq = bwd * bwd / w.sigma0_sq;
    double term = 0.0;
    if (kind == LossKind::Gmm) {
        term = bwd_sq;
    } else {
        term = z ? fwd_sq - bwd_sq : bwd_sq - fwd_sq;
    }
    if (inv.deficit > 0.0) term += inv.deficit * kClampPenalty / w.sigma0_sq;
    return term;
}

inline void log_weight_pair(double x, double y, const ModelSpec& m, const PosteriorParams& p,
                            double& w1, double& w0) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double fwd = y - forward(m, x);
    w1 = p.log_pi1 - 0.5 * std::log(two_pi * p.sigma1_sq) - fwd * fwd / (2.0 * p.sigma1_sq)
         + exponential_log_density(p.lambda_x, x);
    ClampedInverse inv = inverse_clamped(m, y);
    if (inv.deficit > 0.0) {
        w0 = kNegInf;
        return;
    }
    double bwd = x - inv.value;
    w0 = p.log_pi0 - 0.5 * std::log(two_pi * p.sigma0_sq) - bwd * bwd / (2.0 * p.sigma0_sq)
         + exponential_log_density(p.lambda_y, y);
}

}  // namespace

double exponential_log_density(double lambda, double v) {
    if (v < 0.0) return kNegInf;
    return std::log(lambda) - lambda * v;
}

namespace serial {

void loss_terms(LossKind kind, const LossInputs& in, const ModelSpec& m, const LossWeights& w,
                std::span<double> out) {
    for (std::size_t i = 0; i < in.x.size(); ++i) {
        out[i] = loss_term(kind, in.x[i], in.y[i], in.z[i], m, w);
    }
}

void log_weights(std::span<const double> x, std::span<const double> y, const ModelSpec& m,
                 const PosteriorParams& p, std::span<double> log_w1, std::span<double> log_w0) {
    for (std::size_t i = 0; i < x.size(); ++i) log_weight_pair(x[i], y[i], m, p, log_w1[i], log_w0[i]);
}

}  // namespace serial

namespace parallel {

void loss_terms(LossKind kind, const LossInputs& in, const ModelSpec& m, const LossWeights& w,
                std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(in.x.size());
#pragma omp parallel for schedule(static) if (in.x.size() >= kParallelMinPoints)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[i] = loss_term(kind, in.x[i], in.y[i], in.z[i], m, w);
    }
}

void log_weights(std::span<const double> x, std::span<const double> y, const ModelSpec& m,
                 const PosteriorParams& p, std::span<double> log_w1, std::span<double> log_w0) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() >= kParallelMinPoints)
    for (std::ptrdiff_t i = 0; i < n; ++i) log_weight_pair(x[i], y[i], m, p, log_w1[i], log_w0[i]);
}

}  // namespace parallel

}  // namespace swapfit::kernels
