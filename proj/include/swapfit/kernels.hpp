#pragma once

// Per-observation kernels used inside every optimisation step. Each kernel
// exists twice: a plain loop in `serial` (the reference) and an OpenMP loop in
// `parallel`. Both write one term per observation into a caller buffer; the
// caller reduces with pairwise_sum, so results do not depend on scheduling.

#include <cstddef>
#include <cstdint>
#include <span>

#include "swapfit/model.hpp"

namespace swapfit::kernels {

enum class LossKind { Gmm, Beta };

struct LossInputs {
    std::span<const double> x;
    std::span<const double> y;
    std::span<const std::uint8_t> z;
};

// Posterior log-weights: log_w1 = log(pi1 N(y; g(x), s1) hX(x)),
// log_w0 = log(pi0 N(x; g^-1(y), s0) hY(y)). log_w0 is -inf where g^-1 is
// undefined at y.
struct PosteriorParams {
    double sigma0_sq = 1.0;
    double sigma1_sq = 1.0;
    double log_pi0 = 0.0;
    double log_pi1 = 0.0;
    double lambda_x = 1.0;
    double lambda_y = 1.0;
};

// Below this many observations the parallel kernels run on one thread.
inline constexpr std::size_t kParallelMinPoints = 2048;

namespace serial {
void loss_terms(LossKind kind, const LossInputs& in, const ModelSpec& m, const LossWeights& w,
                std::span<double> out);
void log_weights(std::span<const double> x, std::span<const double> y, const ModelSpec& m,
                 const PosteriorParams& p, std::span<double> log_w1, std::span<double> log_w0);
}  // namespace serial

namespace parallel {
void loss_terms(LossKind kind, const LossInputs& in, const ModelSpec& m, const LossWeights& w,
                std::span<double> out);
void log_weights(std::span<const double> x, std::span<const double> y, const ModelSpec& m,
                 const PosteriorParams& p, std::span<double> log_w1, std::span<double> log_w0);
}  // namespace parallel

// Exponential log-density log(lambda) - lambda*v, -inf for v < 0.
double exponential_log_density(double lambda, double v);

}  // namespace swapfit::kernels
