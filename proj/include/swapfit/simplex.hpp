#pragma once

#include <functional>
#include <span>
#include <vector>

namespace swapfit {

using Objective = std::function<double(std::span<const double>)>;

struct SimplexOptions {
    double rel_tol = 1e-12;     // relative spread of objective values at the vertices
    int max_iters = 2000;
    double initial_step = 0.05; // fraction of each start coordinate
    // Optional box; points are projected onto it before evaluation.
    std::vector<double> lower;
    std::vector<double> upper;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Nelder-Mead with reflection, expansion, contraction and shrink steps. The
// simplex is rebuilt once around the first converged point to guard against
// collapse onto a non-stationary face.
SimplexResult nelder_mead(const Objective& f, std::vector<double> start,
                          const SimplexOptions& opt = {});

using ResidualFn = std::function<bool(std::span<const double>, std::vector<double>&)>;

struct PolishResult {
    std::vector<double> x;
    double value = 0.0;  // sum of squared residuals
    int iterations = 0;
};

// Levenberg-Marquardt on a residual vector with a central-difference Jacobian.
// The residual callback returns false when a point is outside the valid
// domain; such steps are rejected.
PolishResult polish_least_squares(const ResidualFn& residuals, std::vector<double> start,
                                  int max_iters = 100);

}  // namespace swapfit
