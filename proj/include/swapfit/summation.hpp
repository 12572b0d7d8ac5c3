#pragma once

#include <cstddef>
#include <span>

namespace swapfit {

// Pairwise (cascade) summation in a fixed split order. The result depends only
// on the input sequence, never on how the terms were produced, so parallel
// and serial kernels that fill the same buffer agree bit for bit.
inline double pairwise_sum(std::span<const double> v) {
    constexpr std::size_t kBlock = 16;
    if (v.size() <= kBlock) {
        double s = 0.0;
        for (double t : v) s += t;
        return s;
    }
    std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace swapfit
