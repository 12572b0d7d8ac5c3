#include "swapfit/timeline.hpp"

#include <algorithm>
#include <string>

#include "swapfit/error.hpp"

namespace swapfit {

const char* to_string(Driver d) { return d == Driver::XDrives ? "XDrives" : "YDrives"; }

Assignment median_filter(std::span<const std::uint8_t> z, std::size_t window) {
    if (window == 0 || window % 2 == 0) {
        throw Error(ErrorKind::InvalidArgument, "smoothing window must be odd, got " + std::to_string(window));
    }
    const std::size_t n = z.size();
    Assignment out(z.begin(), z.end());
    if (window == 1 || n == 0) return out;
    const auto half = static_cast<long>(window / 2);
    const auto last = static_cast<long>(n) - 1;
    for (long i = 0; i <= last; ++i) {
        std::size_t ones = 0;
        for (long j = i - half; j <= i + half; ++j) ones += z[static_cast<std::size_t>(std::clamp(j, 0L, last))];
        // Binary values: the median is the majority.
        out[static_cast<std::size_t>(i)] = ones * 2 > window ? 1 : 0;
    }
    return out;
}

std::vector<Segment> timeline_segments(std::span<const std::uint8_t> z,
                                       std::span<const QuarterIndex> index, std::size_t window) {
    if (z.size() != index.size()) {
        throw Error(ErrorKind::LengthMismatch, std::to_string(z.size()) + " assignments for "
                                                   + std::to_string(index.size()) + " quarters");
    }
    const Assignment smooth = median_filter(z, window);
    std::vector<Segment> out;
    for (std::size_t i = 0; i < smooth.size(); ++i) {
        const Driver d = smooth[i] ? Driver::XDrives : Driver::YDrives;
        if (!out.empty() && out.back().driver == d) {
            out.back().end = index[i];
        } else {
            out.push_back({index[i], index[i], d});
        }
    }
    return out;
}

Assignment expand_segments(std::span<const Segment> segments, std::span<const QuarterIndex> index) {
    Assignment out;
    out.reserve(index.size());
    std::size_t k = 0;
    for (const auto& q : index) {
        while (k < segments.size() && segments[k].end < q) ++k;
        if (k == segments.size() || q < segments[k].start) {
            throw Error(ErrorKind::InvalidArgument, q.label() + " is not covered by any segment");
        }
        out.push_back(segments[k].driver == Driver::XDrives ? 1 : 0);
    }
    return out;
}

}  // namespace swapfit
