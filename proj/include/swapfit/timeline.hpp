#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "swapfit/model.hpp"
#include "swapfit/series.hpp"

namespace swapfit {

// z = 1 means X is explanatory (X drives Y).
enum class Driver { XDrives, YDrives };
const char* to_string(Driver d);

struct Segment {
    QuarterIndex start;
    QuarterIndex end;  // inclusive
    Driver driver = Driver::YDrives;

    bool operator==(const Segment&) const = default;
};

// Centred running median of odd width; the ends are padded by repeating the
// first and last values. Width 1 returns z unchanged.
Assignment median_filter(std::span<const std::uint8_t> z, std::size_t window);

// Maximal constant runs of the filtered z. Throws LengthMismatch when the
// sizes differ and InvalidArgument for an even or zero window.
std::vector<Segment> timeline_segments(std::span<const std::uint8_t> z,
                                       std::span<const QuarterIndex> index, std::size_t window);

// Driver code (1 for XDrives) of each quarter in index, read from the segment
// that contains it. Throws InvalidArgument for a quarter outside every segment.
Assignment expand_segments(std::span<const Segment> segments, std::span<const QuarterIndex> index);

}  // namespace swapfit
