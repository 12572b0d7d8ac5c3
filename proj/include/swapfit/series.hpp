#pragma once

#include <compare>
#include <filesystem>
#include <string>
#include <vector>

namespace swapfit {

struct QuarterIndex {
    int year = 0;
    int quarter = 1;  // 1..4

    auto operator<=>(const QuarterIndex&) const = default;

    // Quarters elapsed since year 0 Q1; differences give quarter distances.
    int ordinal() const { return year * 4 + (quarter - 1); }
    static QuarterIndex from_ordinal(int ordinal);

    // "1966Q1"
    std::string label() const;
    // First day of the quarter, "1966-01-01".
    std::string iso_date() const;
};

// Parses "YYYY-MM-DD"; the day must be the first day of a quarter.
// Throws Error(ParseError) otherwise.
QuarterIndex parse_quarter_date(const std::string& text);

struct SeriesPoint {
    QuarterIndex index;
    double value = 0.0;
};

struct RawSeries {
    std::string name;
    std::vector<SeriesPoint> points;
};

struct SeriesPair {
    std::vector<double> x;  // GDP role
    std::vector<double> y;  // Public debt role
    std::vector<QuarterIndex> index;
    double scale_applied = 1.0;

    std::size_t size() const { return x.size(); }
};

// Reads a header-first CSV. An empty value_column selects the single column
// that is not date_column.
RawSeries load_series_csv(const std::filesystem::path& path,
                          const std::string& date_column = "DATE",
                          const std::string& value_column = "");

SeriesPair align_pair(const RawSeries& a, const RawSeries& b);

SeriesPair scale_pair(const SeriesPair& pair, double factor);

// Rebuilds two RawSeries from a pair (inverse of align_pair on aligned data).
RawSeries x_series(const SeriesPair& pair, const std::string& name = "x");
RawSeries y_series(const SeriesPair& pair, const std::string& name = "y");

void write_series_csv(const std::filesystem::path& path, const RawSeries& series,
                      const std::string& date_column = "DATE");

}  // namespace swapfit
