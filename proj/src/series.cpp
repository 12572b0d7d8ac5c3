#include "swapfit/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "swapfit/error.hpp"

namespace swapfit {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    auto end = s.find_last_not_of(" \t\r\n");
    std::string out = s.substr(begin, end - begin + 1);
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
        out = out.substr(1, out.size() - 2);
    }
    return out;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

int parse_int(const std::string& s, std::size_t expected_len) {
    if (s.size() != expected_len) return -1;
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return -1;
    return value;
}

std::string row_error(std::size_t row, const std::string& reason) {
    return "row " + std::to_string(row) + ": " + reason;
}

}  // namespace

QuarterIndex QuarterIndex::from_ordinal(int ordinal) {
    int year = ordinal >= 0 ? ordinal / 4 : -((-ordinal + 3) / 4);
    return QuarterIndex{year, ordinal - year * 4 + 1};
}

std::string QuarterIndex::label() const {
    return std::to_string(year) + "Q" + std::to_string(quarter);
}

std::string QuarterIndex::iso_date() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-01", year, 3 * (quarter - 1) + 1);
    return buf;
}

QuarterIndex parse_quarter_date(const std::string& text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw Error(ErrorKind::ParseError, "expected YYYY-MM-DD, got '" + text + "'");
    }
    int year = parse_int(text.substr(0, 4), 4);
    int month = parse_int(text.substr(5, 2), 2);
    int day = parse_int(text.substr(8, 2), 2);
    if (year < 0 || month < 1 || month > 12 || day < 1 || day > 31) {
        throw Error(ErrorKind::ParseError, "invalid date '" + text + "'");
    }
    if (day != 1 || (month - 1) % 3 != 0) {
        throw Error(ErrorKind::ParseError, "date '" + text + "' is not the first day of a quarter");
    }
    return QuarterIndex{year, (month - 1) / 3 + 1};
}

RawSeries load_series_csv(const std::filesystem::path& path, const std::string& date_column,
                          const std::string& value_column) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::FileNotFound, path.string());

    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, row_error(1, "missing header"));
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    auto header = split_row(line);

    auto find_col = [&](const std::string& name) -> std::ptrdiff_t {
        auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : it - header.begin();
    };
    std::ptrdiff_t date_idx = find_col(date_column);
    if (date_idx < 0) {
        throw Error(ErrorKind::ParseError, row_error(1, "no column '" + date_column + "'"));
    }
    std::ptrdiff_t value_idx = -1;
    std::string value_name = value_column;
    if (value_column.empty()) {
        if (header.size() != 2) {
            throw Error(ErrorKind::ParseError,
                        row_error(1, "value column must be named when the file has "
                                     + std::to_string(header.size()) + " columns"));
        }
        value_idx = date_idx == 0 ? 1 : 0;
        value_name = header[static_cast<std::size_t>(value_idx)];
    } else {
        value_idx = find_col(value_column);
        if (value_idx < 0) {
            throw Error(ErrorKind::ParseError, row_error(1, "no column '" + value_column + "'"));
        }
    }

    RawSeries series;
    series.name = value_name;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        auto cells = split_row(line);
        auto need = static_cast<std::size_t>(std::max(date_idx, value_idx));
        if (cells.size() <= need) throw Error(ErrorKind::ParseError, row_error(row, "too few columns"));

        QuarterIndex q;
        try {
            q = parse_quarter_date(cells[static_cast<std::size_t>(date_idx)]);
        } catch (const Error& e) {
            throw Error(ErrorKind::ParseError, row_error(row, e.what()));
        }

        const std::string& cell = cells[static_cast<std::size_t>(value_idx)];
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
        if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
            throw Error(ErrorKind::ParseError, row_error(row, "unparseable value '" + cell + "'"));
        }
        if (!std::isfinite(value)) throw Error(ErrorKind::NonFiniteValue, row_error(row, cell));
        series.points.push_back({q, value});
    }

    std::stable_sort(series.points.begin(), series.points.end(),
                     [](const SeriesPoint& a, const SeriesPoint& b) { return a.index < b.index; });
    for (std::size_t i = 1; i < series.points.size(); ++i) {
        if (series.points[i].index == series.points[i - 1].index) {
            throw Error(ErrorKind::DuplicateQuarter, series.points[i].index.label());
        }
    }
    return series;
}

SeriesPair align_pair(const RawSeries& a, const RawSeries& b) {
    if (a.points.empty() || b.points.empty()) {
        throw Error(ErrorKind::InvalidArgument, "align_pair requires nonempty series");
    }
    SeriesPair pair;
    auto ia = a.points.begin();
    auto ib = b.points.begin();
    while (ia != a.points.end() && ib != b.points.end()) {
        if (ia->index < ib->index) {
            ++ia;
        } else if (ib->index < ia->index) {
            ++ib;
        } else {
            pair.index.push_back(ia->index);
            pair.x.push_back(ia->value);
            pair.y.push_back(ib->value);
            ++ia;
            ++ib;
        }
    }
    if (pair.index.empty()) throw Error(ErrorKind::EmptyIntersection, a.name + " / " + b.name);
    return pair;
}

SeriesPair scale_pair(const SeriesPair& pair, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw Error(ErrorKind::NonPositiveFactor, std::to_string(factor));
    }
    SeriesPair out = pair;
    for (auto& v : out.x) v *= factor;
    for (auto& v : out.y) v *= factor;
    out.scale_applied = pair.scale_applied * factor;
    return out;
}

namespace {
RawSeries column_series(const SeriesPair& pair, const std::vector<double>& values,
                        const std::string& name) {
    RawSeries s;
    s.name = name;
    s.points.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) s.points.push_back({pair.index[i], values[i]});
    return s;
}
}  // namespace

RawSeries x_series(const SeriesPair& pair, const std::string& name) {
    return column_series(pair, pair.x, name);
}

RawSeries y_series(const SeriesPair& pair, const std::string& name) {
    return column_series(pair, pair.y, name);
}

void write_series_csv(const std::filesystem::path& path, const RawSeries& series,
                      const std::string& date_column) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::FileNotFound, "cannot write " + path.string());
    out << date_column << ',' << series.name << '\n';
    char buf[32];
    for (const auto& p : series.points) {
        std::snprintf(buf, sizeof buf, "%.17g", p.value);
        out << p.index.iso_date() << ',' << buf << '\n';
    }
}

}  // namespace swapfit
