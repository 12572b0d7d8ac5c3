#pragma once

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "swapfit/error.hpp"
#include "swapfit/series.hpp"

namespace testing {

#ifndef SWAPFIT_SOURCE_DIR
#define SWAPFIT_SOURCE_DIR "."
#endif

inline std::filesystem::path source_dir() { return SWAPFIT_SOURCE_DIR; }

inline swapfit::SeriesPair make_pair(std::vector<double> x, std::vector<double> y) {
    swapfit::SeriesPair p;
    p.index.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        p.index.push_back(swapfit::QuarterIndex::from_ordinal(swapfit::QuarterIndex{1990, 1}.ordinal() + int(i)));
    }
    p.x = std::move(x);
    p.y = std::move(y);
    return p;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() / ("swapfit_" + tag + "_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name, const std::string& body) const {
        auto p = path_ / name;
        std::ofstream(p, std::ios::binary) << body;
        return p;
    }

private:
    std::filesystem::path path_;
};

template <class F>
swapfit::ErrorKind error_kind_of(F&& f) {
    try {
        f();
    } catch (const swapfit::Error& e) {
        return e.kind();
    }
    FAIL("expected a swapfit::Error");
    return swapfit::ErrorKind::InvalidArgument;
}

}  // namespace testing

#define CHECK_ERROR_KIND(expr, kind) CHECK(::testing::error_kind_of([&] { (void)(expr); }) == (kind))
