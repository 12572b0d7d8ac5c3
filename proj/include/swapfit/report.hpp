#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "swapfit/beta_gof.hpp"
#include "swapfit/causality.hpp"
#include "swapfit/densities.hpp"
#include "swapfit/model.hpp"
#include "swapfit/series.hpp"
#include "swapfit/swap.hpp"
#include "swapfit/timeline.hpp"

namespace swapfit {

using Json = nlohmann::json;

const char* artifact_version();

Json to_json(const ModelSpec& m);
ModelSpec model_from_json(const Json& j);

Json to_json(const SwapConfig& cfg);
Json to_json(const KsResult& ks);
Json to_json(const RateEstimate& r);
Json to_json(const GofReport& r);
Json to_json(const GrangerResult& g);
Json to_json(const AdfResult& a);
Json to_json(const CausalityReport& r);
Json to_json(const std::vector<Segment>& segments);

// A fitted model as written by `swapfit fit`. SWAP fits also carry the
// per-quarter assignment and posterior of Z = 1.
struct FitArtifact {
    std::string name;
    ModelSpec model;
    std::vector<QuarterIndex> index;
    Assignment z;
    std::vector<double> p1;

    bool has_assignment() const { return !z.empty(); }
};

Json fit_json(const std::string& name, const SeriesPair& pair, const SwapFit& fit);
Json fit_json(const std::string& name, const ModelSpec& plain);
FitArtifact fit_from_json(const Json& j);

// Throws MissingFit when the file is absent, ParseError when malformed.
FitArtifact read_fit(const std::filesystem::path& path);

// Lower-case hex SHA-256 of the file's bytes. Throws FileNotFound.
std::string sha256_file(const std::filesystem::path& path);

struct InputDigest {
    std::string path;
    std::string sha256;
};

struct RunManifest {
    std::string command;
    Json config;
    std::vector<InputDigest> inputs;
    std::uint64_t seed = 0;
    std::string version;
    std::string started_utc;
    std::string finished_utc;
};

Json to_json(const RunManifest& m);
RunManifest manifest_from_json(const Json& j);

// True when every recorded input still hashes to its recorded digest.
bool inputs_match(const RunManifest& m);

std::string utc_timestamp();

// Dumps with two-space indent and a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

// 800x600 scatter; z = 1 points blue, z = 0 orange, optional curve of g.
std::string scatter_svg(const SeriesPair& pair, const Assignment& z, const ModelSpec* curve,
                        const std::string& title);

// CSV of quarter, x, y, z, p1.
std::string scatter_csv(const SeriesPair& pair, const FitArtifact& fit);

// CSV with one row per histogram bin: bin_left, bin_right, count.
std::string histogram_csv(const GofReport& r);

}  // namespace swapfit
