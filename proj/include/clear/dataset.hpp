#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clear/templates.hpp"

namespace clear {

struct DatasetConfig {
    std::int64_t n_scenes = 1000;
    int questions_per_scene = 20;
    std::uint64_t master_seed = 0;
    std::array<double, 3> split_fractions = {0.70, 0.15, 0.15};
    bool render_audio = true;
    bool render_spectrograms = true;
    std::filesystem::path output_dir = "clear_dataset";
    /// Synthesis when unset; otherwise a bank manifest (paths relative to it).
    std::optional<std::filesystem::path> bank_manifest;
    double cap_fraction = 0.5;
    int workers = 1;
};

/// Throws InvalidArgument: fractions must sum to 1, n_scenes >= 10,
/// questions_per_scene >= 1, workers >= 1, cap_fraction in (0, 1].
void validate(const DatasetConfig& config);

nlohmann::json to_json(const DatasetConfig& config);
/// Overlays the keys present in `j` onto `base`.
DatasetConfig config_from_json(const nlohmann::json& j, DatasetConfig base = {});

inline constexpr std::array<const char*, 3> kSplitNames = {"train", "val", "test"};

struct SplitAssignment {
    std::array<std::vector<std::int64_t>, 3> ids;  // train, val, test; each sorted
};

/// Shuffles scene ids with a seed derived from master_seed; train and val get
/// floor(fraction * n) scenes, test gets the remainder.
SplitAssignment split_scenes(std::int64_t n_scenes, const std::array<double, 3>& fractions, std::uint64_t master_seed);

struct DatasetManifest {
    nlohmann::json config;
    SplitAssignment splits;
    std::array<std::int64_t, 3> scene_counts{};
    std::array<std::int64_t, 3> question_counts{};
    std::array<std::map<std::string, std::int64_t>, 3> answer_frequency;
    std::string tool_version;
    /// Relative path -> SHA-256 hex of each emitted file (manifest excluded).
    std::map<std::string, std::string> digests;
    /// SHA-256 over the sorted (path, digest) list.
    std::string content_digest;
    std::vector<std::string> warnings;
};

nlohmann::json to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j);

/// Produces output_dir/{manifest.json, scenes.json, questions_{train,val,test}.jsonl,
/// audio/scene_NNNNNN.wav, spectrograms/scene_NNNNNN.png}. Output bytes are
/// identical for any worker count. Throws IoError if output_dir is unwritable.
DatasetManifest generate_dataset(const DatasetConfig& config);

struct RenderConfig {
    bool audio = true;
    bool spectrograms = true;
    int workers = 1;
    /// Defaults to the bank recorded in the dataset's manifest, if any.
    std::optional<std::filesystem::path> bank_manifest;
};

/// Renders audio and/or spectrograms for every scene in scenes.json of an
/// existing dataset and refreshes the manifest's file digests.
DatasetManifest render_dataset(const std::filesystem::path& dir, const RenderConfig& config);

struct Violation {
    std::string kind;
    std::optional<std::int64_t> question_id;
    std::optional<std::int64_t> scene_id;
    std::string message;
};

struct VerificationReport {
    std::int64_t questions_checked = 0;
    std::int64_t scenes_checked = 0;
    std::vector<Violation> violations;

    std::int64_t count(std::string_view kind) const;
    bool ok() const { return violations.empty(); }
};

nlohmann::json to_json(const VerificationReport& report);

/// Re-answers every stored question with the brute-force oracle, re-checks
/// degeneracy, vocabulary/type closure and split disjointness. Reports at
/// most one violation per question. Throws IoError when files are missing.
VerificationReport verify_dataset(const std::filesystem::path& dir, int workers = 1);

/// "scene_000042"-style stem.
std::string scene_file_stem(std::int64_t scene_id);

}  // namespace clear
