#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "complseg/manifest.hpp"

namespace complseg {

// Configuration for the synthetic desk-scale dataset: textured blobs on a
// noisy background, one fully-labeled subset. Classes in a confusable pair
// share their base texture and differ only by a low-contrast color cue.
struct SynthConfig {
    std::string name = "synth";
    int n_train = 200;
    int n_val = 50;
    int n_test = 50;
    int height = 64;
    int width = 64;
    std::vector<std::string> classes = {"A", "B", "C", "D"};
    std::vector<std::pair<std::string, std::string>> confusable_pairs;
    uint64_t seed = 0;
};

using Rgb = std::array<int, 3>;

// Base color per class; members of a confusable pair get near-identical
// anchors, everything else comes from a well-separated palette.
std::vector<Rgb> class_anchors(const SynthConfig& config);

// Generates the dataset under `out_dir` (rasters plus frame layout) and
// returns the fully-labeled manifest rooted there. Deterministic: the same
// config produces byte-identical files.
DatasetManifest synth_generate(const SynthConfig& config,
                               const std::filesystem::path& out_dir);

} // namespace complseg
