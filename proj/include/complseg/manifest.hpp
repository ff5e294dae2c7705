#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "complseg/catalog.hpp"
#include "complseg/frame.hpp"

namespace complseg {

inline const std::vector<std::string> kSplits = {"train", "val", "test"};

struct FrameEntry {
    std::string id;
    std::string split; // train | val | test
    std::string image_path; // relative to manifest root
    std::map<std::string, std::string> mask_paths; // class name -> relative path
};

struct Subset {
    std::string name;
    std::vector<std::string> annotated_classes;
    std::vector<FrameEntry> frames;
};

// Declaration of subsets, their annotated classes, splits and file locations.
// Paths are relative to `root`, the directory holding the manifest file.
struct DatasetManifest {
    std::string name;
    ClassCatalog catalog{std::vector<std::string>{"_"}};
    std::vector<Subset> subsets;
    std::filesystem::path root;

    const Subset* find_subset(const std::string& name) const;
    std::filesystem::path resolve(const std::string& rel) const { return root / rel; }
};

// Parses and validates a manifest file; verifies every referenced raster file
// exists. Throws SchemaError or MissingFileError.
DatasetManifest load_manifest(const std::filesystem::path& path);

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

enum class BinarySplitMode {
    Duplicate, // every frame appears in every class subset with that class's mask
    Partition, // frames are dealt round-robin, each to a single class subset
};

// Splits a manifest with one fully-labeled subset into one binary subset per
// catalog class. Frames keep their image references and split assignments;
// only the mask references are narrowed. Duplicate mode mirrors a multi-class
// set re-published as per-class sets; Partition mode emulates genuinely
// separate complementary datasets with disjoint frames.
DatasetManifest split_full_to_binary(const DatasetManifest& manifest,
                                     BinarySplitMode mode = BinarySplitMode::Duplicate);

// Loads one frame: image, masks for the subset's annotated classes, flags.
AnnotationFrame load_frame(const DatasetManifest& manifest, const Subset& subset,
                           const FrameEntry& entry);

// Reference to one frame entry within one subset.
struct FrameView {
    const Subset* subset = nullptr;
    const FrameEntry* entry = nullptr;
};

std::vector<FrameView> list_views(const DatasetManifest& manifest, const std::string& split);

} // namespace complseg
