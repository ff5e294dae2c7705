#pragma once

#include <string>
#include <vector>

#include "complseg/manifest.hpp"
#include "complseg/supervision.hpp"

namespace complseg {

struct ClassPixelStats {
    long long positives = 0;     // POS pixels on the class's channel
    long long neg_annotated = 0; // NEG on frames annotated for the class
    long long neg_implied = 0;   // NEG via rule 1 on frames not annotated for it
    long long ignored = 0;

    long long total() const { return positives + neg_annotated + neg_implied + ignored; }
};

// Exact per-channel counts over one split, after supervision derivation.
struct PixelStats {
    std::vector<ClassPixelStats> per_class;
    long long frames = 0; // frame views counted

    ClassPixelStats& operator[](size_t i) { return per_class[i]; }
    const ClassPixelStats& operator[](size_t i) const { return per_class[i]; }

    PixelStats& operator+=(const PixelStats& o);

    bool fully_labeled() const;
};

PixelStats compute_pixel_stats(const DatasetManifest& manifest, const std::string& split);

// Accumulates one derived volume into stats (channel count must match).
void accumulate_stats(PixelStats& stats, const SupervisionVolume& volume);

} // namespace complseg
