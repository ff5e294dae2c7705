#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "complseg/manifest.hpp"

namespace complseg {

struct Batch {
    std::vector<FrameView> views;
};

// Deterministic epoch plan: every frame view of the split appears exactly
// once; order is a pure function of (seed, epoch). Mixed mode shuffles across
// subsets; otherwise frames are shuffled within their subset and batches never
// span subsets.
std::vector<Batch> epoch_batches(const DatasetManifest& manifest, const std::string& split,
                                 int batch_size, uint64_t seed, int epoch = 0, bool mixed = true);

std::vector<Batch> epoch_batches(std::vector<FrameView> views, int batch_size, uint64_t seed,
                                 int epoch = 0, bool mixed = true);

} // namespace complseg
