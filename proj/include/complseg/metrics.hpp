#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "complseg/catalog.hpp"
#include "complseg/raster.hpp"
#include "complseg/tensor.hpp"

namespace complseg {

// Per-pixel class ids, including the background id. A negative id marks an
// unlabeled pixel in partially annotated ground truth.
struct SegmentationMap {
    int h = 0;
    int w = 0;
    std::vector<int32_t> ids;

    SegmentationMap() = default;
    SegmentationMap(int h, int w, int32_t fill = 0)
        : h(h), w(w), ids(static_cast<size_t>(h) * w, fill) {}

    int32_t& at(int y, int x) { return ids[static_cast<size_t>(y) * w + x]; }
    int32_t at(int y, int x) const { return ids[static_cast<size_t>(y) * w + x]; }
};

inline constexpr int32_t kUnlabeled = -1;

// Per-pixel argmax decode. Without a background channel, a pixel whose best
// probability stays below tau becomes background; ties pick the lowest class
// index. With a background channel the argmax runs over all channels and tau
// is unused.
SegmentationMap argmax_decode(const PredictionMap& probs, double tau, bool has_background_channel,
                              int background_id);

// Merging an ensemble's sigmoid stack is the same decode without a background
// channel.
SegmentationMap ensemble_merge(const PredictionMap& member_probs, double tau, int background_id);

// Dice overlap between the predicted region of `class_id` and the mask. Both
// empty counts as a perfect score.
double dice_image(const SegmentationMap& pred, const Mask& gt, int32_t class_id);

// Dice against a labeled map (used for the decoded background region).
double dice_image(const SegmentationMap& pred, const SegmentationMap& gt, int32_t class_id);

double dice_class_average(const std::vector<double>& per_image);
double mean_dice(const std::vector<double>& per_class_averages);

// Pixelwise confusion over labeled pixels; entry (i, j) counts ground-truth
// class i predicted as class j. Labels are catalog ids with the background
// mapped to the last row/column.
struct ConfusionMatrix {
    int n = 0; // classes + background
    std::vector<long long> counts; // n*n, row-major

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(int n) : n(n), counts(static_cast<size_t>(n) * n, 0) {}

    long long& at(int gt, int pred) { return counts[static_cast<size_t>(gt) * n + pred]; }
    long long at(int gt, int pred) const { return counts[static_cast<size_t>(gt) * n + pred]; }

    long long row_sum(int gt) const;
    long long total() const;
    double accuracy() const;
    std::vector<std::vector<double>> row_normalized() const;
};

// Accumulates one frame; gt ids may contain kUnlabeled pixels, which are
// skipped. Both maps use catalog ids plus `background_id`.
void accumulate_confusion(ConfusionMatrix& cm, const SegmentationMap& pred,
                          const SegmentationMap& gt, int n_classes, int background_id);

// Builds the ground-truth map of a fully labeled frame: disjoint class masks,
// background elsewhere.
SegmentationMap gt_map_from_masks(const std::vector<const Mask*>& masks, int background_id);

} // namespace complseg
