#include "complseg/metrics.hpp"

#include "complseg/errors.hpp"

namespace complseg {

SegmentationMap argmax_decode(const PredictionMap& probs, double tau, bool has_background_channel,
                              int background_id) {
    if (probs.ch < 1 || probs.h < 1 || probs.w < 1)
        throw ShapeMismatchError("empty probability stack");
    SegmentationMap map(probs.h, probs.w);
    const int plane = probs.plane_size();
    for (int i = 0; i < plane; ++i) {
        int best = 0;
        float best_p = probs.data[static_cast<size_t>(i)];
        for (int c = 1; c < probs.ch; ++c) {
            const float p = probs.data[static_cast<size_t>(c) * plane + i];
            if (p > best_p) { best_p = p; best = c; }
        }
        if (has_background_channel) {
            map.ids[static_cast<size_t>(i)] = best;
        } else {
            map.ids[static_cast<size_t>(i)] =
                best_p >= static_cast<float>(tau) ? best : background_id;
        }
    }
    return map;
}

SegmentationMap ensemble_merge(const PredictionMap& member_probs, double tau, int background_id) {
    return argmax_decode(member_probs, tau, /*has_background_channel=*/false, background_id);
}

namespace {

double dice_from_counts(long long inter, long long p, long long g) {
    if (p + g == 0) return 1.0; // absent and not predicted: scored as correct
    return 2.0 * static_cast<double>(inter) / static_cast<double>(p + g);
}

} // namespace

double dice_image(const SegmentationMap& pred, const Mask& gt, int32_t class_id) {
    if (pred.h != gt.h || pred.w != gt.w)
        throw ShapeMismatchError("prediction and ground truth sizes differ");
    long long inter = 0, p = 0, g = 0;
    for (size_t i = 0; i < pred.ids.size(); ++i) {
        const bool in_p = pred.ids[i] == class_id;
        const bool in_g = gt.data[i] != 0;
        inter += in_p && in_g;
        p += in_p;
        g += in_g;
    }
    return dice_from_counts(inter, p, g);
}

double dice_image(const SegmentationMap& pred, const SegmentationMap& gt, int32_t class_id) {
    if (pred.h != gt.h || pred.w != gt.w)
        throw ShapeMismatchError("prediction and ground truth sizes differ");
    long long inter = 0, p = 0, g = 0;
    for (size_t i = 0; i < pred.ids.size(); ++i) {
        const bool in_p = pred.ids[i] == class_id;
        const bool in_g = gt.ids[i] == class_id;
        inter += in_p && in_g;
        p += in_p;
        g += in_g;
    }
    return dice_from_counts(inter, p, g);
}

double dice_class_average(const std::vector<double>& per_image) {
    if (per_image.empty()) throw EmptyInputError("no per-image dice scores");
    double sum = 0.0;
    for (double d : per_image) sum += d;
    return sum / static_cast<double>(per_image.size());
}

double mean_dice(const std::vector<double>& per_class_averages) {
    if (per_class_averages.empty()) throw EmptyInputError("no per-class averages");
    double sum = 0.0;
    for (double d : per_class_averages) sum += d;
    return sum / static_cast<double>(per_class_averages.size());
}

long long ConfusionMatrix::row_sum(int gt) const {
    long long s = 0;
    for (int j = 0; j < n; ++j) s += at(gt, j);
    return s;
}

long long ConfusionMatrix::total() const {
    long long s = 0;
    for (long long v : counts) s += v;
    return s;
}

double ConfusionMatrix::accuracy() const {
    long long diag = 0;
    for (int i = 0; i < n; ++i) diag += at(i, i);
    long long t = total();
    return t == 0 ? 0.0 : static_cast<double>(diag) / static_cast<double>(t);
}

std::vector<std::vector<double>> ConfusionMatrix::row_normalized() const {
    std::vector<std::vector<double>> out(static_cast<size_t>(n),
                                         std::vector<double>(static_cast<size_t>(n), 0.0));
    for (int i = 0; i < n; ++i) {
        const long long rs = row_sum(i);
        if (rs == 0) continue;
        for (int j = 0; j < n; ++j)
            out[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                static_cast<double>(at(i, j)) / static_cast<double>(rs);
    }
    return out;
}

namespace {

// maps a catalog-or-background id onto a confusion row, background last
inline int confusion_index(int32_t id, int n_classes, int background_id) {
    if (id == background_id) return n_classes;
    return static_cast<int>(id);
}

} // namespace

void accumulate_confusion(ConfusionMatrix& cm, const SegmentationMap& pred,
                          const SegmentationMap& gt, int n_classes, int background_id) {
    if (pred.h != gt.h || pred.w != gt.w)
        throw ShapeMismatchError("prediction and ground truth sizes differ");
    if (cm.n == 0) cm = ConfusionMatrix(n_classes + 1);
    if (cm.n != n_classes + 1) throw ShapeMismatchError("confusion matrix size mismatch");
    for (size_t i = 0; i < gt.ids.size(); ++i) {
        if (gt.ids[i] == kUnlabeled) continue;
        const int r = confusion_index(gt.ids[i], n_classes, background_id);
        const int c = confusion_index(pred.ids[i], n_classes, background_id);
        cm.at(r, c)++;
    }
}

SegmentationMap gt_map_from_masks(const std::vector<const Mask*>& masks, int background_id) {
    int h = -1, w = -1;
    for (const Mask* m : masks)
        if (m) { h = m->h; w = m->w; break; }
    if (h < 0) throw EmptyInputError("no masks provided");
    SegmentationMap map(h, w, background_id);
    for (size_t c = 0; c < masks.size(); ++c) {
        if (!masks[c]) continue;
        if (masks[c]->h != h || masks[c]->w != w)
            throw ShapeMismatchError("ground-truth masks disagree in size");
        for (size_t i = 0; i < masks[c]->data.size(); ++i)
            if (masks[c]->data[i]) map.ids[i] = static_cast<int32_t>(c);
    }
    return map;
}

} // namespace complseg
