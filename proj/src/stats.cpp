#include "complseg/stats.hpp"

#include "complseg/errors.hpp"
#include "complseg/raster.hpp"

namespace complseg {

PixelStats& PixelStats::operator+=(const PixelStats& o) {
    if (per_class.empty()) per_class.resize(o.per_class.size());
    if (per_class.size() != o.per_class.size())
        throw ShapeMismatchError("stats class counts differ");
    for (size_t c = 0; c < per_class.size(); ++c) {
        per_class[c].positives += o.per_class[c].positives;
        per_class[c].neg_annotated += o.per_class[c].neg_annotated;
        per_class[c].neg_implied += o.per_class[c].neg_implied;
        per_class[c].ignored += o.per_class[c].ignored;
    }
    frames += o.frames;
    return *this;
}

bool PixelStats::fully_labeled() const {
    for (const auto& c : per_class)
        if (c.ignored != 0) return false;
    return true;
}

void accumulate_stats(PixelStats& stats, const SupervisionVolume& volume) {
    if (stats.per_class.empty())
        stats.per_class.resize(static_cast<size_t>(volume.n_classes));
    if (stats.per_class.size() != static_cast<size_t>(volume.n_classes))
        throw ShapeMismatchError("stats class counts differ");
    for (int c = 0; c < volume.n_classes; ++c) {
        auto& cs = stats.per_class[static_cast<size_t>(c)];
        const uint8_t* plane = volume.plane(c);
        const bool is_annotated = volume.annotated[static_cast<size_t>(c)];
        for (int i = 0; i < volume.plane_size(); ++i) {
            switch (static_cast<PixelState>(plane[i])) {
                case PixelState::Pos: cs.positives++; break;
                case PixelState::Neg:
                    if (is_annotated) cs.neg_annotated++; else cs.neg_implied++;
                    break;
                case PixelState::Ignore: cs.ignored++; break;
            }
        }
    }
    stats.frames++;
}

PixelStats compute_pixel_stats(const DatasetManifest& manifest, const std::string& split) {
    PixelStats stats;
    stats.per_class.resize(static_cast<size_t>(manifest.catalog.n_classes()));

    long long counted = 0;
    for (const auto& subset : manifest.subsets) {
        std::vector<uint8_t> annotated(static_cast<size_t>(manifest.catalog.n_classes()), 0);
        for (const auto& cls : subset.annotated_classes)
            annotated[static_cast<size_t>(*manifest.catalog.index_of(cls))] = 1;

        for (const auto& frame : subset.frames) {
            if (frame.split != split) continue;
            // stats only need masks; images stay untouched
            std::vector<Mask> storage;
            storage.reserve(subset.annotated_classes.size());
            std::vector<const Mask*> masks(static_cast<size_t>(manifest.catalog.n_classes()), nullptr);
            int h = -1, w = -1;
            for (const auto& cls : subset.annotated_classes) {
                storage.push_back(read_mask(manifest.resolve(frame.mask_paths.at(cls))));
                const Mask& m = storage.back();
                if (h < 0) { h = m.h; w = m.w; }
                else if (m.h != h || m.w != w)
                    throw ShapeMismatchError("masks of frame '" + frame.id + "' disagree in size");
            }
            for (size_t i = 0; i < subset.annotated_classes.size(); ++i) {
                int idx = *manifest.catalog.index_of(subset.annotated_classes[i]);
                masks[static_cast<size_t>(idx)] = &storage[i];
            }
            accumulate_stats(stats, derive_supervision_from_masks(masks, annotated, h, w));
            ++counted;
        }
    }
    if (counted == 0) throw EmptySplitError(split);
    return stats;
}

} // namespace complseg
