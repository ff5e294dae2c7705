#pragma once

#include <cstdint>
#include <vector>

#include "complseg/catalog.hpp"
#include "complseg/frame.hpp"

namespace complseg {

// Three-state supervision target. Ignored pixels contribute nothing to the
// loss, in value or gradient.
enum class PixelState : uint8_t { Ignore = 0, Neg = 1, Pos = 2 };

// Per-pixel, per-class training target derived from the two implication
// rules: a positive annotation of one class implies a negative annotation of
// all other classes; a negative annotation of a class carries no information
// about the others, so their state stays unknown.
struct SupervisionVolume {
    int n_classes = 0;
    int h = 0;
    int w = 0;
    std::vector<uint8_t> states;    // n_classes * h * w, CHW order
    std::vector<uint8_t> annotated; // per-class flags: frame is annotated for c

    SupervisionVolume() = default;
    SupervisionVolume(int n_classes, int h, int w)
        : n_classes(n_classes), h(h), w(w),
          states(static_cast<size_t>(n_classes) * h * w, static_cast<uint8_t>(PixelState::Ignore)),
          annotated(static_cast<size_t>(n_classes), 0) {}

    PixelState at(int c, int y, int x) const {
        return static_cast<PixelState>(states[(static_cast<size_t>(c) * h + y) * w + x]);
    }
    void set(int c, int y, int x, PixelState s) {
        states[(static_cast<size_t>(c) * h + y) * w + x] = static_cast<uint8_t>(s);
    }
    const uint8_t* plane(int c) const { return states.data() + static_cast<size_t>(c) * h * w; }
    uint8_t* plane(int c) { return states.data() + static_cast<size_t>(c) * h * w; }
    int plane_size() const { return h * w; }

    long long count(PixelState s) const {
        long long n = 0;
        for (uint8_t v : states) n += (v == static_cast<uint8_t>(s));
        return n;
    }
};

// Checks mask shapes against the image and pairwise disjointness of positive
// regions. Throws ShapeMismatchError or OverlappingPositivesError.
void validate_frame(const AnnotationFrame& frame, const ClassCatalog& catalog);

// Applies the implication rules to a validated frame. Channel c is POS where
// the frame annotates c positively, NEG where the frame annotates c negatively
// or some other class is positive, IGNORE otherwise.
SupervisionVolume derive_supervision(const AnnotationFrame& frame, const ClassCatalog& catalog);

// Same derivation from bare masks; `annotated[c]` flags which channels the
// frame annotates. Masks must exist exactly for the flagged channels.
SupervisionVolume derive_supervision_from_masks(const std::vector<const Mask*>& masks,
                                                const std::vector<uint8_t>& annotated,
                                                int h, int w);

// Masking-only ablation: drops the implied negatives, turning every state on
// unannotated channels back to IGNORE.
SupervisionVolume masking_only(const SupervisionVolume& volume);

} // namespace complseg
