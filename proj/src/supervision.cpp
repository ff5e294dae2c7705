#include "complseg/supervision.hpp"

#include "complseg/errors.hpp"

namespace complseg {

namespace {

// Resolves the frame's masks into catalog channel order.
struct ResolvedFrame {
    std::vector<const Mask*> masks; // per channel, nullptr when unannotated
    std::vector<uint8_t> annotated;
};

ResolvedFrame resolve(const AnnotationFrame& frame, const ClassCatalog& catalog) {
    ResolvedFrame r;
    r.masks.assign(static_cast<size_t>(catalog.n_classes()), nullptr);
    r.annotated.assign(static_cast<size_t>(catalog.n_classes()), 0);
    for (const auto& name : frame.annotated_classes) {
        auto idx = catalog.index_of(name);
        if (!idx) throw SchemaError("frame annotates unknown class '" + name + "'");
        auto it = frame.masks.find(name);
        if (it == frame.masks.end())
            throw SchemaError("frame annotates class '" + name + "' but provides no mask");
        r.masks[static_cast<size_t>(*idx)] = &it->second;
        r.annotated[static_cast<size_t>(*idx)] = 1;
    }
    for (const auto& [name, mask] : frame.masks) {
        (void)mask;
        auto idx = catalog.index_of(name);
        if (!idx || !r.annotated[static_cast<size_t>(*idx)])
            throw SchemaError("frame has mask for class '" + name + "' outside its annotated set");
    }
    return r;
}

void check_disjoint(const std::vector<const Mask*>& masks,
                    const std::vector<std::string>& names, int h, int w) {
    const int n = static_cast<int>(masks.size());
    for (int a = 0; a < n; ++a) {
        if (!masks[a]) continue;
        for (int b = a + 1; b < n; ++b) {
            if (!masks[b]) continue;
            const uint8_t* pa = masks[a]->data.data();
            const uint8_t* pb = masks[b]->data.data();
            for (int i = 0; i < h * w; ++i) {
                if (pa[i] && pb[i])
                    throw OverlappingPositivesError(names[static_cast<size_t>(a)],
                                                    names[static_cast<size_t>(b)], i / w, i % w);
            }
        }
    }
}

} // namespace

void validate_frame(const AnnotationFrame& frame, const ClassCatalog& catalog) {
    ResolvedFrame r = resolve(frame, catalog);
    const int h = frame.image.h;
    const int w = frame.image.w;
    for (int c = 0; c < catalog.n_classes(); ++c) {
        const Mask* m = r.masks[static_cast<size_t>(c)];
        if (m && (m->h != h || m->w != w))
            throw ShapeMismatchError("mask '" + catalog.name(c) + "' is " + std::to_string(m->h) +
                                     "x" + std::to_string(m->w) + ", image is " +
                                     std::to_string(h) + "x" + std::to_string(w));
    }
    check_disjoint(r.masks, catalog.classes(), h, w);
}

SupervisionVolume derive_supervision_from_masks(const std::vector<const Mask*>& masks,
                                                const std::vector<uint8_t>& annotated,
                                                int h, int w) {
    const int n = static_cast<int>(masks.size());
    SupervisionVolume vol(n, h, w);
    vol.annotated = annotated;

    // union of positives over all annotated channels; with disjoint masks this
    // also identifies which single class owns each pixel
    std::vector<uint8_t> any_pos(static_cast<size_t>(h) * w, 0);
    for (int c = 0; c < n; ++c) {
        if (!masks[static_cast<size_t>(c)]) continue;
        const uint8_t* m = masks[static_cast<size_t>(c)]->data.data();
        for (int i = 0; i < h * w; ++i) any_pos[static_cast<size_t>(i)] |= m[i];
    }

    for (int c = 0; c < n; ++c) {
        uint8_t* out = vol.plane(c);
        if (annotated[static_cast<size_t>(c)]) {
            const uint8_t* m = masks[static_cast<size_t>(c)]->data.data();
            for (int i = 0; i < h * w; ++i)
                out[i] = static_cast<uint8_t>(m[i] ? PixelState::Pos : PixelState::Neg);
        } else {
            // rule 1 gives negatives where any other class is positive; rule 2
            // leaves the rest unknown
            for (int i = 0; i < h * w; ++i)
                out[i] = static_cast<uint8_t>(any_pos[static_cast<size_t>(i)] ? PixelState::Neg
                                                                              : PixelState::Ignore);
        }
    }
    return vol;
}

SupervisionVolume derive_supervision(const AnnotationFrame& frame, const ClassCatalog& catalog) {
    validate_frame(frame, catalog);
    ResolvedFrame r = resolve(frame, catalog);
    return derive_supervision_from_masks(r.masks, r.annotated, frame.image.h, frame.image.w);
}

SupervisionVolume masking_only(const SupervisionVolume& volume) {
    SupervisionVolume out = volume;
    for (int c = 0; c < out.n_classes; ++c) {
        if (out.annotated[static_cast<size_t>(c)]) continue;
        uint8_t* p = out.plane(c);
        std::fill(p, p + out.plane_size(), static_cast<uint8_t>(PixelState::Ignore));
    }
    return out;
}

} // namespace complseg
