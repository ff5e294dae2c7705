#include "complseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "complseg/errors.hpp"
#include "complseg/raster.hpp"

namespace complseg {

namespace {

constexpr Rgb kDistinctPalette[] = {
    {190, 70, 60},  {60, 100, 190}, {70, 170, 90},  {210, 180, 70},
    {150, 70, 170}, {90, 190, 190}, {220, 130, 60}, {200, 90, 150},
    {110, 150, 60}, {60, 60, 120},  {180, 180, 160}, {120, 200, 120},
};
constexpr Rgb kSharedAnchors[] = {
    {170, 125, 95}, {120, 140, 150}, {160, 160, 110}, {140, 110, 130},
};
constexpr int kCueDelta = 10; // low-contrast cue separating a confusable pair

uint64_t mix64(uint64_t a, uint64_t b) {
    uint64_t x = a + 0x9e3779b97f4a7c15ull + (b << 6) + (b >> 2);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

uint8_t clamp_u8(int v) { return static_cast<uint8_t>(std::clamp(v, 0, 255)); }

struct Blob {
    double cx, cy;     // center
    double a, b;       // semi-axes
    double cos_t, sin_t;
    int class_index;
    int brightness;    // per-blob jitter

    // squared normalized radius; inside iff <= 1
    double r2(double x, double y) const {
        double dx = x - cx, dy = y - cy;
        double u = dx * cos_t + dy * sin_t;
        double v = -dx * sin_t + dy * cos_t;
        return (u * u) / (a * a) + (v * v) / (b * b);
    }
};

void validate(const SynthConfig& cfg) {
    if (cfg.height < 32 || cfg.width < 32)
        throw ConfigError("frame size must be at least 32x32");
    if (cfg.n_train < 1 || cfg.n_val < 1 || cfg.n_test < 1)
        throw ConfigError("every split needs at least one frame");
    if (cfg.classes.empty()) throw ConfigError("at least one class required");
    for (const auto& [a, b] : cfg.confusable_pairs) {
        bool ok_a = std::find(cfg.classes.begin(), cfg.classes.end(), a) != cfg.classes.end();
        bool ok_b = std::find(cfg.classes.begin(), cfg.classes.end(), b) != cfg.classes.end();
        if (!ok_a || !ok_b || a == b)
            throw ConfigError("confusable pair '" + a + ":" + b + "' must name two distinct classes");
    }
}

} // namespace

std::vector<Rgb> class_anchors(const SynthConfig& config) {
    const int n = static_cast<int>(config.classes.size());
    std::vector<Rgb> anchors(static_cast<size_t>(n));
    std::vector<bool> assigned(static_cast<size_t>(n), false);
    size_t shared_used = 0;
    for (const auto& [na, nb] : config.confusable_pairs) {
        int ia = static_cast<int>(std::find(config.classes.begin(), config.classes.end(), na) -
                                  config.classes.begin());
        int ib = static_cast<int>(std::find(config.classes.begin(), config.classes.end(), nb) -
                                  config.classes.begin());
        Rgb base = kSharedAnchors[shared_used++ % std::size(kSharedAnchors)];
        anchors[static_cast<size_t>(ia)] = {base[0] + kCueDelta, base[1], base[2] - kCueDelta};
        anchors[static_cast<size_t>(ib)] = {base[0] - kCueDelta, base[1], base[2] + kCueDelta};
        assigned[static_cast<size_t>(ia)] = assigned[static_cast<size_t>(ib)] = true;
    }
    size_t distinct_used = 0;
    for (int c = 0; c < n; ++c) {
        if (assigned[static_cast<size_t>(c)]) continue;
        anchors[static_cast<size_t>(c)] = kDistinctPalette[distinct_used++ % std::size(kDistinctPalette)];
    }
    return anchors;
}

namespace {

struct FrameData {
    ImageU8 image;
    std::vector<Mask> masks; // one per class
};

FrameData render_frame(const SynthConfig& cfg, const std::vector<Rgb>& anchors,
                       uint64_t frame_seed, int first_class) {
    const int h = cfg.height, w = cfg.width;
    const int n_classes = static_cast<int>(cfg.classes.size());
    std::mt19937_64 rng(frame_seed);
    std::uniform_int_distribution<int> coord_y(h / 6, h - h / 6);
    std::uniform_int_distribution<int> coord_x(w / 6, w - w / 6);
    std::uniform_real_distribution<double> axis(std::min(h, w) / 10.0, std::min(h, w) / 4.0);
    std::uniform_real_distribution<double> angle(0.0, 3.14159265358979323846);
    std::uniform_int_distribution<int> jitter(-15, 15);
    std::uniform_int_distribution<int> noise(-10, 10);
    std::uniform_int_distribution<int> extra_blobs(0, 3);
    std::uniform_int_distribution<int> any_class(0, n_classes - 1);

    // background texture: tinted gradient plus per-pixel noise
    Rgb bg = {90 + jitter(rng) / 2, 85 + jitter(rng) / 2, 78 + jitter(rng) / 2};
    int grad_y = jitter(rng);
    int grad_x = jitter(rng);

    std::vector<Blob> blobs;
    int wanted = 1 + extra_blobs(rng);
    for (int k = 0; k < wanted; ++k) {
        int cls = (k == 0) ? first_class : any_class(rng);
        bool placed = false;
        for (int attempt = 0; attempt < 30 && !placed; ++attempt) {
            Blob blob;
            blob.cy = coord_y(rng);
            blob.cx = coord_x(rng);
            blob.a = axis(rng);
            blob.b = axis(rng);
            double t = angle(rng);
            blob.cos_t = std::cos(t);
            blob.sin_t = std::sin(t);
            blob.class_index = cls;
            blob.brightness = jitter(rng);
            // keep blobs pairwise disjoint with a small gap so masks never touch
            double clearance = std::max(blob.a, blob.b) + 1.5;
            bool ok = true;
            for (const auto& other : blobs) {
                double dist = std::hypot(blob.cx - other.cx, blob.cy - other.cy);
                if (dist < clearance + std::max(other.a, other.b)) { ok = false; break; }
            }
            if (ok) { blobs.push_back(blob); placed = true; }
        }
    }

    FrameData out;
    out.image = ImageU8(h, w);
    out.masks.assign(static_cast<size_t>(n_classes), Mask(h, w));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Blob* owner = nullptr;
            double owner_r2 = 0.0;
            for (const auto& blob : blobs) {
                double r2 = blob.r2(x, y);
                if (r2 <= 1.0) { owner = &blob; owner_r2 = r2; break; }
            }
            Rgb color;
            if (owner) {
                const Rgb& anchor = anchors[static_cast<size_t>(owner->class_index)];
                double shade = 1.0 - 0.25 * owner_r2; // center slightly brighter
                for (int c = 0; c < 3; ++c)
                    color[c] = static_cast<int>(anchor[c] * shade) + owner->brightness;
                out.masks[static_cast<size_t>(owner->class_index)].at(y, x) = 1;
            } else {
                for (int c = 0; c < 3; ++c)
                    color[c] = bg[c] + grad_y * (2 * y - h) / (2 * h) + grad_x * (2 * x - w) / (2 * w);
            }
            for (int c = 0; c < 3; ++c)
                out.image.at(y, x, c) = clamp_u8(color[c] + noise(rng));
        }
    }
    return out;
}

} // namespace

DatasetManifest synth_generate(const SynthConfig& config, const std::filesystem::path& out_dir) {
    validate(config);
    const auto anchors = class_anchors(config);
    const int n_classes = static_cast<int>(config.classes.size());

    DatasetManifest manifest;
    manifest.name = config.name;
    manifest.catalog = ClassCatalog(config.classes);
    manifest.root = out_dir;
    Subset subset;
    subset.name = "full";
    subset.annotated_classes = config.classes;

    const std::array<std::pair<std::string, int>, 3> split_plan = {
        std::make_pair(std::string("train"), config.n_train),
        std::make_pair(std::string("val"), config.n_val),
        std::make_pair(std::string("test"), config.n_test)};

    int split_id = 0;
    for (const auto& [split, count] : split_plan) {
        std::filesystem::create_directories(out_dir / "full" / split);
        for (int i = 0; i < count; ++i) {
            // per-frame seed: generation order never matters
            uint64_t frame_seed = mix64(mix64(config.seed, static_cast<uint64_t>(split_id)),
                                        static_cast<uint64_t>(i));
            // cycle the first blob's class so every class occurs in every split
            FrameData data = render_frame(config, anchors, frame_seed, i % n_classes);

            char id[16];
            std::snprintf(id, sizeof(id), "%04d", i);
            std::string rel_base = "full/" + split + "/" + id;
            write_image(out_dir / (rel_base + ".img"), data.image);

            FrameEntry entry;
            entry.id = id;
            entry.split = split;
            entry.image_path = rel_base + ".img";
            for (int c = 0; c < n_classes; ++c) {
                std::string rel = rel_base + "." + config.classes[static_cast<size_t>(c)] + ".mask";
                write_mask(out_dir / rel, data.masks[static_cast<size_t>(c)]);
                entry.mask_paths[config.classes[static_cast<size_t>(c)]] = rel;
            }
            subset.frames.push_back(std::move(entry));
        }
        ++split_id;
    }

    manifest.subsets.push_back(std::move(subset));
    return manifest;
}

} // namespace complseg
