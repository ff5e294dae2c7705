#include "complseg/batch.hpp"

#include <algorithm>
#include <random>

#include "complseg/errors.hpp"

namespace complseg {

namespace {

uint64_t mix(uint64_t a, uint64_t b) {
    uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    return x;
}

} // namespace

std::vector<Batch> epoch_batches(std::vector<FrameView> views, int batch_size, uint64_t seed,
                                 int epoch, bool mixed) {
    if (batch_size < 1) throw ConfigError("batch size must be at least 1");
    if (views.empty()) throw EmptySplitError("no frame views");

    std::mt19937_64 rng(mix(seed, static_cast<uint64_t>(epoch)));
    std::vector<Batch> batches;
    auto emit = [&](std::vector<FrameView>& pool) {
        for (size_t i = 0; i < pool.size(); i += static_cast<size_t>(batch_size)) {
            Batch b;
            size_t end = std::min(pool.size(), i + static_cast<size_t>(batch_size));
            b.views.assign(pool.begin() + static_cast<long>(i), pool.begin() + static_cast<long>(end));
            batches.push_back(std::move(b));
        }
    };

    if (mixed) {
        std::shuffle(views.begin(), views.end(), rng);
        emit(views);
    } else {
        // group by subset in first-appearance order
        std::vector<const Subset*> order;
        for (const auto& v : views)
            if (std::find(order.begin(), order.end(), v.subset) == order.end())
                order.push_back(v.subset);
        for (const Subset* subset : order) {
            std::vector<FrameView> pool;
            for (const auto& v : views)
                if (v.subset == subset) pool.push_back(v);
            std::shuffle(pool.begin(), pool.end(), rng);
            emit(pool);
        }
    }
    return batches;
}

std::vector<Batch> epoch_batches(const DatasetManifest& manifest, const std::string& split,
                                 int batch_size, uint64_t seed, int epoch, bool mixed) {
    std::vector<FrameView> views = list_views(manifest, split);
    if (views.empty()) throw EmptySplitError(split);
    return epoch_batches(std::move(views), batch_size, seed, epoch, mixed);
}

} // namespace complseg
