#include "complseg/loss.hpp"

#include <algorithm>
#include <cmath>

#include "complseg/errors.hpp"

namespace complseg {

namespace {

inline double softplus(double x) {
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
    return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

void check_shapes(std::span<const Tensor> logits, std::span<const SupervisionVolume> supervision,
                  const PositiveWeights& weights) {
    if (logits.size() != supervision.size())
        throw ShapeMismatchError("batch sizes differ between logits and supervision");
    if (logits.empty()) throw ShapeMismatchError("empty batch");
    for (size_t b = 0; b < logits.size(); ++b) {
        const Tensor& t = logits[b];
        const SupervisionVolume& s = supervision[b];
        if (t.ch != s.n_classes || t.h != s.h || t.w != s.w)
            throw ShapeMismatchError("logits and supervision disagree in image " + std::to_string(b));
        if (static_cast<size_t>(t.ch) != weights.weights.size())
            throw ShapeMismatchError("weights cover " + std::to_string(weights.weights.size()) +
                                     " classes, logits have " + std::to_string(t.ch) + " channels");
    }
}

LossBreakdown run_bce(std::span<const Tensor> logits, std::span<const SupervisionVolume> supervision,
                      const PositiveWeights& weights, std::vector<Tensor>* dlogits) {
    check_shapes(logits, supervision, weights);
    const int n_classes = logits[0].ch;
    const double batch = static_cast<double>(logits.size());

    LossBreakdown out;
    out.per_class.assign(static_cast<size_t>(n_classes), 0.0);
    out.valid_counts.assign(static_cast<size_t>(n_classes), 0);

    for (size_t b = 0; b < logits.size(); ++b) {
        const SupervisionVolume& sup = supervision[b];
        for (int c = 0; c < n_classes; ++c) {
            const uint8_t* states = sup.plane(c);
            for (int i = 0; i < sup.plane_size(); ++i)
                out.valid_counts[static_cast<size_t>(c)] +=
                    states[i] != static_cast<uint8_t>(PixelState::Ignore);
        }
    }

    int classes_with_pixels = 0;
    for (int c = 0; c < n_classes; ++c)
        classes_with_pixels += out.valid_counts[static_cast<size_t>(c)] > 0;

    if (dlogits) {
        dlogits->resize(logits.size());
        for (size_t b = 0; b < logits.size(); ++b) {
            (*dlogits)[b] = Tensor(logits[b].ch, logits[b].h, logits[b].w);
        }
    }

    for (size_t b = 0; b < logits.size(); ++b) {
        const Tensor& t = logits[b];
        const SupervisionVolume& sup = supervision[b];
        for (int c = 0; c < n_classes; ++c) {
            const long long valid = out.valid_counts[static_cast<size_t>(c)];
            if (valid == 0) continue; // class entirely ignored: skipped, not an error
            const double w = weights.weights[static_cast<size_t>(c)];
            const double norm = 1.0 / (batch * static_cast<double>(valid));
            const double grad_scale = dlogits ? norm / classes_with_pixels : 0.0;
            const float* z = t.plane(c);
            const uint8_t* states = sup.plane(c);
            float* dz = dlogits ? (*dlogits)[b].plane(c) : nullptr;
            double acc = 0.0;
            for (int i = 0; i < t.plane_size(); ++i) {
                const auto state = static_cast<PixelState>(states[i]);
                if (state == PixelState::Ignore) continue;
                const double zi = z[i];
                if (state == PixelState::Pos) {
                    acc += w * softplus(-zi);
                    if (dz) dz[i] = static_cast<float>(grad_scale * w * (sigmoid(zi) - 1.0));
                } else {
                    acc += softplus(zi);
                    if (dz) dz[i] = static_cast<float>(grad_scale * sigmoid(zi));
                }
            }
            out.per_class[static_cast<size_t>(c)] += norm * acc;
        }
    }

    if (classes_with_pixels > 0) {
        double sum = 0.0;
        for (double l : out.per_class) sum += l;
        out.total = sum / classes_with_pixels;
    }
    return out;
}

double ratio_weight(const ClassPixelStats& cs, bool with_implied, const std::string& name) {
    if (cs.positives == 0) throw NoPositivesError(name);
    double neg = static_cast<double>(cs.neg_annotated) +
                 (with_implied ? static_cast<double>(cs.neg_implied) : 0.0);
    return std::clamp(neg / static_cast<double>(cs.positives), kWeightClampLo, kWeightClampHi);
}

} // namespace

LossBreakdown masked_weighted_bce(std::span<const Tensor> logits,
                                  std::span<const SupervisionVolume> supervision,
                                  const PositiveWeights& weights) {
    return run_bce(logits, supervision, weights, nullptr);
}

LossBreakdown masked_weighted_bce_grad(std::span<const Tensor> logits,
                                       std::span<const SupervisionVolume> supervision,
                                       const PositiveWeights& weights,
                                       std::vector<Tensor>& dlogits) {
    return run_bce(logits, supervision, weights, &dlogits);
}

PositiveWeights pos_weight_il(const PixelStats& stats, const ClassCatalog& catalog) {
    PositiveWeights out;
    out.scheme = WeightScheme::IL;
    for (int c = 0; c < catalog.n_classes(); ++c)
        out.weights.push_back(
            ratio_weight(stats[static_cast<size_t>(c)], /*with_implied=*/true, catalog.name(c)));
    return out;
}

PositiveWeights pos_weight_en(const PixelStats& member_stats, int class_index,
                              const ClassCatalog& catalog) {
    PositiveWeights out;
    out.scheme = WeightScheme::ENMember;
    out.background_weight = 1.0;
    out.weights.push_back(ratio_weight(member_stats[static_cast<size_t>(class_index)],
                                       /*with_implied=*/false, catalog.name(class_index)));
    return out;
}

PositiveWeights pos_weight_fs(const PixelStats& stats, const ClassCatalog& catalog) {
    if (!stats.fully_labeled())
        throw NotFullyLabeledError("positive-share weights need a fully labeled split");
    PositiveWeights out;
    out.scheme = WeightScheme::FS;
    const size_t n = stats.per_class.size();
    std::vector<double> shares(n);
    for (size_t c = 0; c < n; ++c) {
        if (stats[c].total() == 0) throw EmptySplitError("no pixels counted");
        shares[c] = static_cast<double>(stats[c].positives) / static_cast<double>(stats[c].total());
    }
    // softmax of negated shares
    double max_neg = -shares[0];
    for (size_t c = 1; c < n; ++c) max_neg = std::max(max_neg, -shares[c]);
    double denom = 0.0;
    for (size_t c = 0; c < n; ++c) denom += std::exp(-shares[c] - max_neg);
    out.weights.resize(n);
    for (size_t c = 0; c < n; ++c) out.weights[c] = std::exp(-shares[c] - max_neg) / denom;
    (void)catalog;
    return out;
}

PositiveWeights pos_weight_masking_only(const PixelStats& stats, const ClassCatalog& catalog) {
    PositiveWeights out;
    out.scheme = WeightScheme::IL;
    for (int c = 0; c < catalog.n_classes(); ++c)
        out.weights.push_back(
            ratio_weight(stats[static_cast<size_t>(c)], /*with_implied=*/false, catalog.name(c)));
    return out;
}

} // namespace complseg
