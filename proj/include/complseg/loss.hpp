#pragma once

#include <span>
#include <vector>

#include "complseg/catalog.hpp"
#include "complseg/stats.hpp"
#include "complseg/supervision.hpp"
#include "complseg/tensor.hpp"

namespace complseg {

enum class WeightScheme { IL, ENMember, FS };

// Per-class multiplier on the positive term of the binary cross-entropy. The
// negative term always carries weight 1 (for ensemble members that is the
// background pseudo-class).
struct PositiveWeights {
    std::vector<double> weights;
    WeightScheme scheme = WeightScheme::IL;
    double background_weight = 1.0;
};

struct LossBreakdown {
    std::vector<double> per_class;        // L_c; 0 when the class had no valid pixel
    std::vector<long long> valid_counts;  // number of (image, pixel) sites with lambda = 1
    double total = 0.0;                   // mean of L_c over classes with valid pixels
};

// Masked, positive-weighted binary cross-entropy:
//   L_c = (1/B) (1/P_c) sum over images b and pixels p with lambda=1 of
//         -[w_c y log sigmoid(z) + (1-y) log(1-sigmoid(z))]
// with P_c counted per class across the whole batch. Ignored pixels contribute
// exactly zero to value and gradient. Numerically stable in logit space.
LossBreakdown masked_weighted_bce(std::span<const Tensor> logits,
                                  std::span<const SupervisionVolume> supervision,
                                  const PositiveWeights& weights);

// Same computation, also producing d(total)/d(logit) per image.
LossBreakdown masked_weighted_bce_grad(std::span<const Tensor> logits,
                                       std::span<const SupervisionVolume> supervision,
                                       const PositiveWeights& weights,
                                       std::vector<Tensor>& dlogits);

inline constexpr double kWeightClampLo = 1e-3;
inline constexpr double kWeightClampHi = 1e4;

// IL: negatives (annotated plus implied) to positives ratio per class,
// computed over the whole training split.
PositiveWeights pos_weight_il(const PixelStats& stats, const ClassCatalog& catalog);

// Ensemble member: the member's own subset ratio; background weight fixed at 1.
PositiveWeights pos_weight_en(const PixelStats& member_stats, int class_index,
                              const ClassCatalog& catalog);

// Fully supervised: softmax over negated positive-pixel shares; sums to 1.
PositiveWeights pos_weight_fs(const PixelStats& stats, const ClassCatalog& catalog);

// Masking-only ablation: like IL but without the implied negatives.
PositiveWeights pos_weight_masking_only(const PixelStats& stats, const ClassCatalog& catalog);

} // namespace complseg
