#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "complseg/manifest.hpp"
#include "complseg/model.hpp"

namespace complseg {

enum class Trial { IL, EN, FS, ILMaskOnly };

std::string trial_name(Trial trial);
Trial trial_from_name(const std::string& name);

struct TrainConfig {
    Trial trial = Trial::IL;
    int epochs = 30;            // paper-scale default is 100
    double lr = 3e-4;
    double gamma = 0.9;         // applied every lr_step_epochs
    int lr_step_epochs = 10;
    double weight_decay = 0.1;
    int batch_size = 8;
    uint64_t seed = 0;
    double tau = 0.5;           // validation decode threshold
    bool mixed_batches = true;  // batches may span subsets
    int depth = 3;
    int base_width = 16;
};

struct TrainReport {
    std::string trial;
    uint64_t seed = 0;
    std::vector<double> train_loss; // per epoch
    std::vector<double> val_dice;   // per epoch
    int selected_epoch = -1;        // argmax of val_dice, earliest on ties
    std::string checkpoint_ref;
    std::vector<std::pair<std::string, double>> pos_weights;
};

struct TrainOutcome {
    TrainReport report;
    std::vector<uint8_t> checkpoint; // best-validation epoch weights
};

// Learning rate after the step scheduler, epochs counted from zero.
double lr_at_epoch(const TrainConfig& config, int epoch);

// Adaptive moment estimation with decoupled weight decay. With zero gradient a
// parameter shrinks by exactly (1 - lr * weight_decay) per step.
struct AdamW {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
    long t = 0;
    std::vector<std::vector<float>> m;
    std::vector<std::vector<float>> v;

    void step(std::vector<ParamSpan>& params, const std::vector<std::vector<float>>& grads,
              double lr);
};

// Runs one IL, IL-mask-only or FS trial. IL derives supervision with implied
// negatives; the mask-only ablation drops them; FS trains with an explicit
// background channel and softmax-share weights on fully labeled data.
TrainOutcome train(const TrainConfig& config, const DatasetManifest& manifest);

// Trains the single-class ensemble member for one catalog class, using only
// that class's subset.
TrainOutcome train_member(const TrainConfig& config, const DatasetManifest& manifest,
                          int class_index);

struct EnsembleOutcome {
    std::vector<TrainOutcome> members; // catalog order
};

// One member per catalog class; every class must have its own subset.
EnsembleOutcome train_ensemble(const TrainConfig& config, const DatasetManifest& manifest);

void save_train_report(const TrainReport& report, const std::filesystem::path& path);

} // namespace complseg
