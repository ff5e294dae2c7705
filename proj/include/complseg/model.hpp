#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "complseg/tensor.hpp"

namespace complseg {

struct ParamSpan {
    float* data;
    size_t size;
};

// Segmentation model with per-class sigmoid-independent outputs. Forward
// emits raw logits at input resolution; probability is sigmoid per channel.
class SegmentationModel {
public:
    virtual ~SegmentationModel() = default;

    virtual int n_classes() const = 0;
    virtual int in_channels() const = 0;

    virtual Tensor forward(const Tensor& image) const = 0;
    std::vector<Tensor> forward_batch(std::span<const Tensor> images) const;

    virtual std::vector<ParamSpan> parameters() = 0;
    virtual size_t parameter_count() const = 0;

    // Training access: a stash holds per-image activations so independent
    // images can run on independent workers; gradients accumulate into
    // per-worker buffers shaped like parameters().
    struct Stash {
        virtual ~Stash() = default;
    };
    virtual std::unique_ptr<Stash> make_stash() const = 0;
    virtual Tensor forward_train(const Tensor& image, Stash& stash) const = 0;
    virtual void backward(const Tensor& dlogits, Stash& stash,
                          std::vector<std::vector<float>>& grads) const = 0;

    virtual void append_weights(std::vector<uint8_t>& out) const = 0;
    virtual void read_weights(std::span<const uint8_t> bytes, size_t& offset) = 0;
};

struct TinyConfig {
    int in_channels = 3;
    int n_classes = 1;
    int depth = 3;       // encoder levels; total downsample factor 2^depth
    int base_width = 16; // channels at the first level, doubled per level
};

// Small encoder-decoder: strided stem, average-pool encoder, nearest-neighbor
// upsampling decoder with additive skip connections per level, 1x1 head.
// Logits are predicted at half resolution and upsampled to the input size.
class TinyEncoderDecoder : public SegmentationModel {
public:
    TinyEncoderDecoder(const TinyConfig& config, uint64_t init_seed);

    int n_classes() const override { return config_.n_classes; }
    int in_channels() const override { return config_.in_channels; }
    const TinyConfig& config() const { return config_; }

    Tensor forward(const Tensor& image) const override;

    std::vector<ParamSpan> parameters() override;
    size_t parameter_count() const override;

    std::unique_ptr<Stash> make_stash() const override;
    Tensor forward_train(const Tensor& image, Stash& stash) const override;
    void backward(const Tensor& dlogits, Stash& stash,
                  std::vector<std::vector<float>>& grads) const override;

    void append_weights(std::vector<uint8_t>& out) const override;
    void read_weights(std::span<const uint8_t> bytes, size_t& offset) override;

private:
    struct Conv {
        Eigen::MatrixXf W; // (cout, cin*k*k)
        Eigen::VectorXf b;
        int cin, cout, k, stride, pad;
    };
    struct StashImpl;

    Tensor run_forward(const Tensor& image, StashImpl* stash) const;

    TinyConfig config_;
    std::vector<Conv> layers_; // stem, enc..., proj..., dec..., head
    int n_enc_ = 0;            // encoder convs including stem
};

// Ordered per-class single-output models; member order matches the catalog.
struct EnsembleBundle {
    std::vector<std::unique_ptr<SegmentationModel>> members;

    // Validates completeness and order. `member_classes[i]` is the catalog
    // index the i-th model was trained for.
    static EnsembleBundle assemble(std::vector<std::unique_ptr<SegmentationModel>> models,
                                   const std::vector<int>& member_classes, int n_catalog_classes);

    int n_classes() const { return static_cast<int>(members.size()); }
};

// Stacks the members' sigmoid outputs into one C-channel probability map.
PredictionMap ensemble_forward(const EnsembleBundle& bundle, const Tensor& image);

// Elementwise sigmoid of a logit map.
PredictionMap sigmoid_map(const Tensor& logits);

// Versioned checkpoint container: magic, version, scheme tag, catalog hash,
// architecture, weights. Loading refuses a catalog mismatch.
struct CheckpointMeta {
    std::string scheme;     // il | en-member | fs | il-maskonly
    uint64_t catalog_hash = 0;
    int member_class = -1;  // catalog index for en-member checkpoints
};

std::vector<uint8_t> save_checkpoint(const SegmentationModel& model, const CheckpointMeta& meta);
std::unique_ptr<SegmentationModel> load_checkpoint(std::span<const uint8_t> bytes,
                                                   uint64_t expected_catalog_hash,
                                                   CheckpointMeta* meta_out = nullptr);

void save_checkpoint_file(const std::filesystem::path& path, const SegmentationModel& model,
                          const CheckpointMeta& meta);
std::unique_ptr<SegmentationModel> load_checkpoint_file(const std::filesystem::path& path,
                                                        uint64_t expected_catalog_hash,
                                                        CheckpointMeta* meta_out = nullptr);

} // namespace complseg
