#include "complseg/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "complseg/errors.hpp"

namespace complseg {

namespace {

using RowMajorMap = Eigen::Map<Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstRowMajorMap =
    Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

int conv_out_dim(int in, int k, int stride, int pad) { return (in + 2 * pad - k) / stride + 1; }

// column n of `col` holds the receptive field of output pixel n
void im2col(const Tensor& in, int k, int stride, int pad, Eigen::MatrixXf& col) {
    const int ho = conv_out_dim(in.h, k, stride, pad);
    const int wo = conv_out_dim(in.w, k, stride, pad);
    col.resize(in.ch * k * k, ho * wo);
    for (int oy = 0; oy < ho; ++oy) {
        for (int ox = 0; ox < wo; ++ox) {
            float* dst = col.col(oy * wo + ox).data();
            for (int c = 0; c < in.ch; ++c) {
                const float* plane = in.plane(c);
                for (int ky = 0; ky < k; ++ky) {
                    const int y = oy * stride + ky - pad;
                    for (int kx = 0; kx < k; ++kx) {
                        const int x = ox * stride + kx - pad;
                        *dst++ = (y >= 0 && y < in.h && x >= 0 && x < in.w)
                                     ? plane[y * in.w + x]
                                     : 0.f;
                    }
                }
            }
        }
    }
}

void col2im(const Eigen::MatrixXf& dcol, int ch, int h, int w, int k, int stride, int pad,
            Tensor& din) {
    din = Tensor(ch, h, w);
    const int ho = conv_out_dim(h, k, stride, pad);
    const int wo = conv_out_dim(w, k, stride, pad);
    for (int oy = 0; oy < ho; ++oy) {
        for (int ox = 0; ox < wo; ++ox) {
            const float* src = dcol.col(oy * wo + ox).data();
            for (int c = 0; c < ch; ++c) {
                float* plane = din.plane(c);
                for (int ky = 0; ky < k; ++ky) {
                    const int y = oy * stride + ky - pad;
                    for (int kx = 0; kx < k; ++kx) {
                        const int x = ox * stride + kx - pad;
                        if (y >= 0 && y < h && x >= 0 && x < w) plane[y * w + x] += *src;
                        ++src;
                    }
                }
            }
        }
    }
}

void relu_inplace(Tensor& t) {
    for (float& v : t.data) v = v > 0.f ? v : 0.f;
}

void avgpool2(const Tensor& in, Tensor& out) {
    out = Tensor(in.ch, in.h / 2, in.w / 2);
    for (int c = 0; c < in.ch; ++c) {
        const float* src = in.plane(c);
        float* dst = out.plane(c);
        for (int y = 0; y < out.h; ++y)
            for (int x = 0; x < out.w; ++x)
                dst[y * out.w + x] = 0.25f * (src[(2 * y) * in.w + 2 * x] +
                                              src[(2 * y) * in.w + 2 * x + 1] +
                                              src[(2 * y + 1) * in.w + 2 * x] +
                                              src[(2 * y + 1) * in.w + 2 * x + 1]);
    }
}

void avgpool2_backward(const Tensor& dout, Tensor& din, int h, int w) {
    din = Tensor(dout.ch, h, w);
    for (int c = 0; c < dout.ch; ++c) {
        const float* src = dout.plane(c);
        float* dst = din.plane(c);
        for (int y = 0; y < dout.h; ++y)
            for (int x = 0; x < dout.w; ++x) {
                const float g = 0.25f * src[y * dout.w + x];
                dst[(2 * y) * w + 2 * x] = g;
                dst[(2 * y) * w + 2 * x + 1] = g;
                dst[(2 * y + 1) * w + 2 * x] = g;
                dst[(2 * y + 1) * w + 2 * x + 1] = g;
            }
    }
}

void upsample2(const Tensor& in, Tensor& out) {
    out = Tensor(in.ch, in.h * 2, in.w * 2);
    for (int c = 0; c < in.ch; ++c) {
        const float* src = in.plane(c);
        float* dst = out.plane(c);
        for (int y = 0; y < out.h; ++y)
            for (int x = 0; x < out.w; ++x) dst[y * out.w + x] = src[(y / 2) * in.w + x / 2];
    }
}

void upsample2_backward(const Tensor& dout, Tensor& din) {
    din = Tensor(dout.ch, dout.h / 2, dout.w / 2);
    for (int c = 0; c < dout.ch; ++c) {
        const float* src = dout.plane(c);
        float* dst = din.plane(c);
        for (int y = 0; y < dout.h; ++y)
            for (int x = 0; x < dout.w; ++x) dst[(y / 2) * din.w + x / 2] += src[y * dout.w + x];
    }
}

} // namespace

struct TinyEncoderDecoder::StashImpl : SegmentationModel::Stash {
    int orig_h = 0, orig_w = 0;
    Tensor x;               // padded input
    std::vector<Tensor> a;  // encoder post-relu, per level
    std::vector<Tensor> p;  // pooled inputs of enc levels 1..D-1
    std::vector<Tensor> u;  // upsampled decoder inputs, per level 0..D-2
    std::vector<Tensor> s;  // skip sums, per level
    std::vector<Tensor> d;  // decoder post-relu, per level
    Eigen::MatrixXf col;    // im2col scratch
};

TinyEncoderDecoder::TinyEncoderDecoder(const TinyConfig& config, uint64_t init_seed)
    : config_(config) {
    if (config_.depth < 1 || config_.base_width < 1 || config_.n_classes < 1 ||
        config_.in_channels < 1)
        throw ConfigError("encoder-decoder needs positive depth, width and channel counts");

    std::mt19937_64 rng(init_seed);
    auto make_conv = [&](int cin, int cout, int k, int stride, int pad) {
        Conv conv;
        conv.cin = cin; conv.cout = cout; conv.k = k; conv.stride = stride; conv.pad = pad;
        conv.W.resize(cout, cin * k * k);
        conv.b = Eigen::VectorXf::Zero(cout);
        std::normal_distribution<float> dist(0.f, std::sqrt(2.f / static_cast<float>(cin * k * k)));
        for (int r = 0; r < conv.W.rows(); ++r)
            for (int c = 0; c < conv.W.cols(); ++c) conv.W(r, c) = dist(rng);
        return conv;
    };

    const int D = config_.depth;
    auto width = [&](int level) { return config_.base_width << level; };

    layers_.push_back(make_conv(config_.in_channels, width(0), 3, 2, 1)); // stem
    for (int l = 1; l < D; ++l) layers_.push_back(make_conv(width(l - 1), width(l), 3, 1, 1));
    n_enc_ = D;
    for (int l = D - 2; l >= 0; --l) layers_.push_back(make_conv(width(l + 1), width(l), 1, 1, 0));
    for (int l = D - 2; l >= 0; --l) layers_.push_back(make_conv(width(l), width(l), 3, 1, 1));
    layers_.push_back(make_conv(width(0), config_.n_classes, 1, 1, 0)); // head
}

namespace {

void conv_apply(const Eigen::MatrixXf& W, const Eigen::VectorXf& b, const Tensor& in, int k,
                int stride, int pad, Eigen::MatrixXf& colbuf, Tensor& out) {
    const int ho = conv_out_dim(in.h, k, stride, pad);
    const int wo = conv_out_dim(in.w, k, stride, pad);
    out = Tensor(static_cast<int>(W.rows()), ho, wo);
    RowMajorMap out_map(out.data.data(), W.rows(), ho * wo);
    if (k == 1 && stride == 1) {
        ConstRowMajorMap in_map(in.data.data(), in.ch, in.h * in.w);
        out_map.noalias() = W * in_map;
    } else {
        im2col(in, k, stride, pad, colbuf);
        out_map.noalias() = W * colbuf;
    }
    out_map.colwise() += b;
}

} // namespace

Tensor TinyEncoderDecoder::run_forward(const Tensor& image, StashImpl* stash) const {
    if (image.ch != config_.in_channels)
        throw ShapeMismatchError("expected " + std::to_string(config_.in_channels) +
                                 " input channels, got " + std::to_string(image.ch));
    const int D = config_.depth;
    const int multiple = 1 << D;
    const int hp = (image.h + multiple - 1) / multiple * multiple;
    const int wp = (image.w + multiple - 1) / multiple * multiple;

    Tensor x(image.ch, hp, wp);
    for (int c = 0; c < image.ch; ++c)
        for (int y = 0; y < image.h; ++y)
            std::memcpy(x.plane(c) + y * wp, image.plane(c) + y * image.w,
                        sizeof(float) * static_cast<size_t>(image.w));

    Eigen::MatrixXf local_col;
    Eigen::MatrixXf& col = stash ? stash->col : local_col;

    std::vector<Tensor> a(static_cast<size_t>(D));
    std::vector<Tensor> p(static_cast<size_t>(D > 1 ? D - 1 : 0));
    conv_apply(layers_[0].W, layers_[0].b, x, 3, 2, 1, col, a[0]);
    relu_inplace(a[0]);
    for (int l = 1; l < D; ++l) {
        avgpool2(a[static_cast<size_t>(l - 1)], p[static_cast<size_t>(l - 1)]);
        conv_apply(layers_[static_cast<size_t>(l)].W, layers_[static_cast<size_t>(l)].b,
                   p[static_cast<size_t>(l - 1)], 3, 1, 1, col, a[static_cast<size_t>(l)]);
        relu_inplace(a[static_cast<size_t>(l)]);
    }

    std::vector<Tensor> u(static_cast<size_t>(D > 1 ? D - 1 : 0));
    std::vector<Tensor> s(u.size());
    std::vector<Tensor> d(u.size());
    const Tensor* current = &a[static_cast<size_t>(D - 1)];
    for (int l = D - 2; l >= 0; --l) {
        const size_t proj_i = static_cast<size_t>(n_enc_ + (D - 2 - l));
        const size_t dec_i = proj_i + static_cast<size_t>(D - 1);
        upsample2(*current, u[static_cast<size_t>(l)]);
        Tensor q;
        conv_apply(layers_[proj_i].W, layers_[proj_i].b, u[static_cast<size_t>(l)], 1, 1, 0, col, q);
        s[static_cast<size_t>(l)] = std::move(q);
        Tensor& sum = s[static_cast<size_t>(l)];
        const Tensor& skip = a[static_cast<size_t>(l)];
        for (size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += skip.data[i];
        conv_apply(layers_[dec_i].W, layers_[dec_i].b, sum, 3, 1, 1, col, d[static_cast<size_t>(l)]);
        relu_inplace(d[static_cast<size_t>(l)]);
        current = &d[static_cast<size_t>(l)];
    }

    Tensor half_logits;
    const Conv& head = layers_.back();
    conv_apply(head.W, head.b, *current, 1, 1, 0, col, half_logits);
    Tensor full;
    upsample2(half_logits, full);

    Tensor logits(config_.n_classes, image.h, image.w);
    for (int c = 0; c < logits.ch; ++c)
        for (int y = 0; y < image.h; ++y)
            std::memcpy(logits.plane(c) + y * image.w, full.plane(c) + y * wp,
                        sizeof(float) * static_cast<size_t>(image.w));

    if (stash) {
        stash->orig_h = image.h;
        stash->orig_w = image.w;
        stash->x = std::move(x);
        stash->a = std::move(a);
        stash->p = std::move(p);
        stash->u = std::move(u);
        stash->s = std::move(s);
        stash->d = std::move(d);
    }
    return logits;
}

Tensor TinyEncoderDecoder::forward(const Tensor& image) const { return run_forward(image, nullptr); }

std::unique_ptr<SegmentationModel::Stash> TinyEncoderDecoder::make_stash() const {
    return std::make_unique<StashImpl>();
}

Tensor TinyEncoderDecoder::forward_train(const Tensor& image, Stash& stash) const {
    return run_forward(image, &static_cast<StashImpl&>(stash));
}

void TinyEncoderDecoder::backward(const Tensor& dlogits, Stash& stash_base,
                                  std::vector<std::vector<float>>& grads) const {
    auto& stash = static_cast<StashImpl&>(stash_base);
    if (stash.x.size() == 0) throw Error("backward called without a stored forward pass");
    if (dlogits.h != stash.orig_h || dlogits.w != stash.orig_w ||
        dlogits.ch != config_.n_classes)
        throw ShapeMismatchError("dlogits shape does not match the forward pass");

    if (grads.empty()) {
        grads.resize(layers_.size() * 2);
        for (size_t i = 0; i < layers_.size(); ++i) {
            grads[2 * i].assign(static_cast<size_t>(layers_[i].W.size()), 0.f);
            grads[2 * i + 1].assign(static_cast<size_t>(layers_[i].b.size()), 0.f);
        }
    }

    auto grad_W = [&](size_t layer) {
        return Eigen::Map<Eigen::MatrixXf>(grads[2 * layer].data(), layers_[layer].W.rows(),
                                           layers_[layer].W.cols());
    };
    auto grad_b = [&](size_t layer) {
        return Eigen::Map<Eigen::VectorXf>(grads[2 * layer + 1].data(), layers_[layer].b.size());
    };

    const int D = config_.depth;
    const int hp = stash.x.h;
    const int wp = stash.x.w;
    Eigen::MatrixXf& col = stash.col;

    // crop backward: re-embed into padded size, then undo the final upsample
    Tensor dfull(config_.n_classes, hp, wp);
    for (int c = 0; c < dlogits.ch; ++c)
        for (int y = 0; y < dlogits.h; ++y)
            std::memcpy(dfull.plane(c) + y * wp, dlogits.plane(c) + y * dlogits.w,
                        sizeof(float) * static_cast<size_t>(dlogits.w));
    Tensor dhalf;
    upsample2_backward(dfull, dhalf);

    // head
    const size_t head_i = layers_.size() - 1;
    const Tensor& head_in = (D > 1) ? stash.d[0] : stash.a[0];
    {
        ConstRowMajorMap dout(dhalf.data.data(), dhalf.ch, dhalf.plane_size());
        ConstRowMajorMap in_map(head_in.data.data(), head_in.ch, head_in.plane_size());
        grad_W(head_i).noalias() += dout * in_map.transpose();
        grad_b(head_i).noalias() += dout.rowwise().sum();
    }
    Tensor dd(head_in.ch, head_in.h, head_in.w);
    {
        RowMajorMap din(dd.data.data(), dd.ch, dd.plane_size());
        ConstRowMajorMap dout(dhalf.data.data(), dhalf.ch, dhalf.plane_size());
        din.noalias() = layers_[head_i].W.transpose() * dout;
    }

    // decoder, level 0 upwards; da accumulates skip gradients per encoder level
    std::vector<Tensor> da(static_cast<size_t>(D));
    for (int l = 0; l <= D - 2; ++l) {
        const size_t proj_i = static_cast<size_t>(n_enc_ + (D - 2 - l));
        const size_t dec_i = proj_i + static_cast<size_t>(D - 1);
        Tensor& act = stash.d[static_cast<size_t>(l)];
        for (size_t i = 0; i < dd.data.size(); ++i)
            if (act.data[i] <= 0.f) dd.data[i] = 0.f;

        const Tensor& conv_in = stash.s[static_cast<size_t>(l)];
        im2col(conv_in, 3, 1, 1, col);
        Eigen::MatrixXf dcol(col.rows(), col.cols());
        {
            ConstRowMajorMap dout(dd.data.data(), dd.ch, dd.plane_size());
            grad_W(dec_i).noalias() += dout * col.transpose();
            grad_b(dec_i).noalias() += dout.rowwise().sum();
            dcol.noalias() = layers_[dec_i].W.transpose() * dout;
        }
        Tensor ds;
        col2im(dcol, conv_in.ch, conv_in.h, conv_in.w, 3, 1, 1, ds);

        // the sum feeds both the skip and the projection
        da[static_cast<size_t>(l)] = ds;

        const Tensor& proj_in = stash.u[static_cast<size_t>(l)];
        Tensor du(proj_in.ch, proj_in.h, proj_in.w);
        {
            ConstRowMajorMap dout(ds.data.data(), ds.ch, ds.plane_size());
            ConstRowMajorMap in_map(proj_in.data.data(), proj_in.ch, proj_in.plane_size());
            grad_W(proj_i).noalias() += dout * in_map.transpose();
            grad_b(proj_i).noalias() += dout.rowwise().sum();
            RowMajorMap du_map(du.data.data(), du.ch, du.plane_size());
            du_map.noalias() = layers_[proj_i].W.transpose() * dout;
        }
        upsample2_backward(du, dd); // becomes the gradient of the next decoder stage input
    }

    // bottleneck activation gets the decoder chain gradient
    if (D > 1) {
        da[static_cast<size_t>(D - 1)] = std::move(dd);
    } else {
        da[0] = std::move(dd);
    }

    // encoder backward
    for (int l = D - 1; l >= 0; --l) {
        Tensor& grad_a = da[static_cast<size_t>(l)];
        const Tensor& act = stash.a[static_cast<size_t>(l)];
        for (size_t i = 0; i < grad_a.data.size(); ++i)
            if (act.data[i] <= 0.f) grad_a.data[i] = 0.f;

        const bool is_stem = (l == 0);
        const Tensor& conv_in = is_stem ? stash.x : stash.p[static_cast<size_t>(l - 1)];
        const int k = 3, stride = is_stem ? 2 : 1, pad = 1;
        im2col(conv_in, k, stride, pad, col);
        ConstRowMajorMap dout(grad_a.data.data(), grad_a.ch, grad_a.plane_size());
        grad_W(static_cast<size_t>(l)).noalias() += dout * col.transpose();
        grad_b(static_cast<size_t>(l)).noalias() += dout.rowwise().sum();
        if (!is_stem) {
            Eigen::MatrixXf dcol(col.rows(), col.cols());
            dcol.noalias() = layers_[static_cast<size_t>(l)].W.transpose() * dout;
            Tensor dp;
            col2im(dcol, conv_in.ch, conv_in.h, conv_in.w, k, stride, pad, dp);
            Tensor dprev;
            avgpool2_backward(dp, dprev, stash.a[static_cast<size_t>(l - 1)].h,
                              stash.a[static_cast<size_t>(l - 1)].w);
            Tensor& target = da[static_cast<size_t>(l - 1)];
            if (target.size() == 0) target = std::move(dprev);
            else
                for (size_t i = 0; i < target.data.size(); ++i) target.data[i] += dprev.data[i];
        }
    }
}

std::vector<ParamSpan> TinyEncoderDecoder::parameters() {
    std::vector<ParamSpan> spans;
    spans.reserve(layers_.size() * 2);
    for (auto& layer : layers_) {
        spans.push_back({layer.W.data(), static_cast<size_t>(layer.W.size())});
        spans.push_back({layer.b.data(), static_cast<size_t>(layer.b.size())});
    }
    return spans;
}

size_t TinyEncoderDecoder::parameter_count() const {
    size_t n = 0;
    for (const auto& layer : layers_)
        n += static_cast<size_t>(layer.W.size()) + static_cast<size_t>(layer.b.size());
    return n;
}

std::vector<Tensor> SegmentationModel::forward_batch(std::span<const Tensor> images) const {
    std::vector<Tensor> out(images.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < static_cast<long>(images.size()); ++i)
        out[static_cast<size_t>(i)] = forward(images[static_cast<size_t>(i)]);
    return out;
}

namespace {

template <typename T>
void append_pod(std::vector<uint8_t>& out, const T& v) {
    const auto* p = reinterpret_cast<const uint8_t*>(&v);
    out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T read_pod(std::span<const uint8_t> bytes, size_t& offset) {
    if (offset + sizeof(T) > bytes.size()) throw CorruptCheckpointError("truncated");
    T v;
    std::memcpy(&v, bytes.data() + offset, sizeof(T));
    offset += sizeof(T);
    return v;
}

constexpr char kMagic[8] = {'C', 'S', 'E', 'G', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;
constexpr uint32_t kArchTinyEncDec = 1;

} // namespace

void TinyEncoderDecoder::append_weights(std::vector<uint8_t>& out) const {
    for (const auto& layer : layers_) {
        append_pod(out, static_cast<uint32_t>(layer.W.rows()));
        append_pod(out, static_cast<uint32_t>(layer.W.cols()));
        const auto* wp = reinterpret_cast<const uint8_t*>(layer.W.data());
        out.insert(out.end(), wp, wp + sizeof(float) * static_cast<size_t>(layer.W.size()));
        append_pod(out, static_cast<uint32_t>(layer.b.size()));
        const auto* bp = reinterpret_cast<const uint8_t*>(layer.b.data());
        out.insert(out.end(), bp, bp + sizeof(float) * static_cast<size_t>(layer.b.size()));
    }
}

void TinyEncoderDecoder::read_weights(std::span<const uint8_t> bytes, size_t& offset) {
    for (auto& layer : layers_) {
        uint32_t rows = read_pod<uint32_t>(bytes, offset);
        uint32_t cols = read_pod<uint32_t>(bytes, offset);
        if (rows != static_cast<uint32_t>(layer.W.rows()) ||
            cols != static_cast<uint32_t>(layer.W.cols()))
            throw CorruptCheckpointError("weight block shape mismatch");
        size_t wbytes = sizeof(float) * static_cast<size_t>(rows) * cols;
        if (offset + wbytes > bytes.size()) throw CorruptCheckpointError("truncated");
        std::memcpy(layer.W.data(), bytes.data() + offset, wbytes);
        offset += wbytes;
        uint32_t blen = read_pod<uint32_t>(bytes, offset);
        if (blen != static_cast<uint32_t>(layer.b.size()))
            throw CorruptCheckpointError("bias block shape mismatch");
        size_t bbytes = sizeof(float) * static_cast<size_t>(blen);
        if (offset + bbytes > bytes.size()) throw CorruptCheckpointError("truncated");
        std::memcpy(layer.b.data(), bytes.data() + offset, bbytes);
        offset += bbytes;
    }
}

std::vector<uint8_t> save_checkpoint(const SegmentationModel& model, const CheckpointMeta& meta) {
    const auto* tiny = dynamic_cast<const TinyEncoderDecoder*>(&model);
    if (!tiny) throw Error("only encoder-decoder checkpoints are supported");

    std::vector<uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + sizeof(kMagic));
    append_pod(out, kVersion);
    append_pod(out, static_cast<uint32_t>(meta.scheme.size()));
    out.insert(out.end(), meta.scheme.begin(), meta.scheme.end());
    append_pod(out, meta.catalog_hash);
    append_pod(out, static_cast<int32_t>(meta.member_class));
    append_pod(out, kArchTinyEncDec);
    append_pod(out, static_cast<int32_t>(tiny->config().in_channels));
    append_pod(out, static_cast<int32_t>(tiny->config().n_classes));
    append_pod(out, static_cast<int32_t>(tiny->config().depth));
    append_pod(out, static_cast<int32_t>(tiny->config().base_width));
    model.append_weights(out);
    return out;
}

std::unique_ptr<SegmentationModel> load_checkpoint(std::span<const uint8_t> bytes,
                                                   uint64_t expected_catalog_hash,
                                                   CheckpointMeta* meta_out) {
    size_t offset = 0;
    if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
        throw CorruptCheckpointError("bad magic");
    offset = sizeof(kMagic);
    uint32_t version = read_pod<uint32_t>(bytes, offset);
    if (version != kVersion)
        throw CorruptCheckpointError("unsupported version " + std::to_string(version) +
                                     ", expected " + std::to_string(kVersion));
    CheckpointMeta meta;
    uint32_t scheme_len = read_pod<uint32_t>(bytes, offset);
    if (offset + scheme_len > bytes.size()) throw CorruptCheckpointError("truncated");
    meta.scheme.assign(reinterpret_cast<const char*>(bytes.data() + offset), scheme_len);
    offset += scheme_len;
    meta.catalog_hash = read_pod<uint64_t>(bytes, offset);
    meta.member_class = read_pod<int32_t>(bytes, offset);

    if (expected_catalog_hash != 0 && meta.catalog_hash != expected_catalog_hash)
        throw SchemaError("checkpoint was trained against a different class catalog");

    uint32_t arch = read_pod<uint32_t>(bytes, offset);
    if (arch != kArchTinyEncDec) throw CorruptCheckpointError("unknown architecture tag");
    TinyConfig cfg;
    cfg.in_channels = read_pod<int32_t>(bytes, offset);
    cfg.n_classes = read_pod<int32_t>(bytes, offset);
    cfg.depth = read_pod<int32_t>(bytes, offset);
    cfg.base_width = read_pod<int32_t>(bytes, offset);
    auto model = std::make_unique<TinyEncoderDecoder>(cfg, 0);
    model->read_weights(bytes, offset);
    if (offset != bytes.size()) throw CorruptCheckpointError("trailing bytes");
    if (meta_out) *meta_out = meta;
    return model;
}

void save_checkpoint_file(const std::filesystem::path& path, const SegmentationModel& model,
                          const CheckpointMeta& meta) {
    auto bytes = save_checkpoint(model, meta);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::unique_ptr<SegmentationModel> load_checkpoint_file(const std::filesystem::path& path,
                                                        uint64_t expected_catalog_hash,
                                                        CheckpointMeta* meta_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFileError(path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_checkpoint(bytes, expected_catalog_hash, meta_out);
}

EnsembleBundle EnsembleBundle::assemble(std::vector<std::unique_ptr<SegmentationModel>> models,
                                        const std::vector<int>& member_classes,
                                        int n_catalog_classes) {
    if (models.size() != static_cast<size_t>(n_catalog_classes))
        throw IncompleteBundleError("have " + std::to_string(models.size()) + " members for " +
                                    std::to_string(n_catalog_classes) + " classes");
    if (member_classes.size() != models.size())
        throw IncompleteBundleError("member class list does not match member count");
    for (size_t i = 0; i < models.size(); ++i) {
        if (!models[i]) throw IncompleteBundleError("member " + std::to_string(i) + " is missing");
        if (models[i]->n_classes() != 1)
            throw IncompleteBundleError("member " + std::to_string(i) + " is not single-class");
        if (member_classes[i] != static_cast<int>(i))
            throw IncompleteBundleError("member order does not match the catalog order");
    }
    EnsembleBundle bundle;
    bundle.members = std::move(models);
    return bundle;
}

PredictionMap sigmoid_map(const Tensor& logits) {
    Tensor out(logits.ch, logits.h, logits.w);
    for (size_t i = 0; i < logits.data.size(); ++i) {
        const float z = logits.data[i];
        out.data[i] = z >= 0 ? 1.f / (1.f + std::exp(-z)) : std::exp(z) / (1.f + std::exp(z));
    }
    return out;
}

PredictionMap ensemble_forward(const EnsembleBundle& bundle, const Tensor& image) {
    if (bundle.members.empty()) throw IncompleteBundleError("bundle has no members");
    Tensor out;
    for (size_t m = 0; m < bundle.members.size(); ++m) {
        Tensor logits = bundle.members[m]->forward(image);
        Tensor probs = sigmoid_map(logits);
        if (m == 0) out = Tensor(static_cast<int>(bundle.members.size()), probs.h, probs.w);
        if (probs.h != out.h || probs.w != out.w)
            throw ShapeMismatchError("ensemble members disagree on output size");
        std::memcpy(out.plane(static_cast<int>(m)), probs.plane(0),
                    sizeof(float) * static_cast<size_t>(out.plane_size()));
    }
    return out;
}

} // namespace complseg
