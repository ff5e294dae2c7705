#pragma once

#include <cstddef>
#include <vector>

namespace complseg {

// Dense CHW float tensor. Single image worth of data; batches are vectors of
// tensors so per-image work can run on independent workers.
struct Tensor {
    int ch = 0;
    int h = 0;
    int w = 0;
    std::vector<float> data;

    Tensor() = default;
    Tensor(int ch, int h, int w) : ch(ch), h(h), w(w), data(static_cast<size_t>(ch) * h * w, 0.f) {}

    static Tensor zeros(int ch, int h, int w) { return Tensor(ch, h, w); }

    float& at(int c, int y, int x) { return data[(static_cast<size_t>(c) * h + y) * w + x]; }
    float at(int c, int y, int x) const { return data[(static_cast<size_t>(c) * h + y) * w + x]; }

    float* plane(int c) { return data.data() + static_cast<size_t>(c) * h * w; }
    const float* plane(int c) const { return data.data() + static_cast<size_t>(c) * h * w; }

    size_t size() const { return data.size(); }
    int plane_size() const { return h * w; }

    bool same_shape(const Tensor& o) const { return ch == o.ch && h == o.h && w == o.w; }

    void fill(float v) { std::fill(data.begin(), data.end(), v); }
};

// Per-pixel, per-class independent probabilities in (0,1); same layout as the
// logits they are derived from.
using PredictionMap = Tensor;

} // namespace complseg
