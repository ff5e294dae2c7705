#include "complseg/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "complseg/errors.hpp"

namespace complseg {

namespace {

constexpr int kExactLimit = 25;

// average ranks of |d|, ties sharing the mean of their rank range
std::vector<double> average_ranks(const std::vector<double>& magnitudes) {
    const size_t n = magnitudes.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t i, size_t j) { return magnitudes[i] < magnitudes[j]; });
    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && magnitudes[order[j + 1]] == magnitudes[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0; // ranks are 1-based
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

// Exact two-sided p over the 2^n equally likely sign assignments, by dynamic
// programming over the doubled (integral) rank sums.
double exact_p(const std::vector<double>& ranks, double w_plus) {
    std::vector<long long> scaled(ranks.size());
    long long total = 0;
    for (size_t i = 0; i < ranks.size(); ++i) {
        scaled[i] = llround(ranks[i] * 2.0);
        total += scaled[i];
    }
    std::vector<double> dist(static_cast<size_t>(total) + 1, 0.0);
    dist[0] = 1.0;
    long long reach = 0;
    for (long long r : scaled) {
        for (long long s = reach; s >= 0; --s) {
            if (dist[static_cast<size_t>(s)] > 0.0)
                dist[static_cast<size_t>(s + r)] += dist[static_cast<size_t>(s)];
        }
        reach += r;
    }
    const double count = std::pow(2.0, static_cast<double>(ranks.size()));
    const long long w = llround(w_plus * 2.0);
    double le = 0.0, ge = 0.0;
    for (long long s = 0; s <= total; ++s) {
        const double c = dist[static_cast<size_t>(s)];
        if (s <= w) le += c;
        if (s >= w) ge += c;
    }
    return std::min(1.0, 2.0 * std::min(le, ge) / count);
}

double normal_approx_p(const std::vector<double>& ranks, double w_plus) {
    const double n = static_cast<double>(ranks.size());
    const double mu = n * (n + 1.0) / 4.0;
    double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
    // tie correction: subtract sum(t^3 - t)/48 per tie group
    std::vector<double> sorted(ranks);
    std::sort(sorted.begin(), sorted.end());
    size_t i = 0;
    while (i < sorted.size()) {
        size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        var -= (t * t * t - t) / 48.0;
        i = j + 1;
    }
    if (var <= 0.0) return 1.0;
    double d = w_plus - mu;
    // continuity correction toward the mean
    if (d > 0.5) d -= 0.5;
    else if (d < -0.5) d += 0.5;
    else d = 0.0;
    const double z = d / std::sqrt(var);
    return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
}

} // namespace

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ShapeMismatchError("paired samples differ in length");
    std::vector<double> diffs;
    diffs.reserve(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    const int n = static_cast<int>(diffs.size());
    if (n < 5) throw TooFewPairsError(n);

    std::vector<double> magnitudes(diffs.size());
    for (size_t i = 0; i < diffs.size(); ++i) magnitudes[i] = std::abs(diffs[i]);
    const std::vector<double> ranks = average_ranks(magnitudes);

    double w_plus = 0.0;
    for (size_t i = 0; i < diffs.size(); ++i)
        if (diffs[i] > 0.0) w_plus += ranks[i];

    WilcoxonResult out;
    out.n = n;
    out.w_plus = w_plus;
    out.exact = n <= kExactLimit;
    out.p_value = out.exact ? exact_p(ranks, w_plus) : normal_approx_p(ranks, w_plus);
    return out;
}

} // namespace complseg
