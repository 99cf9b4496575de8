#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "homophily/attributes.hpp"

namespace homophily {

/// Five boxplot percentiles plus the mean, as used for the per-attribute
/// distribution summaries.
struct BoxStats {
    double p5 = 0.0;
    double p25 = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
    double p95 = 0.0;
    double mean = 0.0;
    std::uint64_t n = 0;

    friend bool operator==(const BoxStats&, const BoxStats&) = default;
};

/// Pairwise Spearman coefficients over the three attributes, in the usual
/// column order. Entries are NaN when one side of the pair is constant.
struct CorrelationMatrix {
    double friends_followers = 0.0;
    double friends_ratio = 0.0;
    double followers_ratio = 0.0;
};

namespace detail {

/// Percentile by linear interpolation at index q * (n - 1) of the sorted
/// vector.
inline double percentile_sorted(std::span<const double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lower = static_cast<std::size_t>(pos);
    if (lower + 1 >= sorted.size()) {
        return sorted.back();
    }
    const double frac = pos - static_cast<double>(lower);
    return sorted[lower] + frac * (sorted[lower + 1] - sorted[lower]);
}

/// Average ranks (1-based); ties share the mean rank of their run.
inline std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = shared;
        }
        i = j + 1;
    }
    return ranks;
}

inline bool is_constant(std::span<const double> values) {
    return std::adjacent_find(values.begin(), values.end(),
                              [](double a, double b) { return a != b; }) == values.end();
}

} // namespace detail

/// Boxplot summary of a value vector. Percentiles use linear interpolation
/// on the sorted data at index q * (n - 1).
inline BoxStats box_stats(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("box_stats: empty input");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    BoxStats stats;
    stats.n = sorted.size();
    stats.p5 = detail::percentile_sorted(sorted, 0.05);
    stats.p25 = detail::percentile_sorted(sorted, 0.25);
    stats.p50 = detail::percentile_sorted(sorted, 0.50);
    stats.p75 = detail::percentile_sorted(sorted, 0.75);
    stats.p95 = detail::percentile_sorted(sorted, 0.95);
    stats.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
                 static_cast<double>(sorted.size());
    return stats;
}

/// Spearman's rank correlation: Pearson correlation of average ranks, so
/// ties are handled correctly. Requires two vectors of equal length >= 2,
/// each with at least two distinct values.
inline double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("spearman: length mismatch");
    }
    if (x.size() < 2) {
        throw std::invalid_argument("spearman: need at least two observations");
    }
    if (detail::is_constant(x) || detail::is_constant(y)) {
        throw std::invalid_argument("spearman: constant vector");
    }
    const std::vector<double> rx = detail::average_ranks(x);
    const std::vector<double> ry = detail::average_ranks(y);

    const double n = static_cast<double>(x.size());
    const double mean_rank = (n + 1.0) / 2.0;
    double num = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double a = rx[i] - mean_rank;
        const double b = ry[i] - mean_rank;
        num += a * b;
        dx += a * a;
        dy += b * b;
    }
    return num / std::sqrt(dx * dy);
}

/// The three pairwise Spearman coefficients over all users of a table.
/// A degenerate pair (one side constant, e.g. every follow ratio equal)
/// yields NaN for that entry instead of failing the whole matrix.
inline CorrelationMatrix correlation_matrix(const AttributeTable& table) {
    if (table.size() < 2) {
        throw std::invalid_argument("correlation_matrix: need at least two users");
    }
    std::vector<double> friends;
    std::vector<double> followers;
    std::vector<double> ratio;
    friends.reserve(table.size());
    followers.reserve(table.size());
    ratio.reserve(table.size());
    for (const auto& r : table.records()) {
        friends.push_back(static_cast<double>(r.friends_count));
        followers.push_back(static_cast<double>(r.followers_count));
        ratio.push_back(r.follow_ratio);
    }
    const auto pair_or_nan = [](std::span<const double> a, std::span<const double> b) {
        if (detail::is_constant(a) || detail::is_constant(b)) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        return spearman(a, b);
    };
    CorrelationMatrix m;
    m.friends_followers = pair_or_nan(friends, followers);
    m.friends_ratio = pair_or_nan(friends, ratio);
    m.followers_ratio = pair_or_nan(followers, ratio);
    if (std::isnan(m.friends_followers) && std::isnan(m.friends_ratio) &&
        std::isnan(m.followers_ratio)) {
        throw std::invalid_argument("correlation_matrix: all attributes constant");
    }
    return m;
}

} // namespace homophily
