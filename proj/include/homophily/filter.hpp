#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "homophily/attributes.hpp"
#include "homophily/error.hpp"

namespace homophily {

enum class FilterDirection { none, high_cut, low_cut };

inline std::string_view filter_direction_name(FilterDirection d) {
    switch (d) {
    case FilterDirection::none: return "none";
    case FilterDirection::high_cut: return "HighCut";
    case FilterDirection::low_cut: return "LowCut";
    }
    return "?";
}

inline FilterDirection filter_direction_from_name(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "highcut" || lower == "high_cut") return FilterDirection::high_cut;
    if (lower == "lowcut" || lower == "low_cut") return FilterDirection::low_cut;
    if (lower == "none") return FilterDirection::none;
    throw ValidationError("unknown filter direction '" + std::string(name) +
                          "' (expected highcut, lowcut or none)");
}

/// An attribute filter at threshold theta. HighCut keeps strictly smaller
/// values, LowCut strictly larger ones, none keeps everything.
struct FilterSpec {
    Attribute attribute = Attribute::ratio;
    FilterDirection direction = FilterDirection::none;
    double threshold = 0.0;

    static FilterSpec high_cut(Attribute a, double theta) {
        if (!std::isfinite(theta)) {
            throw std::invalid_argument("FilterSpec: threshold must be finite");
        }
        return {a, FilterDirection::high_cut, theta};
    }

    static FilterSpec low_cut(Attribute a, double theta) {
        if (!std::isfinite(theta)) {
            throw std::invalid_argument("FilterSpec: threshold must be finite");
        }
        return {a, FilterDirection::low_cut, theta};
    }

    static FilterSpec none(Attribute a = Attribute::ratio) {
        return {a, FilterDirection::none, 0.0};
    }

    bool keeps(double value) const {
        switch (direction) {
        case FilterDirection::none: return true;
        case FilterDirection::high_cut: return value < threshold;
        case FilterDirection::low_cut: return value > threshold;
        }
        return true;
    }
};

/// Users of the universe kept by the filter, ascending. Every universe
/// member must have an attribute record.
inline std::vector<UserId> apply_filter(std::span<const UserId> universe,
                                        const AttributeTable& table, const FilterSpec& f) {
    std::vector<UserId> kept;
    kept.reserve(universe.size());
    for (const UserId id : universe) {
        if (f.keeps(table.value(id, f.attribute))) {
            kept.push_back(id);
        }
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    return kept;
}

/// 101 thresholds spanning the positive value range at equal logarithmic
/// intervals: point k is lo * (hi/lo)^(k/100). Zeros are ignored when
/// deriving the lower endpoint; a single positive value collapses the grid
/// to 101 copies of it.
inline std::vector<double> threshold_grid(std::span<const double> values) {
    double lo = 0.0;
    double hi = 0.0;
    bool any_positive = false;
    for (const double v : values) {
        if (v <= 0.0) {
            continue;
        }
        if (!any_positive) {
            lo = hi = v;
            any_positive = true;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!any_positive) {
        throw std::invalid_argument("threshold_grid: no positive values");
    }
    std::vector<double> grid(101);
    const double log_ratio = std::log(hi / lo);
    for (int k = 0; k <= 100; ++k) {
        grid[static_cast<std::size_t>(k)] = lo * std::exp(log_ratio * (static_cast<double>(k) / 100.0));
    }
    grid.front() = lo;
    grid.back() = hi;
    // Rounding must not make the sequence dip.
    for (std::size_t k = 1; k < grid.size(); ++k) {
        grid[k] = std::max(grid[k], grid[k - 1]);
    }
    return grid;
}

} // namespace homophily
