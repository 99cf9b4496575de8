#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homophily/attributes.hpp"
#include "homophily/estimator.hpp"
#include "homophily/filter.hpp"
#include "homophily/graph.hpp"
#include "homophily/labels.hpp"
#include "homophily/significance.hpp"

namespace homophily {

struct CurvePoint {
    double threshold = 0.0;
    EvalResult eval;
};

/// Threshold sweep of one attribute filter: the full accuracy/coverage curve
/// plus the accuracy-maximizing point among those clearing the coverage
/// floor. best is absent when no point qualifies.
struct SweepResult {
    Attribute attribute = Attribute::ratio;
    FilterDirection direction = FilterDirection::none;
    double coverage_floor = 0.3;
    EvalResult baseline;
    std::vector<CurvePoint> curve;
    std::optional<CurvePoint> best;
};

struct SweepOptions {
    double coverage_floor = 0.3;
    unsigned workers = 1;
    /// Called after each evaluated grid point with (done, total).
    std::function<void(std::size_t, std::size_t)> progress;
};

namespace detail {

/// Picks the accuracy argmax among curve points with coverage above the
/// floor; ties go to the larger coverage, then the smaller threshold.
inline std::optional<CurvePoint> best_point(std::span<const CurvePoint> curve,
                                            double coverage_floor) {
    std::optional<CurvePoint> best;
    for (const CurvePoint& point : curve) {
        if (!(point.eval.coverage > coverage_floor) || !point.eval.accuracy) {
            continue;
        }
        if (!best) {
            best = point;
            continue;
        }
        const double acc = *point.eval.accuracy;
        const double best_acc = *best->eval.accuracy;
        if (acc > best_acc ||
            (acc == best_acc && (point.eval.coverage > best->eval.coverage ||
                                 (point.eval.coverage == best->eval.coverage &&
                                  point.threshold < best->threshold)))) {
            best = point;
        }
    }
    return best;
}

} // namespace detail

/// Evaluates the unfiltered baseline and then the filtered target set at
/// every grid threshold. The graph itself is never filtered: users cut from
/// the target set still vote as neighbors. With direction none the result
/// is just the baseline.
inline SweepResult sweep(const SocialGraph& g, const LabelMap& labels,
                         const AttributeTable& table, Attribute attribute,
                         FilterDirection direction, const SweepOptions& options = {}) {
    SweepResult result;
    result.attribute = attribute;
    result.direction = direction;
    result.coverage_floor = options.coverage_floor;

    const detail::EvalContext ctx(g, labels);

    std::vector<SocialGraph::NodeIndex> all_nodes(g.user_count());
    for (std::size_t i = 0; i < g.user_count(); ++i) {
        all_nodes[i] = static_cast<SocialGraph::NodeIndex>(i);
    }
    result.baseline = detail::evaluate_nodes(ctx, all_nodes, options.workers);
    if (direction == FilterDirection::none) {
        return result;
    }

    // Attribute values aligned to node indices; also validates that every
    // user has a record.
    const std::vector<double> values = attribute_values(table, attribute, g.users());
    const std::vector<double> grid = threshold_grid(values);

    result.curve.reserve(grid.size());
    std::vector<SocialGraph::NodeIndex> kept;
    kept.reserve(g.user_count());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const FilterSpec spec{attribute, direction, grid[k]};
        kept.clear();
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (spec.keeps(values[i])) {
                kept.push_back(static_cast<SocialGraph::NodeIndex>(i));
            }
        }
        result.curve.push_back({grid[k], detail::evaluate_nodes(ctx, kept, options.workers)});
        if (options.progress) {
            options.progress(k + 1, grid.size());
        }
    }
    result.best = detail::best_point(result.curve, options.coverage_floor);
    return result;
}

/// One row of the experiment report. The unfiltered row has no attribute,
/// threshold or significance entry.
struct ExperimentRow {
    std::optional<Attribute> attribute;
    FilterDirection direction = FilterDirection::none;
    std::optional<double> threshold;
    std::optional<double> accuracy;
    std::optional<double> coverage;
    std::uint64_t n_correct = 0;
    std::uint64_t n_estimable = 0;
    bool significant = false;
    std::optional<SignificanceResult> significance;
};

struct ExperimentReport {
    double alpha = 0.05;
    double coverage_floor = 0.3;
    EvalResult baseline;
    std::vector<ExperimentRow> rows;
};

struct ExperimentOptions {
    double alpha = 0.05;
    double coverage_floor = 0.3;
    unsigned workers = 1;
    std::function<void(std::size_t, std::size_t)> progress;
};

/// Runs the five standard rows: HighCut on #friends, #followers and the
/// follow ratio, LowCut on the follow ratio, and the unfiltered baseline.
/// Each filtered row is the best sweep point, starred when its accuracy
/// significantly exceeds the baseline.
inline ExperimentReport run_experiment(const SocialGraph& g, const LabelMap& labels,
                                       const AttributeTable& table,
                                       const ExperimentOptions& options = {}) {
    ExperimentReport report;
    report.alpha = options.alpha;
    report.coverage_floor = options.coverage_floor;

    const std::pair<Attribute, FilterDirection> filters[] = {
        {Attribute::friends, FilterDirection::high_cut},
        {Attribute::followers, FilterDirection::high_cut},
        {Attribute::ratio, FilterDirection::high_cut},
        {Attribute::ratio, FilterDirection::low_cut},
    };

    SweepOptions sweep_options;
    sweep_options.coverage_floor = options.coverage_floor;
    sweep_options.workers = options.workers;

    bool have_baseline = false;
    std::size_t done = 0;
    for (const auto& [attribute, direction] : filters) {
        if (options.progress) {
            sweep_options.progress = [&](std::size_t k, std::size_t total) {
                options.progress(done * 101 + k, 4 * 101);
                (void)total;
            };
        }
        const SweepResult swept = sweep(g, labels, table, attribute, direction, sweep_options);
        if (!have_baseline) {
            report.baseline = swept.baseline;
            have_baseline = true;
        }
        ExperimentRow row;
        row.attribute = attribute;
        row.direction = direction;
        if (swept.best) {
            row.threshold = swept.best->threshold;
            row.accuracy = swept.best->eval.accuracy;
            row.coverage = swept.best->eval.coverage;
            row.n_correct = swept.best->eval.n_correct;
            row.n_estimable = swept.best->eval.n_estimable;
            if (swept.baseline.n_estimable > 0 && swept.best->eval.n_estimable > 0) {
                row.significance = compare_accuracy(
                    {swept.baseline.n_correct, swept.baseline.n_estimable},
                    {swept.best->eval.n_correct, swept.best->eval.n_estimable}, options.alpha);
                row.significant = row.significance->significant;
            }
        }
        report.rows.push_back(std::move(row));
        ++done;
    }

    ExperimentRow none_row;
    none_row.direction = FilterDirection::none;
    none_row.accuracy = report.baseline.accuracy;
    none_row.coverage = report.baseline.coverage;
    none_row.n_correct = report.baseline.n_correct;
    none_row.n_estimable = report.baseline.n_estimable;
    report.rows.push_back(std::move(none_row));
    return report;
}

} // namespace homophily
