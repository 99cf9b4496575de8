#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "homophily/estimator.hpp"
#include "homophily/graph.hpp"
#include "homophily/stats.hpp"
#include "homophily/sweep.hpp"

namespace homophily {

inline constexpr int kReportSchemaVersion = 1;

using Json = nlohmann::ordered_json;

namespace detail {

inline std::string format_fixed(double value, int decimals) {
    char buffer[64];
    const int written = std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
    return std::string(buffer, static_cast<std::size_t>(written));
}

/// Thresholds print like the result tables: small values (ratios) with
/// three decimals, large ones (counts) as integers.
inline std::string format_threshold(double value) {
    return value < 10.0 ? format_fixed(value, 3) : format_fixed(value, 0);
}

/// Integral medians print as integers, half-integers with one decimal.
inline std::string format_median(double value) {
    if (value == std::floor(value)) {
        return format_fixed(value, 0);
    }
    return format_fixed(value, 1);
}

inline std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string escaped = "\"";
    for (const char c : field) {
        if (c == '"') {
            escaped += '"';
        }
        escaped += c;
    }
    escaped += '"';
    return escaped;
}

/// Column-aligned plain-text table. The first column is left-aligned, the
/// rest right-aligned.
inline std::string render_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        if (widths.size() < row.size()) {
            widths.resize(row.size(), 0);
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) {
                out += "  ";
            }
            const std::size_t pad = widths[c] - row[c].size();
            if (c == 0) {
                out += row[c];
                if (c + 1 < row.size()) {
                    out += std::string(pad, ' ');
                }
            } else {
                out += std::string(pad, ' ');
                out += row[c];
            }
        }
        out += '\n';
    }
    return out;
}

inline Json eval_to_json_fields(const EvalResult& eval) {
    Json j;
    j["n_correct"] = eval.n_correct;
    j["n_estimable"] = eval.n_estimable;
    j["n_universe"] = eval.n_universe;
    if (eval.accuracy) {
        j["accuracy"] = *eval.accuracy;
    } else {
        j["accuracy"] = nullptr;
    }
    j["coverage"] = eval.coverage;
    return j;
}

inline Json number_or_null(double value) {
    if (std::isnan(value)) {
        return nullptr;
    }
    return value;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Graph statistics (one row per dataset)

struct NamedStats {
    std::string dataset;
    GraphStats stats;
};

inline Json stats_report_json(const std::vector<NamedStats>& rows) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = "graph_stats";
    Json datasets = Json::array();
    for (const auto& row : rows) {
        Json r;
        r["dataset"] = row.dataset;
        r["n_users"] = row.stats.n_users;
        r["n_isolated"] = row.stats.n_isolated;
        r["n_edges"] = row.stats.n_edges;
        r["mean_degree"] = row.stats.mean_degree;
        r["degree_stddev"] = row.stats.degree_stddev;
        r["median_degree"] = row.stats.median_degree;
        datasets.push_back(std::move(r));
    }
    j["datasets"] = std::move(datasets);
    return j;
}

inline std::string stats_report_csv(const std::vector<NamedStats>& rows) {
    std::string out = "dataset,n_users,n_isolated,n_edges,mean_degree,degree_stddev,median_degree\n";
    for (const auto& row : rows) {
        out += detail::csv_escape(row.dataset);
        out += ',' + std::to_string(row.stats.n_users);
        out += ',' + std::to_string(row.stats.n_isolated);
        out += ',' + std::to_string(row.stats.n_edges);
        out += ',' + detail::format_fixed(row.stats.mean_degree, 2);
        out += ',' + detail::format_fixed(row.stats.degree_stddev, 2);
        out += ',' + detail::format_median(row.stats.median_degree);
        out += '\n';
    }
    return out;
}

inline std::string stats_report_table(const std::vector<NamedStats>& rows) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"dataset", "users", "isolated", "edges", "mean_deg", "stddev_deg", "median_deg"});
    for (const auto& row : rows) {
        cells.push_back({row.dataset, std::to_string(row.stats.n_users),
                         std::to_string(row.stats.n_isolated), std::to_string(row.stats.n_edges),
                         detail::format_fixed(row.stats.mean_degree, 2),
                         detail::format_fixed(row.stats.degree_stddev, 2),
                         detail::format_median(row.stats.median_degree)});
    }
    return detail::render_table(cells);
}

// ---------------------------------------------------------------------------
// Attribute correlations and box statistics

struct AttributeSummary {
    std::string dataset;
    CorrelationMatrix correlations;
    BoxStats friends;
    BoxStats followers;
    BoxStats ratio;
};

inline Json attribute_report_json(const std::vector<AttributeSummary>& rows) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = "attribute_report";
    Json datasets = Json::array();
    for (const auto& row : rows) {
        Json r;
        r["dataset"] = row.dataset;
        Json corr;
        corr["friends_followers"] = detail::number_or_null(row.correlations.friends_followers);
        corr["friends_ratio"] = detail::number_or_null(row.correlations.friends_ratio);
        corr["followers_ratio"] = detail::number_or_null(row.correlations.followers_ratio);
        r["correlations"] = std::move(corr);
        Json box = Json::array();
        const std::pair<const char*, const BoxStats*> parts[] = {
            {"friends", &row.friends}, {"followers", &row.followers}, {"ratio", &row.ratio}};
        for (const auto& [name, stats] : parts) {
            Json b;
            b["attribute"] = name;
            b["p5"] = stats->p5;
            b["p25"] = stats->p25;
            b["p50"] = stats->p50;
            b["p75"] = stats->p75;
            b["p95"] = stats->p95;
            b["mean"] = stats->mean;
            b["n"] = stats->n;
            box.push_back(std::move(b));
        }
        r["box_stats"] = std::move(box);
        datasets.push_back(std::move(r));
    }
    j["datasets"] = std::move(datasets);
    return j;
}

inline std::string correlation_csv(const std::vector<AttributeSummary>& rows) {
    std::string out = "dataset,friends_followers,friends_ratio,followers_ratio\n";
    for (const auto& row : rows) {
        out += detail::csv_escape(row.dataset);
        out += ',' + detail::format_fixed(row.correlations.friends_followers, 2);
        out += ',' + detail::format_fixed(row.correlations.friends_ratio, 2);
        out += ',' + detail::format_fixed(row.correlations.followers_ratio, 2);
        out += '\n';
    }
    return out;
}

inline std::string box_stats_csv(const std::vector<AttributeSummary>& rows) {
    std::string out = "dataset,attribute,p5,p25,p50,p75,p95,mean\n";
    for (const auto& row : rows) {
        const std::pair<const char*, const BoxStats*> parts[] = {
            {"friends", &row.friends}, {"followers", &row.followers}, {"ratio", &row.ratio}};
        for (const auto& [name, stats] : parts) {
            out += detail::csv_escape(row.dataset);
            out += ',';
            out += name;
            for (const double v : {stats->p5, stats->p25, stats->p50, stats->p75, stats->p95,
                                   stats->mean}) {
                out += ',' + detail::format_fixed(v, 6);
            }
            out += '\n';
        }
    }
    return out;
}

inline std::string attribute_report_table(const std::vector<AttributeSummary>& rows) {
    std::vector<std::vector<std::string>> corr;
    corr.push_back({"dataset", "friends-followers", "friends-ratio", "followers-ratio"});
    for (const auto& row : rows) {
        corr.push_back({row.dataset, detail::format_fixed(row.correlations.friends_followers, 2),
                        detail::format_fixed(row.correlations.friends_ratio, 2),
                        detail::format_fixed(row.correlations.followers_ratio, 2)});
    }
    std::vector<std::vector<std::string>> box;
    box.push_back({"dataset", "attribute", "p5", "p25", "p50", "p75", "p95", "mean"});
    for (const auto& row : rows) {
        const std::pair<const char*, const BoxStats*> parts[] = {
            {"friends", &row.friends}, {"followers", &row.followers}, {"ratio", &row.ratio}};
        for (const auto& [name, stats] : parts) {
            box.push_back({row.dataset, name, detail::format_fixed(stats->p5, 2),
                           detail::format_fixed(stats->p25, 2), detail::format_fixed(stats->p50, 2),
                           detail::format_fixed(stats->p75, 2), detail::format_fixed(stats->p95, 2),
                           detail::format_fixed(stats->mean, 2)});
        }
    }
    return detail::render_table(corr) + "\n" + detail::render_table(box);
}

// ---------------------------------------------------------------------------
// Evaluation

inline Json eval_report_json(const EvalResult& eval) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = "evaluation";
    j.update(detail::eval_to_json_fields(eval));
    return j;
}

// ---------------------------------------------------------------------------
// Sweep

inline Json sweep_report_json(const std::string& dataset, const SweepResult& result,
                              const std::optional<SignificanceResult>& significance = {}) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = "sweep";
    j["dataset"] = dataset;
    j["attribute"] = std::string(attribute_name(result.attribute));
    j["direction"] = std::string(filter_direction_name(result.direction));
    j["coverage_floor"] = result.coverage_floor;
    j["baseline"] = detail::eval_to_json_fields(result.baseline);
    if (result.best) {
        Json best = detail::eval_to_json_fields(result.best->eval);
        Json with_threshold;
        with_threshold["threshold"] = result.best->threshold;
        with_threshold.update(best);
        with_threshold["significant"] = significance && significance->significant;
        j["best"] = std::move(with_threshold);
    } else {
        j["best"] = nullptr;
    }
    Json curve = Json::array();
    for (const CurvePoint& point : result.curve) {
        Json p;
        p["threshold"] = point.threshold;
        p.update(detail::eval_to_json_fields(point.eval));
        curve.push_back(std::move(p));
    }
    j["curve"] = std::move(curve);
    return j;
}

/// Curve CSV: the unfiltered baseline first (empty threshold field), then
/// one row per grid threshold.
inline std::string sweep_curve_csv(const SweepResult& result) {
    std::string out = "threshold,accuracy,coverage,n_correct,n_estimable\n";
    const auto append_eval = [&out](const EvalResult& eval) {
        out += ',';
        if (eval.accuracy) {
            out += detail::format_fixed(*eval.accuracy, 6);
        }
        out += ',' + detail::format_fixed(eval.coverage, 6);
        out += ',' + std::to_string(eval.n_correct);
        out += ',' + std::to_string(eval.n_estimable);
        out += '\n';
    };
    append_eval(result.baseline);
    for (const CurvePoint& point : result.curve) {
        out += detail::format_fixed(point.threshold, 9);
        append_eval(point.eval);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Experiment report (five-row result table)

inline Json experiment_report_json(const std::string& dataset, const ExperimentReport& report) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = "experiment";
    j["dataset"] = dataset;
    j["alpha"] = report.alpha;
    j["coverage_floor"] = report.coverage_floor;
    j["baseline"] = detail::eval_to_json_fields(report.baseline);
    Json rows = Json::array();
    for (const ExperimentRow& row : report.rows) {
        Json r;
        r["attribute"] =
            row.attribute ? Json(std::string(attribute_display_name(*row.attribute))) : Json(nullptr);
        r["filter"] = std::string(filter_direction_name(row.direction));
        r["threshold"] = row.threshold ? Json(*row.threshold) : Json(nullptr);
        r["accuracy"] = row.accuracy ? Json(*row.accuracy) : Json(nullptr);
        r["coverage"] = row.coverage ? Json(*row.coverage) : Json(nullptr);
        r["n_correct"] = row.n_correct;
        r["n_estimable"] = row.n_estimable;
        r["significant"] = row.significant;
        if (row.significance) {
            Json s;
            s["diff"] = row.significance->diff;
            s["ci_low"] = row.significance->ci_low;
            s["ci_high"] = row.significance->ci_high;
            s["z_alpha"] = row.significance->z_alpha;
            s["alpha"] = row.significance->alpha;
            r["significance"] = std::move(s);
        } else {
            r["significance"] = nullptr;
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j;
}

/// Result-table text rendering; significant accuracies carry a '*'.
inline std::string experiment_report_table(const std::string& dataset,
                                           const ExperimentReport& report) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"dataset", "attribute", "filter", "threshold", "accuracy", "coverage"});
    bool first = true;
    for (const ExperimentRow& row : report.rows) {
        std::vector<std::string> line;
        line.push_back(first ? dataset : "");
        first = false;
        line.push_back(row.attribute ? std::string(attribute_display_name(*row.attribute)) : "");
        line.push_back(std::string(filter_direction_name(row.direction)));
        line.push_back(row.threshold ? detail::format_threshold(*row.threshold) : "");
        line.push_back(row.accuracy
                           ? detail::format_fixed(*row.accuracy, 3) + (row.significant ? "*" : "")
                           : "");
        line.push_back(row.coverage ? detail::format_fixed(*row.coverage, 3) : "");
        cells.push_back(std::move(line));
    }
    return detail::render_table(cells);
}

} // namespace homophily
