// homophily: measure location homophily on a mutual-friend social graph by
// evaluating majority-vote home-location estimation under attribute filters.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "homophily/attributes.hpp"
#include "homophily/error.hpp"
#include "homophily/estimator.hpp"
#include "homophily/filter.hpp"
#include "homophily/graph.hpp"
#include "homophily/labels.hpp"
#include "homophily/report.hpp"
#include "homophily/significance.hpp"
#include "homophily/stats.hpp"
#include "homophily/sweep.hpp"
#include "homophily/synth.hpp"

namespace {

namespace fs = std::filesystem;
using namespace homophily;

/// Wraps library errors with the file they came from.
class FileError : public Error {
  public:
    FileError(const std::string& path, const std::string& what) : Error(path + ": " + what) {}
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path);
    }
    return in;
}

SocialGraph load_graph_file(const std::string& path, std::span<const UserId> universe) {
    auto in = open_input(path);
    try {
        return universe.empty() ? load_graph(in) : load_graph(in, universe);
    } catch (const Error& e) {
        throw FileError(path, e.what());
    }
}

LabelMap load_labels_file(const std::string& path) {
    auto in = open_input(path);
    try {
        return load_labels(in);
    } catch (const Error& e) {
        throw FileError(path, e.what());
    }
}

AttributeTable load_attributes_file(const std::string& path) {
    auto in = open_input(path);
    try {
        return load_attributes(in);
    } catch (const Error& e) {
        throw FileError(path, e.what());
    }
}

/// Dataset label for report rows: --name when given, else the stem of the
/// edge (or attribute) file's parent directory or file name.
std::string dataset_name(const std::vector<std::string>& names, std::size_t index,
                         const std::string& path) {
    if (index < names.size()) {
        return names[index];
    }
    const fs::path p(path);
    const std::string stem = p.stem().string();
    if ((stem == "edges" || stem == "labels" || stem == "attributes") && p.has_parent_path()) {
        const std::string dir = p.parent_path().filename().string();
        if (!dir.empty()) {
            return dir;
        }
    }
    return stem;
}

void check_range(double coverage_floor, double alpha) {
    if (!(coverage_floor > 0.0 && coverage_floor < 1.0)) {
        throw ValidationError("--coverage-floor must be in (0, 1)");
    }
    if (!(alpha > 0.0 && alpha <= 0.5)) {
        throw ValidationError("--alpha must be in (0, 0.5]");
    }
}

unsigned resolve_workers(const std::string& workers) {
    if (workers == "auto") {
        const unsigned n = std::thread::hardware_concurrency();
        return n == 0 ? 1 : n;
    }
    const int parsed = std::stoi(workers);
    if (parsed < 1) {
        throw ValidationError("--workers must be at least 1 or 'auto'");
    }
    return static_cast<unsigned>(parsed);
}

void write_output(const std::string& text, const std::optional<std::string>& out_path) {
    if (!out_path) {
        std::cout << text;
        return;
    }
    std::ofstream out(*out_path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + *out_path);
    }
    out << text;
}

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

/// Loads a (edges, labels) pair. The label file, when present, defines the
/// user universe so isolated labeled users are part of V.
struct Dataset {
    SocialGraph graph;
    LabelMap labels;
};

Dataset load_dataset(const std::string& edges_path, const std::string& labels_path) {
    Dataset ds;
    ds.labels = load_labels_file(labels_path);
    const std::vector<UserId> universe = ds.labels.users();
    ds.graph = load_graph_file(edges_path, universe);
    return ds;
}

int run(int argc, char** argv) {
    CLI::App app{"Location homophily analysis on mutual-friend social graphs"};
    app.require_subcommand(1);

    // --- stats ---------------------------------------------------------
    auto* stats_cmd = app.add_subcommand(
        "stats", "Graph statistics (users, isolated, edges, degree moments) per dataset");
    std::vector<std::string> stats_edges;
    std::vector<std::string> stats_labels;
    std::vector<std::string> stats_names;
    std::string stats_format = "table";
    std::optional<std::string> stats_out;
    stats_cmd->add_option("--edges", stats_edges, "Edge list file (repeatable)")->required();
    stats_cmd->add_option("--labels", stats_labels,
                          "Label file per dataset; defines the user universe");
    stats_cmd->add_option("--name", stats_names, "Dataset label per --edges entry");
    stats_cmd->add_option("--format", stats_format, "Output format")
        ->check(CLI::IsMember({"table", "json", "csv"}));
    stats_cmd->add_option("--out", stats_out, "Write the report to this file instead of stdout");

    // --- correlate -----------------------------------------------------
    auto* correlate_cmd = app.add_subcommand(
        "correlate", "Attribute box statistics and pairwise Spearman correlations");
    std::vector<std::string> corr_attributes;
    std::vector<std::string> corr_names;
    std::string corr_format = "table";
    std::optional<std::string> corr_out;
    correlate_cmd->add_option("--attributes", corr_attributes, "Attribute file (repeatable)")
        ->required();
    correlate_cmd->add_option("--name", corr_names, "Dataset label per --attributes entry");
    correlate_cmd->add_option("--format", corr_format, "Output format")
        ->check(CLI::IsMember({"table", "json", "csv"}));
    correlate_cmd->add_option("--out", corr_out, "Write the report to this file instead of stdout");

    // --- evaluate ------------------------------------------------------
    auto* evaluate_cmd = app.add_subcommand(
        "evaluate", "Leave-one-out majority-vote evaluation over all labeled users");
    std::string eval_edges;
    std::string eval_labels;
    std::string eval_workers = "1";
    std::optional<std::string> eval_out;
    evaluate_cmd->add_option("--edges", eval_edges, "Edge list file")->required();
    evaluate_cmd->add_option("--labels", eval_labels, "Label file")->required();
    evaluate_cmd->add_option("--workers", eval_workers, "Worker threads or 'auto'");
    evaluate_cmd->add_option("--out", eval_out, "Write the report to this file instead of stdout");

    // --- sweep ---------------------------------------------------------
    auto* sweep_cmd =
        app.add_subcommand("sweep", "Threshold sweep of one attribute filter");
    std::string sweep_edges;
    std::string sweep_labels;
    std::string sweep_attributes;
    std::string sweep_attribute = "ratio";
    std::string sweep_direction = "highcut";
    std::string sweep_workers = "1";
    std::string sweep_format = "json";
    double sweep_floor = 0.3;
    double sweep_alpha = 0.05;
    std::optional<std::string> sweep_name;
    std::optional<std::string> sweep_curve_out;
    sweep_cmd->add_option("--edges", sweep_edges, "Edge list file")->required();
    sweep_cmd->add_option("--labels", sweep_labels, "Label file")->required();
    sweep_cmd->add_option("--attributes", sweep_attributes, "Attribute file")->required();
    sweep_cmd->add_option("--attribute", sweep_attribute, "friends, followers or ratio");
    sweep_cmd->add_option("--direction", sweep_direction, "highcut, lowcut or none");
    sweep_cmd->add_option("--coverage-floor", sweep_floor, "Coverage floor for the best point");
    sweep_cmd->add_option("--alpha", sweep_alpha, "Significance level for starring the best point");
    sweep_cmd->add_option("--workers", sweep_workers, "Worker threads or 'auto'");
    sweep_cmd->add_option("--format", sweep_format, "Summary format")
        ->check(CLI::IsMember({"json", "table"}));
    sweep_cmd->add_option("--name", sweep_name, "Dataset label");
    sweep_cmd->add_option("--out", sweep_curve_out, "Write the sweep curve CSV to this file");

    // --- report --------------------------------------------------------
    auto* report_cmd = app.add_subcommand(
        "report", "Five-row filter experiment with significance marks");
    std::string report_edges;
    std::string report_labels;
    std::string report_attributes;
    std::string report_workers = "1";
    std::string report_format = "table";
    double report_floor = 0.3;
    double report_alpha = 0.05;
    std::optional<std::string> report_name;
    std::optional<std::string> report_out;
    report_cmd->add_option("--edges", report_edges, "Edge list file")->required();
    report_cmd->add_option("--labels", report_labels, "Label file")->required();
    report_cmd->add_option("--attributes", report_attributes, "Attribute file")->required();
    report_cmd->add_option("--coverage-floor", report_floor, "Coverage floor for best points");
    report_cmd->add_option("--alpha", report_alpha, "Significance level");
    report_cmd->add_option("--workers", report_workers, "Worker threads or 'auto'");
    report_cmd->add_option("--format", report_format, "Output format")
        ->check(CLI::IsMember({"table", "json"}));
    report_cmd->add_option("--name", report_name, "Dataset label");
    report_cmd->add_option("--out", report_out, "Write the report to this file instead of stdout");

    // --- synth ---------------------------------------------------------
    auto* synth_cmd = app.add_subcommand(
        "synth", "Generate a synthetic dataset with a planted homophily signal");
    std::string synth_config;
    std::string synth_out;
    std::optional<std::uint64_t> synth_seed;
    synth_cmd->add_option("--config", synth_config, "Generator config JSON")->required();
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();
    synth_cmd->add_option("--seed", synth_seed, "Override the config seed");

    CLI11_PARSE(app, argc, argv);

    if (stats_cmd->parsed()) {
        if (!stats_labels.empty() && stats_labels.size() != stats_edges.size()) {
            throw ValidationError("--labels count must match --edges count");
        }
        std::vector<NamedStats> rows;
        for (std::size_t i = 0; i < stats_edges.size(); ++i) {
            SocialGraph graph;
            if (!stats_labels.empty()) {
                graph = load_dataset(stats_edges[i], stats_labels[i]).graph;
            } else {
                graph = load_graph_file(stats_edges[i], {});
            }
            rows.push_back({dataset_name(stats_names, i, stats_edges[i]), graph_stats(graph)});
        }
        if (stats_format == "json") {
            write_output(json_text(stats_report_json(rows)), stats_out);
        } else if (stats_format == "csv") {
            write_output(stats_report_csv(rows), stats_out);
        } else {
            write_output(stats_report_table(rows), stats_out);
        }
        return 0;
    }

    if (correlate_cmd->parsed()) {
        std::vector<AttributeSummary> rows;
        for (std::size_t i = 0; i < corr_attributes.size(); ++i) {
            const AttributeTable table = load_attributes_file(corr_attributes[i]);
            if (table.empty()) {
                throw ValidationError(corr_attributes[i] + ": attribute table is empty");
            }
            AttributeSummary summary;
            summary.dataset = dataset_name(corr_names, i, corr_attributes[i]);
            summary.correlations = correlation_matrix(table);
            std::vector<double> friends;
            std::vector<double> followers;
            std::vector<double> ratio;
            for (const auto& r : table.records()) {
                friends.push_back(static_cast<double>(r.friends_count));
                followers.push_back(static_cast<double>(r.followers_count));
                ratio.push_back(r.follow_ratio);
            }
            summary.friends = box_stats(friends);
            summary.followers = box_stats(followers);
            summary.ratio = box_stats(ratio);
            rows.push_back(std::move(summary));
        }
        if (corr_format == "json") {
            write_output(json_text(attribute_report_json(rows)), corr_out);
        } else if (corr_format == "csv") {
            write_output(correlation_csv(rows) + "\n" + box_stats_csv(rows), corr_out);
        } else {
            write_output(attribute_report_table(rows), corr_out);
        }
        return 0;
    }

    if (evaluate_cmd->parsed()) {
        const Dataset ds = load_dataset(eval_edges, eval_labels);
        const EvalResult result =
            evaluate(ds.graph, ds.labels, ds.graph.users(), resolve_workers(eval_workers));
        if (result.n_estimable == 0) {
            std::cerr << "warning: no estimable users (every target is isolated)\n";
        }
        write_output(json_text(eval_report_json(result)), eval_out);
        return 0;
    }

    if (sweep_cmd->parsed()) {
        check_range(sweep_floor, sweep_alpha);
        const Dataset ds = load_dataset(sweep_edges, sweep_labels);
        const AttributeTable table = load_attributes_file(sweep_attributes);
        SweepOptions options;
        options.coverage_floor = sweep_floor;
        options.workers = resolve_workers(sweep_workers);
        options.progress = [](std::size_t done, std::size_t total) {
            if (done % 10 == 0 || done == total) {
                std::cerr << "sweep: " << done << "/" << total << " thresholds\r";
                if (done == total) {
                    std::cerr << '\n';
                }
            }
        };
        const SweepResult result =
            sweep(ds.graph, ds.labels, table, attribute_from_name(sweep_attribute),
                  filter_direction_from_name(sweep_direction), options);
        if (sweep_curve_out) {
            write_output(sweep_curve_csv(result), sweep_curve_out);
        }
        std::optional<SignificanceResult> significance;
        if (result.best && result.baseline.n_estimable > 0 && result.best->eval.n_estimable > 0) {
            significance = compare_accuracy(
                {result.baseline.n_correct, result.baseline.n_estimable},
                {result.best->eval.n_correct, result.best->eval.n_estimable}, sweep_alpha);
        }
        const std::string name = sweep_name.value_or(dataset_name({}, 0, sweep_edges));
        if (sweep_format == "table") {
            std::vector<std::vector<std::string>> cells;
            cells.push_back({"point", "threshold", "accuracy", "coverage"});
            const auto eval_cells = [](const EvalResult& e) {
                return std::pair(e.accuracy ? homophily::detail::format_fixed(*e.accuracy, 3)
                                            : std::string(),
                                 homophily::detail::format_fixed(e.coverage, 3));
            };
            const auto [basacc, bascov] = eval_cells(result.baseline);
            cells.push_back({"baseline", "", basacc, bascov});
            if (result.best) {
                auto [acc, cov] = eval_cells(result.best->eval);
                if (significance && significance->significant) {
                    acc += "*";
                }
                cells.push_back({"best", homophily::detail::format_threshold(result.best->threshold),
                                 acc, cov});
            }
            write_output(homophily::detail::render_table(cells), std::nullopt);
        } else {
            write_output(json_text(sweep_report_json(name, result, significance)), std::nullopt);
        }
        return 0;
    }

    if (report_cmd->parsed()) {
        check_range(report_floor, report_alpha);
        const Dataset ds = load_dataset(report_edges, report_labels);
        const AttributeTable table = load_attributes_file(report_attributes);
        ExperimentOptions options;
        options.alpha = report_alpha;
        options.coverage_floor = report_floor;
        options.workers = resolve_workers(report_workers);
        options.progress = [](std::size_t done, std::size_t total) {
            if (done % 50 == 0 || done == total) {
                std::cerr << "report: " << done << "/" << total << " evaluations\r";
                if (done == total) {
                    std::cerr << '\n';
                }
            }
        };
        const ExperimentReport report = run_experiment(ds.graph, ds.labels, table, options);
        const std::string name = report_name.value_or(dataset_name({}, 0, report_edges));
        if (report_format == "json") {
            write_output(json_text(experiment_report_json(name, report)), report_out);
        } else {
            write_output(experiment_report_table(name, report), report_out);
        }
        return 0;
    }

    if (synth_cmd->parsed()) {
        auto in = open_input(synth_config);
        nlohmann::json config_json;
        try {
            config_json = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw FileError(synth_config, e.what());
        }
        SynthConfig cfg = synth_config_from_json(config_json);
        if (synth_seed) {
            cfg.seed = *synth_seed;
        }
        const SynthDataset dataset = generate(cfg);
        emit(dataset, synth_out);
        std::cerr << "synth: wrote " << dataset.graph.user_count() << " users, "
                  << dataset.graph.edge_count() << " edges to " << synth_out << '\n';
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
