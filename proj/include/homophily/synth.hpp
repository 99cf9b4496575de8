#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "homophily/attributes.hpp"
#include "homophily/error.hpp"
#include "homophily/graph.hpp"
#include "homophily/labels.hpp"
#include "homophily/rng.hpp"

namespace homophily {

inline constexpr int kManifestFormatVersion = 1;

/// Configuration of the planted-homophily dataset generator.
///
/// Regions are assigned uniformly. Each active user draws a target mutual
/// degree from a log-normal law and attributes so that the log follow ratio
/// has spread ratio_log_sigma. Each tie the user initiates lands in the
/// user's own region with probability
///
///   p_local(u) = clamp(locality_base * logistic(beta0 - beta1 * z_u), 0, 1)
///
/// where z_u is the centered log of the coupled attribute (the log follow
/// ratio by default). beta1 = 0 decouples locality from the attribute;
/// larger beta1 plants a stronger negative dependence.
struct SynthConfig {
    std::uint64_t n_users = 0;
    std::uint32_t n_regions = 20;
    std::uint64_t seed = 0;

    double degree_log_mean = 2.3;
    double degree_log_sigma = 0.6;

    double friends_log_mean = 5.0;
    double friends_log_sigma = 1.1;
    double ratio_log_sigma = 1.0;

    double beta0 = 0.0;
    double beta1 = 0.0;
    double locality_base = 0.9;
    double isolated_fraction = 0.45;

    /// Which attribute locality couples to ("ratio" or "friends").
    std::string coupling = "ratio";

    friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

struct SynthDataset {
    SocialGraph graph;
    LabelMap labels;
    AttributeTable attributes;
    SynthConfig manifest;
};

inline void to_json(nlohmann::ordered_json& j, const SynthConfig& cfg) {
    j = nlohmann::ordered_json{{"n_users", cfg.n_users},
                               {"n_regions", cfg.n_regions},
                               {"seed", cfg.seed},
                               {"degree_log_mean", cfg.degree_log_mean},
                               {"degree_log_sigma", cfg.degree_log_sigma},
                               {"friends_log_mean", cfg.friends_log_mean},
                               {"friends_log_sigma", cfg.friends_log_sigma},
                               {"ratio_log_sigma", cfg.ratio_log_sigma},
                               {"beta0", cfg.beta0},
                               {"beta1", cfg.beta1},
                               {"locality_base", cfg.locality_base},
                               {"isolated_fraction", cfg.isolated_fraction},
                               {"coupling", cfg.coupling}};
}

inline SynthConfig synth_config_from_json(const nlohmann::json& j) {
    SynthConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "n_users") cfg.n_users = value.get<std::uint64_t>();
        else if (key == "n_regions") cfg.n_regions = value.get<std::uint32_t>();
        else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else if (key == "degree_log_mean") cfg.degree_log_mean = value.get<double>();
        else if (key == "degree_log_sigma") cfg.degree_log_sigma = value.get<double>();
        else if (key == "friends_log_mean") cfg.friends_log_mean = value.get<double>();
        else if (key == "friends_log_sigma") cfg.friends_log_sigma = value.get<double>();
        else if (key == "ratio_log_sigma") cfg.ratio_log_sigma = value.get<double>();
        else if (key == "beta0") cfg.beta0 = value.get<double>();
        else if (key == "beta1") cfg.beta1 = value.get<double>();
        else if (key == "locality_base") cfg.locality_base = value.get<double>();
        else if (key == "isolated_fraction") cfg.isolated_fraction = value.get<double>();
        else if (key == "coupling") cfg.coupling = value.get<std::string>();
        else if (key == "format_version") { /* accepted in manifests */ }
        else {
            throw ValidationError("unknown synth config field '" + key + "'");
        }
    }
    return cfg;
}

namespace detail {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline void validate(const SynthConfig& cfg) {
    if (cfg.n_users < 2) {
        throw GenerationError("n_users must be at least 2");
    }
    if (cfg.n_regions < 2) {
        throw GenerationError("n_regions must be at least 2");
    }
    if (!(cfg.locality_base > 0.0 && cfg.locality_base < 1.0)) {
        throw GenerationError("locality_base must be in (0, 1)");
    }
    if (cfg.beta1 < 0.0) {
        throw GenerationError("beta1 must be non-negative");
    }
    if (!(cfg.isolated_fraction >= 0.0 && cfg.isolated_fraction < 1.0)) {
        throw GenerationError("isolated_fraction must be in [0, 1)");
    }
    if (cfg.degree_log_sigma < 0.0 || cfg.friends_log_sigma < 0.0 || cfg.ratio_log_sigma < 0.0) {
        throw GenerationError("log-normal sigmas must be non-negative");
    }
    if (cfg.coupling != "ratio" && cfg.coupling != "friends") {
        throw GenerationError("coupling must be 'ratio' or 'friends'");
    }
    if (cfg.n_users < 2 * cfg.n_regions) {
        throw GenerationError("n_users too small for n_regions");
    }
}

inline std::string region_token(std::uint32_t region, std::uint32_t n_regions) {
    std::size_t width = 1;
    for (std::uint32_t upper = n_regions - 1; upper >= 10; upper /= 10) {
        ++width;
    }
    std::string digits = std::to_string(region);
    return "r" + std::string(width - digits.size(), '0') + digits;
}

inline std::uint64_t round_positive(double x) {
    if (x < 0.0) {
        return 0;
    }
    return static_cast<std::uint64_t>(std::llround(x));
}

} // namespace detail

/// Deterministic generation: the dataset is a pure function of the config,
/// including the seed.
inline SynthDataset generate(const SynthConfig& cfg) {
    detail::validate(cfg);
    Rng rng(cfg.seed);
    const std::size_t n = cfg.n_users;

    // Users are ids 1..n. Draw order is fixed: regions, isolation mask,
    // attributes, degrees, then edges.
    std::vector<std::uint32_t> region(n);
    for (std::size_t i = 0; i < n; ++i) {
        region[i] = static_cast<std::uint32_t>(rng.uniform_index(cfg.n_regions));
    }

    std::vector<std::uint8_t> isolated(n, 0);
    {
        const std::size_t n_isolated =
            static_cast<std::size_t>(cfg.isolated_fraction * static_cast<double>(n));
        std::vector<std::uint32_t> order(n);
        for (std::size_t i = 0; i < n; ++i) {
            order[i] = static_cast<std::uint32_t>(i);
        }
        // Partial Fisher-Yates: the first n_isolated slots become isolated.
        for (std::size_t i = 0; i < n_isolated; ++i) {
            const std::size_t j = i + rng.uniform_index(n - i);
            std::swap(order[i], order[j]);
            isolated[order[i]] = 1;
        }
    }

    std::vector<AttributeTable::Record> records(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t friends =
            detail::round_positive(rng.lognormal(cfg.friends_log_mean, cfg.friends_log_sigma));
        const double ratio_draw = std::exp(cfg.ratio_log_sigma * rng.normal());
        const double followers_real = (static_cast<double>(friends) + 1.0) / ratio_draw - 1.0;
        const std::uint64_t followers = detail::round_positive(followers_real);
        records[i] = {static_cast<UserId>(i + 1), friends, followers, 0.0};
    }
    AttributeTable attributes(std::move(records));

    std::vector<std::uint32_t> target_degree(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double draw = rng.lognormal(cfg.degree_log_mean, cfg.degree_log_sigma);
        target_degree[i] = static_cast<std::uint32_t>(
            std::min<std::uint64_t>(detail::round_positive(draw), n - 1));
    }

    // Active users per region; partner pools exclude isolated users.
    std::vector<std::vector<std::uint32_t>> region_pool(cfg.n_regions);
    std::vector<std::uint32_t> active;
    for (std::size_t i = 0; i < n; ++i) {
        if (!isolated[i]) {
            region_pool[region[i]].push_back(static_cast<std::uint32_t>(i));
            active.push_back(static_cast<std::uint32_t>(i));
        }
    }
    if (active.size() < 2) {
        throw GenerationError("fewer than two active users");
    }
    std::uint32_t regions_with_actives = 0;
    for (const auto& pool : region_pool) {
        if (!pool.empty()) {
            ++regions_with_actives;
        }
    }

    std::vector<std::pair<UserId, UserId>> edges;
    for (const std::uint32_t u : active) {
        const auto& rec = attributes.records()[u];
        const double covariate = cfg.coupling == "ratio"
                                     ? std::log(rec.follow_ratio)
                                     : std::log(static_cast<double>(rec.friends_count) + 1.0) -
                                           cfg.friends_log_mean;
        const double p_local = std::clamp(
            cfg.locality_base * detail::logistic(cfg.beta0 - cfg.beta1 * covariate), 0.0, 1.0);
        const auto& local_pool = region_pool[region[u]];
        for (std::uint32_t stub = 0; stub < target_degree[u]; ++stub) {
            const bool local = rng.bernoulli(p_local);
            std::uint32_t partner = u;
            if (local) {
                if (local_pool.size() < 2) {
                    throw GenerationError("region " +
                                          detail::region_token(region[u], cfg.n_regions) +
                                          " is too small for the requested degree");
                }
                do {
                    partner = local_pool[rng.uniform_index(local_pool.size())];
                } while (partner == u);
            } else {
                if (regions_with_actives < 2) {
                    throw GenerationError("all active users share one region; "
                                          "out-of-region ties are infeasible");
                }
                do {
                    partner = active[rng.uniform_index(active.size())];
                } while (partner == u || region[partner] == region[u]);
            }
            edges.emplace_back(static_cast<UserId>(u + 1), static_cast<UserId>(partner + 1));
        }
    }

    std::vector<UserId> universe(n);
    for (std::size_t i = 0; i < n; ++i) {
        universe[i] = static_cast<UserId>(i + 1);
    }
    SocialGraph graph = SocialGraph::from_edge_pairs(std::move(edges), std::move(universe));

    std::vector<LabelMap::Entry> label_entries;
    label_entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        label_entries.push_back(
            {static_cast<UserId>(i + 1), detail::region_token(region[i], cfg.n_regions)});
    }

    SynthDataset dataset{std::move(graph), LabelMap(std::move(label_entries)),
                         std::move(attributes), cfg};
    return dataset;
}

/// Writes edges.tsv, labels.tsv, attributes.tsv and manifest.json in the
/// exact formats the loaders consume. The edge file is canonical (each
/// unordered pair once, smaller id first, ascending).
inline void emit(const SynthDataset& dataset, const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    const auto open = [&](const char* name) {
        std::ofstream out(directory / name, std::ios::binary);
        if (!out) {
            throw Error("cannot write " + (directory / name).string());
        }
        return out;
    };
    {
        auto out = open("edges.tsv");
        dataset.graph.write_edges(out);
    }
    {
        auto out = open("labels.tsv");
        dataset.labels.write(out);
    }
    {
        auto out = open("attributes.tsv");
        dataset.attributes.write(out);
    }
    {
        auto out = open("manifest.json");
        nlohmann::ordered_json j;
        j["format_version"] = kManifestFormatVersion;
        nlohmann::ordered_json config;
        to_json(config, dataset.manifest);
        j["config"] = config;
        out << j.dump(2) << '\n';
    }
}

} // namespace homophily
