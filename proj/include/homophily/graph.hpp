#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "homophily/error.hpp"
#include "homophily/io.hpp"

namespace homophily {

using UserId = std::uint64_t;

/// Summary row in the shape of the usual dataset-statistics table:
/// user count, isolated count, unordered edge count, mean / population
/// standard deviation / median of the mutual-friend degree.
struct GraphStats {
    std::uint64_t n_users = 0;
    std::uint64_t n_isolated = 0;
    std::uint64_t n_edges = 0;
    double mean_degree = 0.0;
    double degree_stddev = 0.0;
    double median_degree = 0.0;

    friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

/// Immutable undirected graph of mutual-friend ties.
///
/// Users are kept sorted by id; adjacency is CSR over node indices, each
/// neighbor list sorted. Symmetric, deduplicated, self-loop free by
/// construction. Safe for concurrent readers.
class SocialGraph {
  public:
    using NodeIndex = std::uint32_t;

    SocialGraph() = default;

    /// Builds a graph from unordered id pairs. When universe is given it
    /// defines the user set V and every endpoint must belong to it; otherwise
    /// V is the set of endpoint ids.
    static SocialGraph from_edge_pairs(std::vector<std::pair<UserId, UserId>> pairs,
                                       std::optional<std::vector<UserId>> universe = std::nullopt) {
        SocialGraph g;
        if (universe) {
            std::sort(universe->begin(), universe->end());
            universe->erase(std::unique(universe->begin(), universe->end()), universe->end());
            g.users_ = std::move(*universe);
        } else {
            g.users_.reserve(pairs.size() * 2);
            for (const auto& [a, b] : pairs) {
                g.users_.push_back(a);
                g.users_.push_back(b);
            }
            std::sort(g.users_.begin(), g.users_.end());
            g.users_.erase(std::unique(g.users_.begin(), g.users_.end()), g.users_.end());
        }
        if (g.users_.size() > std::numeric_limits<NodeIndex>::max()) {
            throw ValidationError("graph exceeds supported user count");
        }

        // Normalize to (min, max) index pairs, dropping self-loops.
        std::vector<std::pair<NodeIndex, NodeIndex>> edges;
        edges.reserve(pairs.size());
        for (const auto& [a, b] : pairs) {
            if (a == b) {
                continue;
            }
            const auto ia = g.find_index(a);
            const auto ib = g.find_index(b);
            if (!ia || !ib) {
                const UserId missing = ia ? b : a;
                throw ValidationError("edge endpoint " + std::to_string(missing) +
                                      " is not in the user universe");
            }
            edges.emplace_back(std::min(*ia, *ib), std::max(*ia, *ib));
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        g.n_edges_ = edges.size();

        std::vector<std::uint64_t> degree(g.users_.size(), 0);
        for (const auto& [u, v] : edges) {
            ++degree[u];
            ++degree[v];
        }
        g.offsets_.assign(g.users_.size() + 1, 0);
        for (std::size_t i = 0; i < g.users_.size(); ++i) {
            g.offsets_[i + 1] = g.offsets_[i] + degree[i];
        }
        g.adjacency_.resize(g.offsets_.back());
        std::vector<std::uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
        for (const auto& [u, v] : edges) {
            g.adjacency_[cursor[u]++] = v;
            g.adjacency_[cursor[v]++] = u;
        }
        // Each neighbor list is already sorted: edges were emitted in
        // lexicographic (min, max) order, so insertions per node ascend.
        return g;
    }

    std::size_t user_count() const noexcept { return users_.size(); }
    std::uint64_t edge_count() const noexcept { return n_edges_; }
    std::span<const UserId> users() const noexcept { return users_; }
    UserId user_at(std::size_t index) const { return users_[index]; }

    bool contains(UserId id) const noexcept { return find_index(id).has_value(); }

    std::optional<NodeIndex> find_index(UserId id) const noexcept {
        const auto it = std::lower_bound(users_.begin(), users_.end(), id);
        if (it == users_.end() || *it != id) {
            return std::nullopt;
        }
        return static_cast<NodeIndex>(it - users_.begin());
    }

    NodeIndex index_of(UserId id) const {
        const auto index = find_index(id);
        if (!index) {
            throw NotFoundError("unknown user " + std::to_string(id));
        }
        return *index;
    }

    std::span<const NodeIndex> neighbor_indices(NodeIndex node) const {
        return {adjacency_.data() + offsets_[node], adjacency_.data() + offsets_[node + 1]};
    }

    std::size_t degree(NodeIndex node) const { return offsets_[node + 1] - offsets_[node]; }

    /// Mutual friends of u, ascending. Empty for isolated users.
    std::vector<UserId> neighbors(UserId id) const {
        const NodeIndex node = index_of(id);
        std::vector<UserId> result;
        result.reserve(degree(node));
        for (const NodeIndex v : neighbor_indices(node)) {
            result.push_back(users_[v]);
        }
        return result;
    }

    /// Canonical edge list: one line per unordered pair, smaller id first,
    /// sorted ascending, tab separated.
    void write_edges(std::ostream& out) const {
        for (std::size_t u = 0; u < users_.size(); ++u) {
            for (const NodeIndex v : neighbor_indices(static_cast<NodeIndex>(u))) {
                if (v > u) {
                    out << users_[u] << '\t' << users_[v] << '\n';
                }
            }
        }
    }

    friend bool operator==(const SocialGraph& a, const SocialGraph& b) {
        return a.users_ == b.users_ && a.offsets_ == b.offsets_ && a.adjacency_ == b.adjacency_;
    }

  private:
    std::vector<UserId> users_;
    std::vector<std::uint64_t> offsets_;
    std::vector<NodeIndex> adjacency_;
    std::uint64_t n_edges_ = 0;
};

namespace detail {

inline std::vector<std::pair<UserId, UserId>> parse_edge_lines(std::istream& in) {
    std::vector<std::pair<UserId, UserId>> pairs;
    for_each_data_line(in, [&](std::string_view line, std::size_t line_number) {
        const auto fields = split_tabs(line);
        if (fields.size() != 2) {
            throw ParseError("expected two tab-separated user ids", line_number);
        }
        const UserId a = parse_u64(fields[0], line_number, "user id");
        const UserId b = parse_u64(fields[1], line_number, "user id");
        pairs.emplace_back(a, b);
    });
    return pairs;
}

} // namespace detail

/// Parses a tab-separated edge list (two ids per line, '#' comments) with
/// V derived from the endpoints. Duplicate lines and both orientations of a
/// pair collapse to one edge; self-loops are dropped.
inline SocialGraph load_graph(std::istream& in) {
    return SocialGraph::from_edge_pairs(detail::parse_edge_lines(in));
}

/// Same, with an explicit user universe defining V. Users absent from the
/// edge stream are isolated members of V; endpoints outside the universe are
/// a validation error.
inline SocialGraph load_graph(std::istream& in, std::span<const UserId> universe) {
    return SocialGraph::from_edge_pairs(detail::parse_edge_lines(in),
                                        std::vector<UserId>(universe.begin(), universe.end()));
}

inline GraphStats graph_stats(const SocialGraph& g) {
    GraphStats stats;
    stats.n_users = g.user_count();
    stats.n_edges = g.edge_count();
    if (g.user_count() == 0) {
        return stats;
    }
    std::vector<std::uint64_t> degrees(g.user_count());
    std::uint64_t degree_sum = 0;
    for (std::size_t u = 0; u < g.user_count(); ++u) {
        degrees[u] = g.degree(static_cast<SocialGraph::NodeIndex>(u));
        degree_sum += degrees[u];
        if (degrees[u] == 0) {
            ++stats.n_isolated;
        }
    }
    const double n = static_cast<double>(g.user_count());
    stats.mean_degree = static_cast<double>(degree_sum) / n;
    double squared = 0.0;
    for (const std::uint64_t d : degrees) {
        const double diff = static_cast<double>(d) - stats.mean_degree;
        squared += diff * diff;
    }
    stats.degree_stddev = std::sqrt(squared / n);
    std::sort(degrees.begin(), degrees.end());
    const std::size_t half = degrees.size() / 2;
    if (degrees.size() % 2 == 1) {
        stats.median_degree = static_cast<double>(degrees[half]);
    } else {
        stats.median_degree =
            (static_cast<double>(degrees[half - 1]) + static_cast<double>(degrees[half])) / 2.0;
    }
    return stats;
}

} // namespace homophily
