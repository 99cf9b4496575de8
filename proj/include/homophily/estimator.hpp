#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "homophily/error.hpp"
#include "homophily/graph.hpp"
#include "homophily/labels.hpp"

namespace homophily {

/// Leave-one-out evaluation counts and the derived metrics.
///
/// accuracy = n_correct / n_estimable (absent when nothing is estimable);
/// coverage = n_estimable / n_universe, with n_universe always the full |V|
/// of the graph, not the target-set size.
struct EvalResult {
    std::uint64_t n_correct = 0;
    std::uint64_t n_estimable = 0;
    std::uint64_t n_universe = 0;
    std::optional<double> accuracy;
    double coverage = 0.0;

    static EvalResult from_counts(std::uint64_t n_correct, std::uint64_t n_estimable,
                                  std::uint64_t n_universe) {
        EvalResult r;
        r.n_correct = n_correct;
        r.n_estimable = n_estimable;
        r.n_universe = n_universe;
        if (n_estimable > 0) {
            r.accuracy = static_cast<double>(n_correct) / static_cast<double>(n_estimable);
        }
        r.coverage = n_universe == 0
                         ? 0.0
                         : static_cast<double>(n_estimable) / static_cast<double>(n_universe);
        return r;
    }

    friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

/// Majority vote over the labels of u's mutual friends. The user's own label
/// never participates (there are no self-loops, and evaluation hides it).
/// Ties go to the lexicographically smallest label; no labeled neighbor
/// means no estimate.
inline std::optional<std::string> infer_one(const SocialGraph& g, const LabelMap& labels,
                                            UserId u) {
    const auto node = g.index_of(u);
    std::map<std::string_view, std::uint64_t> votes;
    for (const SocialGraph::NodeIndex v : g.neighbor_indices(node)) {
        if (const auto label = labels.label(g.user_at(v))) {
            ++votes[*label];
        }
    }
    if (votes.empty()) {
        return std::nullopt;
    }
    std::string_view best;
    std::uint64_t best_count = 0;
    for (const auto& [label, count] : votes) {
        // std::map iterates labels in ascending order, so on a tie the
        // first (smallest) label wins.
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    }
    return std::string(best);
}

namespace detail {

/// Labels interned against graph node indices for the evaluation hot path.
/// Codes are assigned in lexicographic token order, so the smallest code is
/// the lexicographically smallest label.
struct EvalContext {
    const SocialGraph* graph = nullptr;
    std::vector<std::int32_t> code_by_node; // -1 when unlabeled
    std::vector<std::string> tokens;        // sorted; index == code

    EvalContext(const SocialGraph& g, const LabelMap& labels) : graph(&g) {
        tokens.reserve(labels.size());
        for (const auto& e : labels.entries()) {
            tokens.push_back(e.label);
        }
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());

        code_by_node.assign(g.user_count(), -1);
        for (const auto& e : labels.entries()) {
            const auto node = g.find_index(e.user);
            if (!node) {
                throw ValidationError("labeled user " + std::to_string(e.user) +
                                      " is not in the graph");
            }
            const auto it = std::lower_bound(tokens.begin(), tokens.end(), e.label);
            code_by_node[*node] = static_cast<std::int32_t>(it - tokens.begin());
        }
    }

    /// Vote for one node using a caller-owned tally buffer (one slot per
    /// label code). Returns the winning code or -1.
    std::int32_t vote(SocialGraph::NodeIndex node, std::vector<std::uint64_t>& tally,
                      std::vector<std::int32_t>& touched) const {
        touched.clear();
        for (const SocialGraph::NodeIndex v : graph->neighbor_indices(node)) {
            const std::int32_t code = code_by_node[v];
            if (code < 0) {
                continue;
            }
            if (tally[static_cast<std::size_t>(code)]++ == 0) {
                touched.push_back(code);
            }
        }
        std::int32_t best = -1;
        std::uint64_t best_count = 0;
        for (const std::int32_t code : touched) {
            const std::uint64_t count = tally[static_cast<std::size_t>(code)];
            tally[static_cast<std::size_t>(code)] = 0;
            if (count > best_count || (count == best_count && code < best)) {
                best = code;
                best_count = count;
            }
        }
        return best;
    }
};

struct EvalPartial {
    std::uint64_t correct = 0;
    std::uint64_t estimable = 0;
};

inline EvalPartial evaluate_range(const EvalContext& ctx,
                                  std::span<const SocialGraph::NodeIndex> targets) {
    EvalPartial partial;
    std::vector<std::uint64_t> tally(ctx.tokens.size(), 0);
    std::vector<std::int32_t> touched;
    for (const SocialGraph::NodeIndex node : targets) {
        if (ctx.graph->degree(node) == 0) {
            continue;
        }
        ++partial.estimable;
        const std::int32_t predicted = ctx.vote(node, tally, touched);
        if (predicted >= 0 && predicted == ctx.code_by_node[node]) {
            ++partial.correct;
        }
    }
    return partial;
}

/// Map-reduce over target nodes. Partials are integer sums, so the result
/// is identical for any worker count or schedule.
inline EvalResult evaluate_nodes(const EvalContext& ctx,
                                 std::span<const SocialGraph::NodeIndex> targets,
                                 unsigned workers) {
    for (const SocialGraph::NodeIndex node : targets) {
        if (ctx.code_by_node[node] < 0) {
            throw ValidationError("target user " + std::to_string(ctx.graph->user_at(node)) +
                                  " has no true label");
        }
    }
    EvalPartial total;
    if (workers <= 1 || targets.size() < 2048) {
        total = evaluate_range(ctx, targets);
    } else {
        const std::size_t chunk = (targets.size() + workers - 1) / workers;
        std::vector<EvalPartial> partials(workers);
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = std::min(targets.size(), w * chunk);
            const std::size_t end = std::min(targets.size(), begin + chunk);
            threads.emplace_back([&, w, begin, end] {
                partials[w] = evaluate_range(ctx, targets.subspan(begin, end - begin));
            });
        }
        for (auto& t : threads) {
            t.join();
        }
        for (const EvalPartial& p : partials) {
            total.correct += p.correct;
            total.estimable += p.estimable;
        }
    }
    return EvalResult::from_counts(total.correct, total.estimable, ctx.graph->user_count());
}

} // namespace detail

/// Leave-one-out evaluation of majority-vote inference over the target set.
/// Every target must carry a true label. Evaluation is a pure map-reduce,
/// deterministic for any worker count.
inline EvalResult evaluate(const SocialGraph& g, const LabelMap& labels,
                           std::span<const UserId> targets, unsigned workers = 1) {
    const detail::EvalContext ctx(g, labels);
    std::vector<SocialGraph::NodeIndex> nodes;
    nodes.reserve(targets.size());
    for (const UserId id : targets) {
        nodes.push_back(g.index_of(id));
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return detail::evaluate_nodes(ctx, nodes, workers);
}

} // namespace homophily
