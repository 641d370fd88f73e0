#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "gqw/error.hpp"
#include "gqw/graph/matcher.hpp"
#include "gqw/mining/shape.hpp"
#include "gqw/mining/ted.hpp"
#include "gqw/partition/partitioner.hpp"

namespace gqw {

struct BruteForceLimits {
    std::size_t max_edges = 30;
    std::size_t max_tau = 3;
    std::size_t max_k = 4;
};

struct BruteForceResult {
    PatternSet best;
    std::size_t distinct_shapes = 0;
};

namespace detail {

inline PropertyGraph graph_of_shape(const PatternShape& p) {
    PropertyGraph g;
    for (std::size_t i = 0; i < p.nodes.size(); ++i) g.add_node(NodeRecord{NodeId{"v" + std::to_string(i)}, p.nodes[i], {}});
    for (std::size_t j = 0; j < p.edges.size(); ++j)
        g.add_relationship(RelRecord{RelId{"x" + std::to_string(j)}, p.edges[j].type, NodeId{"v" + std::to_string(p.edges[j].u)},
                                     NodeId{"v" + std::to_string(p.edges[j].v)}, {}});
    return g;
}

inline bool connected_subset(const PropertyGraph& g, const std::vector<std::size_t>& rels) {
    PatternShape s = shape_of(g, rels);
    return s.connected();
}

// Same node and edge count plus one label-exact injective embedding means isomorphic.
inline bool isomorphic(const PatternShape& a, const PatternShape& b) {
    if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) return false;
    std::vector<std::string> la, lb;
    for (const auto& n : a.nodes) la.push_back(label_key(n));
    for (const auto& n : b.nodes) lb.push_back(label_key(n));
    std::sort(la.begin(), la.end());
    std::sort(lb.begin(), lb.end());
    if (la != lb) return false;
    return !match_subgraph(a.to_query(), graph_of_shape(b), MatchOptions{IsomorphismMode::NodeIso, LabelMatch::Exact}).empty();
}

} // namespace detail

/// Optimal k-subset of all connected shapes up to tau_max edges, found by exhaustive enumeration
/// of relationship subsets and of shape combinations. Test oracle for small instances only.
inline BruteForceResult brute_force_optimum(const PartitionSet& d, std::size_t k, std::size_t tau_max,
                                            const BruteForceLimits& limits = {}) {
    const std::size_t edges = d.edge_count();
    if (edges > limits.max_edges || tau_max > limits.max_tau || k > limits.max_k)
        throw Error(ErrorCode::InstanceTooLarge, "brute-force oracle limited to " + std::to_string(limits.max_edges) +
                                                     " edges, tau_max " + std::to_string(limits.max_tau) + ", k " +
                                                     std::to_string(limits.max_k));
    if (k == 0) throw Error(ErrorCode::Validation, "k must be at least 1");

    struct Group {
        PatternShape shape;
        std::uint64_t mask = 0;
    };
    std::vector<Group> groups;
    std::vector<std::size_t> offset;
    std::size_t total = 0;
    for (const auto& p : d.parts) {
        offset.push_back(total);
        total += p.relationship_count();
    }

    for (std::size_t part = 0; part < d.parts.size(); ++part) {
        const auto& g = d.parts[part];
        const std::size_t m = g.relationship_count();
        for (std::size_t size = 1; size <= std::min(tau_max, m); ++size) {
            std::vector<bool> pick(m, false);
            std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size), true);
            do {
                std::vector<std::size_t> rels;
                for (std::size_t e = 0; e < m; ++e)
                    if (pick[e]) rels.push_back(e);
                auto shape = shape_of(g, rels);
                if (!shape.connected()) continue;
                std::uint64_t mask = 0;
                for (auto e : rels) mask |= std::uint64_t{1} << (offset[part] + e);
                auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& gr) { return detail::isomorphic(gr.shape, shape); });
                if (it == groups.end()) groups.push_back(Group{std::move(shape), mask});
                else it->mask |= mask;
            } while (std::prev_permutation(pick.begin(), pick.end()));
        }
    }

    BruteForceResult result;
    result.distinct_shapes = groups.size();
    result.best.k = k;
    result.best.tau_max = tau_max;
    result.best.universe = total;
    if (groups.empty()) return result;

    // A shape whose cover is contained in another's never improves on it in any k-subset.
    std::vector<Group> useful;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < groups.size() && !dominated; ++j) {
            if (i == j) continue;
            const bool subset = (groups[i].mask & ~groups[j].mask) == 0;
            dominated = subset && (groups[i].mask != groups[j].mask || j < i);
        }
        if (!dominated) useful.push_back(groups[i]);
    }
    groups = std::move(useful);

    const std::size_t pick = std::min(k, groups.size());
    std::vector<std::size_t> chosen(pick), best_choice;
    std::size_t best = 0;
    std::function<void(std::size_t, std::size_t, std::uint64_t)> rec = [&](std::size_t depth, std::size_t from, std::uint64_t acc) {
        if (depth == pick) {
            const auto c = static_cast<std::size_t>(std::popcount(acc));
            if (best_choice.empty() || c > best) {
                best = c;
                best_choice = chosen;
            }
            return;
        }
        for (std::size_t i = from; i + (pick - depth) <= groups.size(); ++i) {
            chosen[depth] = i;
            rec(depth + 1, i + 1, acc | groups[i].mask);
        }
    };
    rec(0, 0, 0);

    std::uint64_t acc = 0;
    for (auto i : best_choice) {
        Pattern p;
        p.shape = groups[i].shape;
        for (std::size_t part = 0; part < d.parts.size(); ++part)
            for (std::size_t e = 0; e < d.parts[part].relationship_count(); ++e)
                if ((groups[i].mask >> (offset[part] + e)) & 1U) p.cover.push_back(CoverElement{part, d.parts[part].relationship_at(e).id});
        std::sort(p.cover.begin(), p.cover.end());
        acc |= groups[i].mask;
        result.best.members.push_back(std::move(p));
    }
    for (std::size_t part = 0; part < d.parts.size(); ++part)
        for (std::size_t e = 0; e < d.parts[part].relationship_count(); ++e)
            if ((acc >> (offset[part] + e)) & 1U) result.best.total_cover.push_back(CoverElement{part, d.parts[part].relationship_at(e).id});
    std::sort(result.best.total_cover.begin(), result.best.total_cover.end());
    return result;
}

} // namespace gqw
