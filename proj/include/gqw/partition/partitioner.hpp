#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <tuple>
#include <vector>

#include "gqw/error.hpp"
#include "gqw/graph/property_graph.hpp"

namespace gqw {

/// Node-disjoint induced subgraphs of a store. Relationships whose endpoints fall in different
/// parts are listed in cut_edges and belong to no part.
struct PartitionSet {
    std::vector<PropertyGraph> parts;
    std::map<NodeId, std::size_t> assignment;
    std::vector<RelId> cut_edges;

    std::size_t edge_count() const {
        std::size_t n = 0;
        for (const auto& p : parts) n += p.relationship_count();
        return n;
    }
};

inline constexpr std::size_t kDefaultPartSize = 30;

namespace detail {

struct WeightedGraph {
    std::vector<std::size_t> weight;
    std::vector<std::map<std::size_t, std::size_t>> adj; // neighbour -> summed edge weight, no self entries

    std::size_t size() const { return weight.size(); }
};

inline WeightedGraph weighted_from_store(const PropertyGraph& g) {
    WeightedGraph w;
    w.weight.assign(g.node_count(), 1);
    w.adj.resize(g.node_count());
    for (std::size_t e = 0; e < g.relationship_count(); ++e) {
        const std::size_t s = g.source_index(e);
        const std::size_t t = g.target_index(e);
        if (s == t) continue;
        ++w.adj[s][t];
        ++w.adj[t][s];
    }
    return w;
}

// Heavy-edge matching: visit nodes in seeded random order, pair each unmatched node with the
// unmatched neighbour of heaviest connecting weight whose merged weight stays within max_weight.
inline std::pair<WeightedGraph, std::vector<std::size_t>> coarsen_once(const WeightedGraph& g, std::size_t max_weight,
                                                                       std::mt19937_64& rng) {
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> order(g.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::size_t> mate(g.size(), unset);
    for (std::size_t v : order) {
        if (mate[v] != unset) continue;
        std::size_t best = unset;
        std::size_t best_w = 0;
        for (const auto& [u, w] : g.adj[v]) {
            if (mate[u] != unset || g.weight[u] + g.weight[v] > max_weight) continue;
            if (best == unset || w > best_w) {
                best = u;
                best_w = w;
            }
        }
        mate[v] = best == unset ? v : best;
        if (best != unset) mate[best] = v;
    }

    std::vector<std::size_t> to_coarse(g.size(), unset);
    WeightedGraph c;
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (to_coarse[v] != unset) continue;
        const std::size_t id = c.weight.size();
        to_coarse[v] = id;
        std::size_t w = g.weight[v];
        if (mate[v] != v) {
            to_coarse[mate[v]] = id;
            w += g.weight[mate[v]];
        }
        c.weight.push_back(w);
    }
    c.adj.resize(c.weight.size());
    for (std::size_t v = 0; v < g.size(); ++v)
        for (const auto& [u, w] : g.adj[v])
            if (to_coarse[u] != to_coarse[v]) c.adj[to_coarse[v]][to_coarse[u]] += w;
    return {std::move(c), std::move(to_coarse)};
}

// Greedy graph growing: each block absorbs the frontier node most connected to it until the
// block weight reaches target; exhausted components are continued from a fresh seed.
inline std::vector<std::size_t> grow_blocks(const WeightedGraph& g, std::size_t target) {
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> block(g.size(), unset);
    std::size_t remaining = g.size();
    std::size_t current = 0;

    auto pick_seed = [&] {
        std::size_t best = unset;
        std::size_t best_deg = 0;
        for (std::size_t v = 0; v < g.size(); ++v) {
            if (block[v] != unset) continue;
            std::size_t deg = 0;
            for (const auto& [u, w] : g.adj[v])
                if (block[u] == unset) deg += w;
            if (best == unset || deg < best_deg) {
                best = v;
                best_deg = deg;
            }
        }
        return best;
    };

    while (remaining > 0) {
        std::size_t weight = 0;
        std::vector<std::size_t> gain(g.size(), 0);
        using Entry = std::tuple<std::size_t, std::size_t, std::size_t>; // gain, ~index, node
        std::priority_queue<Entry> frontier;
        while (weight < target && remaining > 0) {
            std::size_t v = unset;
            while (!frontier.empty()) {
                auto [gn, inv, cand] = frontier.top();
                frontier.pop();
                if (block[cand] == unset && gn == gain[cand]) {
                    v = cand;
                    break;
                }
            }
            if (v == unset) v = pick_seed();
            block[v] = current;
            weight += g.weight[v];
            --remaining;
            for (const auto& [u, w] : g.adj[v]) {
                if (block[u] != unset) continue;
                gain[u] += w;
                frontier.emplace(gain[u], ~u, u);
            }
        }
        ++current;
    }
    return block;
}

// Boundary refinement: move a node to the neighbouring block it is most connected to when that
// strictly lowers the cut, or keeps the cut and strictly evens out the two block weights.
inline void refine(const WeightedGraph& g, std::vector<std::size_t>& block, std::size_t blocks, std::size_t max_block,
                   std::size_t passes) {
    std::vector<std::size_t> weight(blocks, 0);
    for (std::size_t v = 0; v < g.size(); ++v) weight[block[v]] += g.weight[v];
    for (std::size_t pass = 0; pass < passes; ++pass) {
        bool moved = false;
        for (std::size_t v = 0; v < g.size(); ++v) {
            std::map<std::size_t, std::size_t> conn;
            for (const auto& [u, w] : g.adj[v]) conn[block[u]] += w;
            const std::size_t own = block[v];
            const std::size_t own_conn = conn.contains(own) ? conn[own] : 0;
            const std::size_t wv = g.weight[v];
            if (weight[own] <= wv) continue;
            std::size_t best = own;
            long long best_gain = 0;
            bool best_balances = false;
            for (const auto& [b, c] : conn) {
                if (b == own || weight[b] + wv > max_block) continue;
                const long long gain = static_cast<long long>(c) - static_cast<long long>(own_conn);
                const bool balances = weight[own] > weight[b] + wv;
                const bool acceptable = gain > 0 || (gain == 0 && balances);
                if (!acceptable) continue;
                if (best == own || gain > best_gain || (gain == best_gain && balances && !best_balances)) {
                    best = b;
                    best_gain = gain;
                    best_balances = balances;
                }
            }
            if (best != own) {
                weight[own] -= wv;
                weight[best] += wv;
                block[v] = best;
                moved = true;
            }
        }
        if (!moved) break;
    }
}

} // namespace detail

/// Multilevel partitioning into parts of roughly target_part_size nodes (each part holds between
/// 1 and 2*target_part_size nodes). Deterministic for a given seed.
inline PartitionSet partition(const PropertyGraph& store, std::size_t target_part_size = kDefaultPartSize,
                              std::uint64_t seed = 0) {
    if (target_part_size < 2) throw Error(ErrorCode::Validation, "target_part_size must be at least 2");
    PartitionSet out;
    if (store.empty()) return out;

    std::mt19937_64 rng(seed);
    std::vector<detail::WeightedGraph> levels;
    std::vector<std::vector<std::size_t>> maps;
    levels.push_back(detail::weighted_from_store(store));
    const std::size_t expected_blocks = (store.node_count() + target_part_size - 1) / target_part_size;
    while (levels.back().size() > 4 * expected_blocks) {
        auto [coarse, map] = detail::coarsen_once(levels.back(), target_part_size, rng);
        if (coarse.size() * 10 > levels.back().size() * 9) break;
        levels.push_back(std::move(coarse));
        maps.push_back(std::move(map));
    }

    auto block = detail::grow_blocks(levels.back(), target_part_size);
    std::size_t blocks = *std::max_element(block.begin(), block.end()) + 1;
    const std::size_t max_block = 2 * target_part_size;
    constexpr std::size_t kPasses = 16;
    detail::refine(levels.back(), block, blocks, max_block, kPasses);
    for (std::size_t lvl = levels.size() - 1; lvl-- > 0;) {
        std::vector<std::size_t> finer(levels[lvl].size());
        for (std::size_t v = 0; v < finer.size(); ++v) finer[v] = block[maps[lvl][v]];
        block = std::move(finer);
        detail::refine(levels[lvl], block, blocks, max_block, kPasses);
    }

    // Compact away blocks emptied by refinement, numbering parts by first appearance.
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> renumber(blocks, unset);
    std::size_t parts = 0;
    for (std::size_t v = 0; v < block.size(); ++v) {
        if (renumber[block[v]] == unset) renumber[block[v]] = parts++;
        block[v] = renumber[block[v]];
    }

    out.parts.resize(parts);
    for (std::size_t v = 0; v < store.node_count(); ++v) {
        const auto& n = store.node_at(v);
        out.parts[block[v]].add_node(n);
        out.assignment.emplace(n.id, block[v]);
    }
    for (std::size_t e = 0; e < store.relationship_count(); ++e) {
        const std::size_t s = store.source_index(e);
        const std::size_t t = store.target_index(e);
        if (block[s] == block[t]) out.parts[block[s]].add_relationship(store.relationship_at(e));
        else out.cut_edges.push_back(store.relationship_at(e).id);
    }
    return out;
}

/// Wraps a store as a single part without cutting anything.
inline PartitionSet single_part(const PropertyGraph& store) {
    PartitionSet out;
    out.parts.push_back(store);
    for (std::size_t v = 0; v < store.node_count(); ++v) out.assignment.emplace(store.node_at(v).id, 0);
    return out;
}

} // namespace gqw
