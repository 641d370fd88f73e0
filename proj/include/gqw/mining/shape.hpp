#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gqw/graph/property_graph.hpp"
#include "gqw/graph/query_graph.hpp"

namespace gqw {

/// Undirected edge of a pattern shape; u <= v, self-loops allowed.
struct ShapeEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    std::string type;
    auto operator<=>(const ShapeEdge&) const = default;
};

/// A connected label-annotated multigraph used as a canned pattern: node label sets and
/// relationship types only, no property constraints.
struct PatternShape {
    std::vector<LabelSet> nodes;
    std::vector<ShapeEdge> edges;

    bool operator==(const PatternShape&) const = default;

    std::size_t size() const noexcept { return edges.size(); }

    bool connected() const {
        if (nodes.empty()) return false;
        std::vector<std::size_t> parent(nodes.size());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        std::size_t components = nodes.size();
        for (const auto& e : edges) {
            auto a = find(e.u);
            auto b = find(e.v);
            if (a != b) {
                parent[a] = b;
                --components;
            }
        }
        return components == 1;
    }

    /// Node ids "p0", "p1", ...; relation ids "e0", "e1", ...; undirected relations.
    QueryGraph to_query() const {
        QueryGraph q;
        for (std::size_t i = 0; i < nodes.size(); ++i) q.add_node("p" + std::to_string(i), nodes[i]);
        for (std::size_t j = 0; j < edges.size(); ++j)
            q.add_relationship("e" + std::to_string(j), "p" + std::to_string(edges[j].u), "p" + std::to_string(edges[j].v),
                               edges[j].type);
        return q;
    }
};

namespace detail {

inline void append_token(std::string& out, const std::string& s) {
    out += std::to_string(s.size());
    out += ':';
    out += s;
}

// Colour refinement: ranks start from label keys and are refined by the sorted multiset of
// (edge type, neighbour rank). Ranks depend only on structure, so the resulting cell order is an
// isomorphism invariant.
inline std::vector<std::size_t> refined_ranks(const PatternShape& p) {
    const std::size_t n = p.nodes.size();
    std::vector<std::string> keys(n);
    for (std::size_t i = 0; i < n; ++i) keys[i] = label_key(p.nodes[i]);
    std::vector<std::size_t> rank(n);
    {
        std::vector<std::string> sorted = keys;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (std::size_t i = 0; i < n; ++i)
            rank[i] = std::lower_bound(sorted.begin(), sorted.end(), keys[i]) - sorted.begin();
    }
    std::size_t classes = 0;
    for (std::size_t round = 0; round < n; ++round) {
        using Sig = std::pair<std::size_t, std::vector<std::tuple<std::string, std::size_t, bool>>>;
        std::vector<Sig> sig(n);
        for (std::size_t i = 0; i < n; ++i) sig[i].first = rank[i];
        for (const auto& e : p.edges) {
            if (e.u == e.v) {
                sig[e.u].second.emplace_back(e.type, rank[e.u], true);
                continue;
            }
            sig[e.u].second.emplace_back(e.type, rank[e.v], false);
            sig[e.v].second.emplace_back(e.type, rank[e.u], false);
        }
        for (auto& s : sig) std::sort(s.second.begin(), s.second.end());
        std::vector<Sig> sorted = sig;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (std::size_t i = 0; i < n; ++i)
            rank[i] = std::lower_bound(sorted.begin(), sorted.end(), sig[i]) - sorted.begin();
        if (sorted.size() == classes) break;
        classes = sorted.size();
    }
    return rank;
}

inline std::string encode_edges(const PatternShape& p, const std::vector<std::size_t>& position) {
    std::vector<ShapeEdge> mapped;
    mapped.reserve(p.edges.size());
    for (const auto& e : p.edges) {
        auto a = position[e.u];
        auto b = position[e.v];
        if (a > b) std::swap(a, b);
        mapped.push_back(ShapeEdge{a, b, e.type});
    }
    std::sort(mapped.begin(), mapped.end());
    std::string out;
    for (const auto& e : mapped) {
        out += std::to_string(e.u);
        out += ',';
        out += std::to_string(e.v);
        out += ',';
        append_token(out, e.type);
        out += ';';
    }
    return out;
}

} // namespace detail

struct CanonicalShape {
    PatternShape shape; // nodes and edges in canonical order
    std::string code;
};

/// Minimal edge encoding over all node orderings consistent with the refined colour classes.
/// Two shapes are isomorphic iff their codes are equal.
inline CanonicalShape canonicalize(const PatternShape& p) {
    const std::size_t n = p.nodes.size();
    const auto rank = detail::refined_ranks(p);

    std::vector<std::size_t> by_rank(n);
    std::iota(by_rank.begin(), by_rank.end(), 0);
    std::stable_sort(by_rank.begin(), by_rank.end(), [&](auto a, auto b) { return rank[a] < rank[b]; });
    std::vector<std::pair<std::size_t, std::size_t>> cells; // [begin, end) in by_rank
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && rank[by_rank[j]] == rank[by_rank[i]]) ++j;
        cells.emplace_back(i, j);
        i = j;
    }

    std::string prefix;
    for (std::size_t i = 0; i < n; ++i) {
        detail::append_token(prefix, label_key(p.nodes[by_rank[i]]));
        prefix += '|';
    }
    prefix += '#';

    // Enumerate orderings cell by cell (each cell permuted independently).
    std::vector<std::size_t> order = by_rank;
    for (auto [b, e] : cells) std::sort(order.begin() + b, order.begin() + e);
    std::string best;
    std::vector<std::size_t> best_order;
    std::vector<std::size_t> position(n);
    for (;;) {
        for (std::size_t i = 0; i < n; ++i) position[order[i]] = i;
        auto enc = detail::encode_edges(p, position);
        if (best_order.empty() || enc < best) {
            best = std::move(enc);
            best_order = order;
        }
        std::size_t c = cells.size();
        bool advanced = false;
        while (c-- > 0) {
            auto [b, e] = cells[c];
            if (std::next_permutation(order.begin() + b, order.begin() + e)) {
                advanced = true;
                break;
            }
        }
        if (!advanced) break;
    }

    CanonicalShape out;
    out.code = prefix + best;
    for (std::size_t i = 0; i < n; ++i) position[best_order[i]] = i;
    for (std::size_t i = 0; i < n; ++i) out.shape.nodes.push_back(p.nodes[best_order[i]]);
    for (const auto& e : p.edges) {
        auto a = position[e.u];
        auto b = position[e.v];
        if (a > b) std::swap(a, b);
        out.shape.edges.push_back(ShapeEdge{a, b, e.type});
    }
    std::sort(out.shape.edges.begin(), out.shape.edges.end());
    return out;
}

/// Shape spanned by a set of relationships of a store (node order: first appearance).
inline PatternShape shape_of(const PropertyGraph& g, const std::vector<std::size_t>& rel_indices) {
    PatternShape p;
    std::map<std::size_t, std::size_t> local;
    auto local_of = [&](std::size_t v) {
        auto [it, inserted] = local.emplace(v, p.nodes.size());
        if (inserted) p.nodes.push_back(g.node_at(v).labels);
        return it->second;
    };
    for (std::size_t e : rel_indices) {
        auto a = local_of(g.source_index(e));
        auto b = local_of(g.target_index(e));
        if (a > b) std::swap(a, b);
        p.edges.push_back(ShapeEdge{a, b, g.relationship_at(e).type});
    }
    return p;
}

} // namespace gqw
