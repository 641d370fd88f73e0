#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "gqw/graph/property_graph.hpp"
#include "gqw/graph/query_graph.hpp"

namespace gqw {

/// Which query elements must map to distinct store elements.
///
/// RelIsoOnly is the relationship-uniqueness semantics of a single graph-query MATCH clause;
/// NodeIso additionally makes the node map injective. Homomorphism drops both and models a query
/// split into independent MATCH clauses.
enum class IsomorphismMode { Homomorphism, RelIsoOnly, NodeIso };

constexpr std::string_view to_string(IsomorphismMode mode) noexcept {
    switch (mode) {
    case IsomorphismMode::Homomorphism: return "homomorphism";
    case IsomorphismMode::RelIsoOnly: return "rel-iso-only";
    case IsomorphismMode::NodeIso: return "node-iso";
    }
    return "node-iso";
}

/// Subset: every query label must be present on the node (query semantics).
/// Exact: the node's label set must equal the query's (pattern-shape semantics).
enum class LabelMatch { Subset, Exact };

struct MatchOptions {
    IsomorphismMode mode = IsomorphismMode::NodeIso;
    LabelMatch labels = LabelMatch::Subset;
};

/// nodes[i] is the image of query.nodes[i]; rels[j] the image of query.relationships[j].
struct Embedding {
    std::vector<NodeId> nodes;
    std::vector<RelId> rels;
    auto operator<=>(const Embedding&) const = default;
};

namespace detail {

inline bool properties_satisfied(const PropertyMap& constraints, const PropertyMap& actual) {
    for (const auto& [k, v] : constraints) {
        auto it = actual.find(k);
        if (it == actual.end() || !scalar_equal(it->second, v)) return false;
    }
    return true;
}

inline bool labels_satisfied(const LabelSet& wanted, const LabelSet& actual, LabelMatch mode) {
    if (mode == LabelMatch::Exact) return wanted == actual;
    return std::includes(actual.begin(), actual.end(), wanted.begin(), wanted.end());
}

class Matcher {
public:
    Matcher(const QueryGraph& q, const PropertyGraph& g, MatchOptions opt) : q_(q), g_(g), opt_(opt) {}

    std::vector<Embedding> run() {
        q_.validate();
        const std::size_t qn = q_.nodes.size();
        const std::size_t qr = q_.relationships.size();
        rel_ends_.resize(qr);
        std::vector<std::size_t> degree(qn, 0);
        for (std::size_t j = 0; j < qr; ++j) {
            const auto& r = q_.relationships[j];
            rel_ends_[j] = {*q_.node_position(r.source), *q_.node_position(r.target)};
            ++degree[rel_ends_[j].first];
            if (rel_ends_[j].second != rel_ends_[j].first) ++degree[rel_ends_[j].second];
        }

        candidates_.assign(qn, {});
        for (std::size_t i = 0; i < qn; ++i) {
            const auto& qnode = q_.nodes[i];
            for (std::size_t v = 0; v < g_.node_count(); ++v) {
                const auto& n = g_.node_at(v);
                if (!labels_satisfied(qnode.labels, n.labels, opt_.labels)) continue;
                if (!properties_satisfied(qnode.properties, n.properties)) continue;
                if (opt_.mode != IsomorphismMode::Homomorphism && g_.incident(v).size() < degree[i]) continue;
                candidates_[i].push_back(v);
            }
            if (candidates_[i].empty()) return {};
        }

        plan_order(degree);
        node_image_.assign(qn, kUnset);
        rel_image_.assign(qr, kUnset);
        node_used_.assign(g_.node_count(), false);
        rel_used_.assign(g_.relationship_count(), false);
        extend_node(0);
        std::sort(out_.begin(), out_.end());
        return std::move(out_);
    }

private:
    static constexpr std::size_t kUnset = static_cast<std::size_t>(-1);

    // Greedy connected-first order; each step also lists the relations closed by that node.
    void plan_order(const std::vector<std::size_t>& degree) {
        const std::size_t qn = q_.nodes.size();
        std::vector<bool> placed(qn, false);
        for (std::size_t step = 0; step < qn; ++step) {
            std::size_t best = kUnset;
            std::size_t best_links = 0;
            for (std::size_t i = 0; i < qn; ++i) {
                if (placed[i]) continue;
                std::size_t links = 0;
                for (const auto& [a, b] : rel_ends_)
                    if ((a == i && b != i && placed[b]) || (b == i && a != i && placed[a])) ++links;
                auto better = [&] {
                    if (best == kUnset) return true;
                    if (links != best_links) return links > best_links;
                    if (candidates_[i].size() != candidates_[best].size())
                        return candidates_[i].size() < candidates_[best].size();
                    return degree[i] > degree[best];
                };
                if (better()) {
                    best = i;
                    best_links = links;
                }
            }
            placed[best] = true;
            order_.push_back(best);
            std::vector<std::size_t> closes;
            for (std::size_t j = 0; j < rel_ends_.size(); ++j) {
                const auto [a, b] = rel_ends_[j];
                if ((a == best || b == best) && placed[a] && placed[b]) closes.push_back(j);
            }
            closes_.push_back(std::move(closes));
        }
    }

    void extend_node(std::size_t step) {
        if (step == order_.size()) {
            emit();
            return;
        }
        const std::size_t qi = order_[step];
        const bool injective = opt_.mode == IsomorphismMode::NodeIso;
        for (std::size_t v : candidates_[qi]) {
            if (injective && node_used_[v]) continue;
            node_image_[qi] = v;
            if (injective) node_used_[v] = true;
            extend_rel(step, 0);
            if (injective) node_used_[v] = false;
        }
        node_image_[qi] = kUnset;
    }

    void extend_rel(std::size_t step, std::size_t k) {
        const auto& closes = closes_[step];
        if (k == closes.size()) {
            extend_node(step + 1);
            return;
        }
        const std::size_t qj = closes[k];
        const auto& qrel = q_.relationships[qj];
        const std::size_t a = node_image_[rel_ends_[qj].first];
        const std::size_t b = node_image_[rel_ends_[qj].second];
        for (std::size_t e : g_.incident(a)) {
            if (opt_.mode != IsomorphismMode::Homomorphism && rel_used_[e]) continue;
            const std::size_t s = g_.source_index(e);
            const std::size_t t = g_.target_index(e);
            const bool forward = s == a && t == b;
            const bool backward = s == b && t == a;
            if (!(forward || (!qrel.directed && backward))) continue;
            const auto& rec = g_.relationship_at(e);
            if (qrel.type && rec.type != *qrel.type) continue;
            if (!properties_satisfied(qrel.properties, rec.properties)) continue;
            rel_image_[qj] = e;
            const bool was_used = rel_used_[e];
            rel_used_[e] = true;
            extend_rel(step, k + 1);
            rel_used_[e] = was_used;
        }
        rel_image_[qj] = kUnset;
    }

    void emit() {
        Embedding emb;
        emb.nodes.reserve(node_image_.size());
        for (std::size_t v : node_image_) emb.nodes.push_back(g_.node_at(v).id);
        emb.rels.reserve(rel_image_.size());
        for (std::size_t e : rel_image_) emb.rels.push_back(g_.relationship_at(e).id);
        out_.push_back(std::move(emb));
    }

    const QueryGraph& q_;
    const PropertyGraph& g_;
    MatchOptions opt_;
    std::vector<std::pair<std::size_t, std::size_t>> rel_ends_;
    std::vector<std::vector<std::size_t>> candidates_;
    std::vector<std::size_t> order_;
    std::vector<std::vector<std::size_t>> closes_;
    std::vector<std::size_t> node_image_;
    std::vector<std::size_t> rel_image_;
    std::vector<bool> node_used_;
    std::vector<bool> rel_used_;
    std::vector<Embedding> out_;
};

} // namespace detail

/// Backtracking subgraph matcher; the reference semantics for query execution.
/// Results are sorted by (node images, relation images).
inline std::vector<Embedding> match_subgraph(const QueryGraph& query, const PropertyGraph& store, MatchOptions options) {
    return detail::Matcher(query, store, options).run();
}

inline std::vector<Embedding> match_subgraph(const QueryGraph& query, const PropertyGraph& store,
                                             IsomorphismMode mode = IsomorphismMode::NodeIso) {
    return match_subgraph(query, store, MatchOptions{mode, LabelMatch::Subset});
}

} // namespace gqw
