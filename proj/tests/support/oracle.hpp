#pragma once

// Reference computations written independently of the library algorithms they check.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "gqw/graph/matcher.hpp"
#include "gqw/graph/property_graph.hpp"
#include "gqw/graph/query_graph.hpp"
#include "gqw/graph/value.hpp"

namespace gqw::testing {

/// Every total map of query nodes to store nodes, then every choice of store relationship per
/// query relation; constraints are checked only on complete assignments.
inline std::vector<Embedding> brute_force_embeddings(const QueryGraph& q, const PropertyGraph& g, IsomorphismMode mode,
                                                     bool exact_labels = false) {
    std::vector<Embedding> out;
    const std::size_t k = q.nodes.size();
    const std::size_t n = g.node_count();
    const std::size_t m = g.relationship_count();
    if (k == 0) return out;
    if (n == 0) return out;
    auto props_ok = [](const PropertyMap& want, const PropertyMap& have) {
        for (const auto& [key, v] : want) {
            auto it = have.find(key);
            if (it == have.end() || !scalar_equal(v, it->second)) return false;
        }
        return true;
    };
    auto labels_ok = [&](const LabelSet& want, const LabelSet& have) {
        if (exact_labels) return want == have;
        return std::includes(have.begin(), have.end(), want.begin(), want.end());
    };

    std::vector<std::size_t> nmap(k, 0);
    for (;;) {
        bool ok = true;
        for (std::size_t i = 0; i < k && ok; ++i) {
            const auto& sn = g.node_at(nmap[i]);
            ok = labels_ok(q.nodes[i].labels, sn.labels) && props_ok(q.nodes[i].properties, sn.properties);
        }
        if (ok && mode == IsomorphismMode::NodeIso) {
            std::set<std::size_t> images(nmap.begin(), nmap.end());
            ok = images.size() == k;
        }
        if (ok) {
            const std::size_t r = q.relationships.size();
            std::vector<std::size_t> rmap(r, 0);
            bool more = m > 0 || r == 0;
            while (more) {
                bool good = true;
                for (std::size_t j = 0; j < r && good; ++j) {
                    const auto& qr = q.relationships[j];
                    const auto& sr = g.relationship_at(rmap[j]);
                    const auto a = nmap[*q.node_position(qr.source)];
                    const auto b = nmap[*q.node_position(qr.target)];
                    const auto s = g.source_index(rmap[j]);
                    const auto t = g.target_index(rmap[j]);
                    const bool ends = qr.directed ? (s == a && t == b) : ((s == a && t == b) || (s == b && t == a));
                    good = ends && (!qr.type || *qr.type == sr.type) && props_ok(qr.properties, sr.properties);
                }
                if (good && mode != IsomorphismMode::Homomorphism) {
                    std::set<std::size_t> used(rmap.begin(), rmap.end());
                    good = used.size() == r;
                }
                if (good) {
                    Embedding e;
                    for (auto v : nmap) e.nodes.push_back(g.node_at(v).id);
                    for (auto x : rmap) e.rels.push_back(g.relationship_at(x).id);
                    out.push_back(std::move(e));
                }
                std::size_t pos = 0;
                while (pos < r && ++rmap[pos] == m) rmap[pos++] = 0;
                more = pos < r;
            }
        }
        std::size_t pos = 0;
        while (pos < k && ++nmap[pos] == n) nmap[pos++] = 0;
        if (pos == k) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Smallest number of edges cut by any split of g into blocks of exactly `block` nodes
/// (exhaustive over all assignments; tiny graphs only).
inline std::size_t min_balanced_cut(const PropertyGraph& g, std::size_t block) {
    const std::size_t n = g.node_count();
    const std::size_t blocks = (n + block - 1) / block;
    std::vector<std::size_t> assign(n, 0);
    std::size_t best = g.relationship_count() + 1;
    std::function<void(std::size_t, std::vector<std::size_t>&)> rec = [&](std::size_t v, std::vector<std::size_t>& fill) {
        if (v == n) {
            std::size_t cut = 0;
            for (std::size_t e = 0; e < g.relationship_count(); ++e)
                if (assign[g.source_index(e)] != assign[g.target_index(e)]) ++cut;
            best = std::min(best, cut);
            return;
        }
        for (std::size_t b = 0; b < blocks; ++b) {
            if (fill[b] == block) continue;
            ++fill[b];
            assign[v] = b;
            rec(v + 1, fill);
            --fill[b];
        }
    };
    std::vector<std::size_t> fill(blocks, 0);
    rec(0, fill);
    return best;
}

/// Connected edge subsets of size `size`, grouped by isomorphism class (label- and type-exact),
/// using only permutation search. Returns the number of classes.
inline std::size_t count_connected_shapes(const std::vector<PropertyGraph>& parts, std::size_t size) {
    struct Shape {
        std::vector<LabelSet> nodes;
        std::vector<std::tuple<std::size_t, std::size_t, std::string>> edges; // sorted, u <= v
    };
    auto normal = [](Shape s) {
        for (auto& [u, v, t] : s.edges)
            if (u > v) std::swap(u, v);
        std::sort(s.edges.begin(), s.edges.end());
        return s;
    };
    auto same = [&](const Shape& a, const Shape& b) {
        if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) return false;
        std::vector<std::size_t> perm(a.nodes.size());
        std::iota(perm.begin(), perm.end(), 0);
        do {
            bool ok = true;
            for (std::size_t i = 0; i < perm.size() && ok; ++i) ok = a.nodes[i] == b.nodes[perm[i]];
            if (!ok) continue;
            Shape mapped{b.nodes, {}};
            for (auto [u, v, t] : a.edges) mapped.edges.emplace_back(perm[u], perm[v], t);
            if (normal(mapped).edges == b.edges) return true;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return false;
    };
    std::vector<Shape> classes;
    for (const auto& g : parts) {
        const std::size_t m = g.relationship_count();
        if (size > m) continue;
        std::vector<bool> pick(m, false);
        std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size), true);
        do {
            std::map<std::size_t, std::size_t> local;
            Shape s;
            auto id = [&](std::size_t v) {
                auto [it, fresh] = local.emplace(v, s.nodes.size());
                if (fresh) s.nodes.push_back(g.node_at(v).labels);
                return it->second;
            };
            for (std::size_t e = 0; e < m; ++e)
                if (pick[e]) s.edges.emplace_back(id(g.source_index(e)), id(g.target_index(e)), g.relationship_at(e).type);
            // connectivity by union-find over local nodes
            std::vector<std::size_t> parent(s.nodes.size());
            std::iota(parent.begin(), parent.end(), 0);
            std::function<std::size_t(std::size_t)> find = [&](std::size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
            for (auto [u, v, t] : s.edges) parent[find(u)] = find(v);
            std::set<std::size_t> roots;
            for (std::size_t i = 0; i < parent.size(); ++i) roots.insert(find(i));
            if (roots.size() != 1) continue;
            s = normal(s);
            if (std::none_of(classes.begin(), classes.end(), [&](const Shape& c) { return same(s, c); })) classes.push_back(s);
        } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    return classes.size();
}

} // namespace gqw::testing
