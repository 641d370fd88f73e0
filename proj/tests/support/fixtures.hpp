#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gqw/graph/property_graph.hpp"
#include "gqw/graph/query_graph.hpp"

namespace gqw::testing {

inline NodeRecord node(std::string id, LabelSet labels = {}, PropertyMap props = {}) {
    return NodeRecord{NodeId{std::move(id)}, std::move(labels), std::move(props)};
}

inline RelRecord rel(std::string id, std::string type, std::string s, std::string t, PropertyMap props = {}) {
    return RelRecord{RelId{std::move(id)}, std::move(type), NodeId{std::move(s)}, NodeId{std::move(t)}, std::move(props)};
}

/// (n2)-[r1]-(n1)-[r2]-(n3), unconstrained.
inline QueryGraph pattern_a_query() {
    QueryGraph q;
    q.add_node("n1");
    q.add_node("n2");
    q.add_node("n3");
    q.add_relationship("r1", "n2", "n1");
    q.add_relationship("r2", "n1", "n3");
    return q;
}

/// Two nodes joined by two parallel relationships.
inline PropertyGraph pattern_b_store() {
    PropertyGraph g;
    g.add_node(node("a"));
    g.add_node(node("b"));
    g.add_relationship(rel("x1", "LINK", "a", "b"));
    g.add_relationship(rel("x2", "LINK", "a", "b"));
    return g;
}

/// Two nodes joined by one relationship.
inline PropertyGraph pattern_c_store() {
    PropertyGraph g;
    g.add_node(node("a"));
    g.add_node(node("b"));
    g.add_relationship(rel("x1", "LINK", "a", "b"));
    return g;
}

inline PropertyGraph star(std::size_t leaves, const std::string& type = "LINK") {
    PropertyGraph g;
    g.add_node(node("c"));
    for (std::size_t i = 1; i <= leaves; ++i) {
        g.add_node(node("l" + std::to_string(i)));
        g.add_relationship(rel("s" + std::to_string(i), type, "c", "l" + std::to_string(i)));
    }
    return g;
}

inline PropertyGraph triangle(const std::vector<std::string>& types = {"LINK", "LINK", "LINK"}, LabelSet labels = {}) {
    PropertyGraph g;
    for (const char* id : {"a", "b", "c"}) g.add_node(node(id, labels));
    g.add_relationship(rel("t1", types.at(0), "a", "b"));
    g.add_relationship(rel("t2", types.at(1), "b", "c"));
    g.add_relationship(rel("t3", types.at(2), "c", "a"));
    return g;
}

inline PropertyGraph path_graph(std::size_t nodes, const std::string& type = "LINK") {
    PropertyGraph g;
    for (std::size_t i = 0; i < nodes; ++i) g.add_node(node("v" + std::to_string(i)));
    for (std::size_t i = 0; i + 1 < nodes; ++i)
        g.add_relationship(rel("e" + std::to_string(i), type, "v" + std::to_string(i), "v" + std::to_string(i + 1)));
    return g;
}

/// 3 Person, 2 Movie, 4 relationships.
inline PropertyGraph movies() {
    PropertyGraph g;
    g.add_node(node("p1", {"Person"}, {{"name", std::string("Ann")}, {"born", std::int64_t{1970}}}));
    g.add_node(node("p2", {"Person"}, {{"name", std::string("Bob")}}));
    g.add_node(node("p3", {"Person"}, {{"name", std::string("Cid")}, {"born", std::int64_t{1985}}}));
    g.add_node(node("m1", {"Movie"}, {{"title", std::string("Alpha")}, {"rating", 7.5}}));
    g.add_node(node("m2", {"Movie"}, {{"title", std::string("Beta")}}));
    g.add_relationship(rel("a1", "ACTED_IN", "p1", "m1", {{"role", std::string("lead")}}));
    g.add_relationship(rel("a2", "ACTED_IN", "p2", "m1"));
    g.add_relationship(rel("a3", "ACTED_IN", "p3", "m2"));
    g.add_relationship(rel("d1", "DIRECTED", "p1", "m2"));
    return g;
}

struct RandomStoreSpec {
    std::size_t nodes = 20;
    std::size_t rels = 30;
    std::vector<std::string> labels = {"A", "B"};
    std::vector<std::string> types = {"X", "Y"};
    double unlabeled = 0.2;     // chance a node has no label
    double multi_label = 0.0;   // chance a node gets a second label
    double self_loop = 0.05;
    std::size_t name_values = 3; // nodes get "k" in [0, name_values)
};

/// Random labeled multigraph with a small integer property "k" on every node.
inline PropertyGraph random_store(std::mt19937_64& rng, const RandomStoreSpec& spec) {
    PropertyGraph g;
    auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    auto chance = [&](double p) { return static_cast<double>(rng() % 1000000) / 1e6 < p; };
    for (std::size_t i = 0; i < spec.nodes; ++i) {
        LabelSet ls;
        if (!spec.labels.empty() && !chance(spec.unlabeled)) {
            ls.insert(spec.labels[pick(spec.labels.size())]);
            if (chance(spec.multi_label)) ls.insert(spec.labels[pick(spec.labels.size())]);
        }
        PropertyMap props;
        if (spec.name_values > 0) props["k"] = static_cast<std::int64_t>(pick(spec.name_values));
        g.add_node(node("v" + std::to_string(i), ls, props));
    }
    if (spec.nodes == 0) return g;
    for (std::size_t j = 0; j < spec.rels; ++j) {
        const auto s = pick(spec.nodes);
        auto t = pick(spec.nodes);
        if (s == t && !chance(spec.self_loop)) t = (s + 1 + pick(spec.nodes > 1 ? spec.nodes - 1 : 1)) % spec.nodes;
        g.add_relationship(rel("e" + std::to_string(j), spec.types[pick(spec.types.size())], "v" + std::to_string(s),
                               "v" + std::to_string(t)));
    }
    return g;
}

} // namespace gqw::testing
