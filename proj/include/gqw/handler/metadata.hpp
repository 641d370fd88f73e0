#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>

#include "gqw/graph/interchange.hpp"
#include "gqw/graph/property_graph.hpp"
#include "gqw/graph/schema.hpp"
#include "gqw/graph/value.hpp"

namespace gqw {

struct Metadata {
    std::size_t node_count = 0;
    std::size_t rel_count = 0;
    std::map<std::string, std::size_t> labels;
    std::map<std::string, std::size_t> types;
    std::map<std::pair<OwnerKind, std::string>, std::set<ValueType>> properties;
    /// Distinct label combinations carried by nodes.
    std::set<LabelSet> label_sets;
    PropertyGraph schema;

    /// No node carries two labels, so two different labels prove two nodes distinct.
    bool exclusive_labels() const {
        for (const auto& s : label_sets)
            if (s.size() > 1) return false;
        return true;
    }
};

/// Metadata straight from the incrementally maintained count store; never iterates elements.
inline Metadata metadata_from_counts(const PropertyGraph& g) {
    const auto& c = g.counts();
    Metadata m;
    m.node_count = c.node_count();
    m.rel_count = c.relationship_count();
    m.labels = c.label_table();
    m.types = c.type_table();
    for (const auto& [key, types] : c.property_registry())
        for (const auto& [t, n] : types) m.properties[key].insert(t);
    for (const auto& [labels, n] : c.label_set_table()) m.label_sets.insert(labels);
    m.schema = schema_graph(g);
    return m;
}

// Metadata document:
//   { "node_count": 5, "relationship_count": 4,
//     "labels": { "Person": 3 }, "types": { "ACTED_IN": 4 },
//     "properties": [ { "owner": "node", "key": "name", "types": ["String"] } ],
//     "label_sets": [ ["Movie"], ["Person"] ], "exclusive_labels": true,
//     "schema": <graph document> }
inline json metadata_to_json(const Metadata& m) {
    json props = json::array();
    for (const auto& [key, types] : m.properties) {
        json ts = json::array();
        for (auto t : types) ts.push_back(std::string(to_string(t)));
        props.push_back({{"owner", std::string(to_string(key.first))}, {"key", key.second}, {"types", std::move(ts)}});
    }
    json sets = json::array();
    for (const auto& s : m.label_sets) sets.push_back(json(s));
    return {{"node_count", m.node_count},
            {"relationship_count", m.rel_count},
            {"labels", json(m.labels)},
            {"types", json(m.types)},
            {"properties", std::move(props)},
            {"label_sets", std::move(sets)},
            {"exclusive_labels", m.exclusive_labels()},
            {"schema", graph_to_json(m.schema)}};
}

} // namespace gqw
