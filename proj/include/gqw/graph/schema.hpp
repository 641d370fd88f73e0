#pragma once

#include <string>

#include "gqw/graph/property_graph.hpp"

namespace gqw {

/// Schema node id for a label set: "(Person)", "(A:B)", "()" for unlabeled nodes.
inline std::string schema_node_id(const LabelSet& labels) { return "(" + label_key(labels) + ")"; }

inline std::string schema_relationship_id(const LabelSet& source, const std::string& type, const LabelSet& target) {
    return schema_node_id(source) + "-[" + type + "]->" + schema_node_id(target);
}

/// One node per distinct label set and one relationship per distinct
/// (source label set, type, target label set) triple, each carrying a "count" property.
/// Built from the count store only; never scans elements.
inline PropertyGraph schema_graph(const PropertyGraph& store) {
    PropertyGraph schema;
    const auto& counts = store.counts();
    for (const auto& [labels, n] : counts.label_set_table()) {
        schema.add_node(NodeRecord{NodeId{schema_node_id(labels)}, labels,
                                   PropertyMap{{"count", static_cast<std::int64_t>(n)}}});
    }
    for (const auto& [triple, n] : counts.triple_table()) {
        schema.add_relationship(RelRecord{RelId{schema_relationship_id(triple.source, triple.type, triple.target)},
                                          triple.type, NodeId{schema_node_id(triple.source)},
                                          NodeId{schema_node_id(triple.target)},
                                          PropertyMap{{"count", static_cast<std::int64_t>(n)}}});
    }
    return schema;
}

} // namespace gqw
