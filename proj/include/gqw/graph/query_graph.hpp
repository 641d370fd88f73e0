#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gqw/error.hpp"
#include "gqw/graph/interchange.hpp"
#include "gqw/graph/property_graph.hpp"

// QueryGraph document (UTF-8 JSON, same scalar model as the graph interchange format):
//
//   { "nodes": [ { "id": "a", "labels": ["Person"], "properties": { "name": "Ann" } } ],
//     "relationships": [ { "id": "e", "type": "KNOWS", "directed": false,
//                          "source": "a", "target": "b", "properties": {} } ] }
//
// "labels" may be replaced by a single "label" string; "type", "directed", "labels" and
// "properties" are optional.

namespace gqw {

struct QueryNode {
    std::string id;
    LabelSet labels;
    PropertyMap properties;
    bool operator==(const QueryNode&) const = default;
};

struct QueryRelation {
    std::string id;
    std::optional<std::string> type;
    bool directed = false;
    PropertyMap properties;
    std::string source;
    std::string target;
    bool operator==(const QueryRelation&) const = default;
};

/// The visual query: nodes and relations with label/type and property-equality constraints.
struct QueryGraph {
    std::vector<QueryNode> nodes;
    std::vector<QueryRelation> relationships;

    bool operator==(const QueryGraph&) const = default;

    bool empty() const noexcept { return nodes.empty(); }

    std::optional<std::size_t> node_position(std::string_view id) const {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].id == id) return i;
        return std::nullopt;
    }

    std::optional<std::size_t> relationship_position(std::string_view id) const {
        for (std::size_t i = 0; i < relationships.size(); ++i)
            if (relationships[i].id == id) return i;
        return std::nullopt;
    }

    bool has_id(std::string_view id) const { return node_position(id) || relationship_position(id); }

    QueryNode& add_node(std::string id, LabelSet labels = {}, PropertyMap props = {}) {
        nodes.push_back(QueryNode{std::move(id), std::move(labels), std::move(props)});
        return nodes.back();
    }

    QueryRelation& add_relationship(std::string id, std::string source, std::string target,
                                    std::optional<std::string> type = std::nullopt, bool directed = false,
                                    PropertyMap props = {}) {
        relationships.push_back(
            QueryRelation{std::move(id), std::move(type), directed, std::move(props), std::move(source), std::move(target)});
        return relationships.back();
    }

    /// Element ids must be unique across nodes and relations; endpoints must exist.
    void validate() const {
        std::set<std::string> seen;
        for (const auto& n : nodes) {
            if (n.id.empty()) throw Error(ErrorCode::InvalidQuery, "query node id must be non-empty");
            if (!seen.insert(n.id).second) throw Error(ErrorCode::InvalidQuery, "duplicate query element id '" + n.id + "'");
            for (const auto& l : n.labels)
                if (l.empty()) throw Error(ErrorCode::InvalidQuery, "query node '" + n.id + "' has an empty label");
            for (const auto& [k, v] : n.properties)
                if (k.empty()) throw Error(ErrorCode::InvalidQuery, "query node '" + n.id + "' has an empty property key");
        }
        for (const auto& r : relationships) {
            if (r.id.empty()) throw Error(ErrorCode::InvalidQuery, "query relation id must be non-empty");
            if (!seen.insert(r.id).second) throw Error(ErrorCode::InvalidQuery, "duplicate query element id '" + r.id + "'");
            if (r.type && r.type->empty()) throw Error(ErrorCode::InvalidQuery, "query relation '" + r.id + "' has an empty type");
            if (!node_position(r.source) || !node_position(r.target))
                throw Error(ErrorCode::InvalidQuery, "query relation '" + r.id + "' references a missing node");
            for (const auto& [k, v] : r.properties)
                if (k.empty()) throw Error(ErrorCode::InvalidQuery, "query relation '" + r.id + "' has an empty property key");
        }
    }
};

inline json query_to_json(const QueryGraph& q) {
    json nodes = json::array();
    for (const auto& n : q.nodes)
        nodes.push_back(json{{"id", n.id}, {"labels", n.labels}, {"properties", properties_to_json(n.properties)}});
    json rels = json::array();
    for (const auto& r : q.relationships) {
        json j{{"id", r.id},
               {"directed", r.directed},
               {"source", r.source},
               {"target", r.target},
               {"properties", properties_to_json(r.properties)}};
        j["type"] = r.type ? json(*r.type) : json();
        rels.push_back(std::move(j));
    }
    return json{{"nodes", std::move(nodes)}, {"relationships", std::move(rels)}};
}

inline QueryGraph query_from_json(const json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::ParseError, "query document must be an object");
    QueryGraph q;
    for (const auto& n : detail::require_array(doc, "nodes")) {
        if (!n.is_object()) throw Error(ErrorCode::ParseError, "query nodes must be objects");
        QueryNode node;
        node.id = detail::require_string(n, "id", "query node");
        const std::string ctx = "query node '" + node.id + "'";
        node.labels = detail::labels_from_json(n, ctx);
        if (auto it = n.find("label"); it != n.end() && !it->is_null()) {
            if (!it->is_string()) throw Error(ErrorCode::ParseError, ctx + ": 'label' must be a string");
            node.labels.insert(it->get<std::string>());
        }
        node.properties = properties_from_json(n.value("properties", json()), ctx);
        q.nodes.push_back(std::move(node));
    }
    for (const auto& r : detail::require_array(doc, "relationships")) {
        if (!r.is_object()) throw Error(ErrorCode::ParseError, "query relationships must be objects");
        QueryRelation rel;
        rel.id = detail::require_string(r, "id", "query relation");
        const std::string ctx = "query relation '" + rel.id + "'";
        if (auto it = r.find("type"); it != r.end() && !it->is_null()) {
            if (!it->is_string()) throw Error(ErrorCode::ParseError, ctx + ": 'type' must be a string");
            rel.type = it->get<std::string>();
        }
        if (auto it = r.find("directed"); it != r.end() && !it->is_null()) {
            if (!it->is_boolean()) throw Error(ErrorCode::ParseError, ctx + ": 'directed' must be a boolean");
            rel.directed = it->get<bool>();
        }
        rel.source = detail::require_string(r, "source", ctx);
        rel.target = detail::require_string(r, "target", ctx);
        rel.properties = properties_from_json(r.value("properties", json()), ctx);
        q.relationships.push_back(std::move(rel));
    }
    q.validate();
    return q;
}

inline QueryGraph load_query(std::string_view document) { return query_from_json(parse_json_document(document)); }

} // namespace gqw
