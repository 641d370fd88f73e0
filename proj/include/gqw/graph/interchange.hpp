#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "gqw/error.hpp"
#include "gqw/graph/property_graph.hpp"
#include "gqw/graph/value.hpp"

// Graph interchange document (UTF-8 JSON):
//
//   { "nodes": [ { "id": "a", "labels": ["Person"], "properties": { "name": "Ann" } } ],
//     "relationships": [ { "id": "r1", "type": "KNOWS", "source": "a", "target": "b",
//                          "properties": { "since": 2010 } } ] }
//
// IDs are strings. Property values are booleans, integers, floats or strings; null, arrays and
// objects are rejected. "labels" and "properties" may be omitted.

namespace gqw {

using json = nlohmann::json;

inline json scalar_to_json(const Scalar& value) {
    return std::visit([](const auto& v) { return json(v); }, value);
}

inline Scalar scalar_from_json(const json& j, std::string_view context) {
    switch (j.type()) {
    case json::value_t::boolean: return j.get<bool>();
    case json::value_t::number_integer: return j.get<std::int64_t>();
    case json::value_t::number_unsigned: {
        auto u = j.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(INT64_MAX))
            throw Error(ErrorCode::InvalidValue, std::string(context) + ": integer out of range");
        return static_cast<std::int64_t>(u);
    }
    case json::value_t::number_float: return j.get<double>();
    case json::value_t::string: return j.get<std::string>();
    default:
        throw Error(ErrorCode::InvalidValue,
                    std::string(context) + ": property values must be boolean, integer, float or string (got " +
                        j.type_name() + ")");
    }
}

inline json properties_to_json(const PropertyMap& props) {
    json out = json::object();
    for (const auto& [k, v] : props) out[k] = scalar_to_json(v);
    return out;
}

inline PropertyMap properties_from_json(const json& j, std::string_view context) {
    PropertyMap out;
    if (j.is_null()) return out;
    if (!j.is_object()) throw Error(ErrorCode::ParseError, std::string(context) + ": 'properties' must be an object");
    for (const auto& [k, v] : j.items()) {
        if (k.empty()) throw Error(ErrorCode::InvalidValue, std::string(context) + ": empty property key");
        out.emplace(k, scalar_from_json(v, std::string(context) + "." + k));
    }
    return out;
}

/// Parses text as JSON, converting the library's byte offset into a line/column message.
inline json parse_json_document(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t column = 1;
        const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < limit; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                               " (offset " + std::to_string(e.byte) + "): " + e.what());
    }
}

namespace detail {

inline std::string require_string(const json& obj, const char* key, std::string_view context) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
        throw Error(ErrorCode::ParseError, std::string(context) + ": missing string field '" + key + "'");
    return it->get<std::string>();
}

inline LabelSet labels_from_json(const json& obj, std::string_view context) {
    LabelSet labels;
    auto it = obj.find("labels");
    if (it == obj.end() || it->is_null()) return labels;
    if (!it->is_array()) throw Error(ErrorCode::ParseError, std::string(context) + ": 'labels' must be an array");
    for (const auto& l : *it) {
        if (!l.is_string() || l.get<std::string>().empty())
            throw Error(ErrorCode::ParseError, std::string(context) + ": labels must be non-empty strings");
        labels.insert(l.get<std::string>());
    }
    return labels;
}

inline const json& require_array(const json& doc, const char* key) {
    static const json empty = json::array();
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return empty;
    if (!it->is_array()) throw Error(ErrorCode::ParseError, std::string("'") + key + "' must be an array");
    return *it;
}

} // namespace detail

inline json node_to_json(const NodeRecord& n) {
    return json{{"id", n.id.value}, {"labels", n.labels}, {"properties", properties_to_json(n.properties)}};
}

inline json relationship_to_json(const RelRecord& r) {
    return json{{"id", r.id.value},
                {"type", r.type},
                {"source", r.source.value},
                {"target", r.target.value},
                {"properties", properties_to_json(r.properties)}};
}

inline NodeRecord node_from_json(const json& obj) {
    if (!obj.is_object()) throw Error(ErrorCode::ParseError, "node entries must be objects");
    NodeRecord n;
    n.id.value = detail::require_string(obj, "id", "node");
    const std::string ctx = "node '" + n.id.value + "'";
    n.labels = detail::labels_from_json(obj, ctx);
    n.properties = properties_from_json(obj.value("properties", json()), ctx);
    return n;
}

inline RelRecord relationship_from_json(const json& obj) {
    if (!obj.is_object()) throw Error(ErrorCode::ParseError, "relationship entries must be objects");
    RelRecord r;
    r.id.value = detail::require_string(obj, "id", "relationship");
    const std::string ctx = "relationship '" + r.id.value + "'";
    r.type = detail::require_string(obj, "type", ctx);
    r.source.value = detail::require_string(obj, "source", ctx);
    r.target.value = detail::require_string(obj, "target", ctx);
    r.properties = properties_from_json(obj.value("properties", json()), ctx);
    return r;
}

inline json graph_to_json(const PropertyGraph& g) {
    json nodes = json::array();
    json rels = json::array();
    for (std::size_t i = 0; i < g.node_count(); ++i) nodes.push_back(node_to_json(g.node_at(i)));
    for (std::size_t i = 0; i < g.relationship_count(); ++i) rels.push_back(relationship_to_json(g.relationship_at(i)));
    return json{{"nodes", std::move(nodes)}, {"relationships", std::move(rels)}};
}

inline PropertyGraph graph_from_json(const json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::ParseError, "graph document must be an object");
    PropertyGraph g;
    for (const auto& n : detail::require_array(doc, "nodes")) g.add_node(node_from_json(n));
    for (const auto& r : detail::require_array(doc, "relationships")) g.add_relationship(relationship_from_json(r));
    return g;
}

inline PropertyGraph load_graph(std::string_view document) {
    return graph_from_json(parse_json_document(document));
}

inline std::string serialize_graph(const PropertyGraph& g, int indent = -1) {
    return graph_to_json(g).dump(indent);
}

} // namespace gqw
