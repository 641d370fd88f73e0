#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "gqw/error.hpp"
#include "gqw/graph/element_ref.hpp"
#include "gqw/graph/interchange.hpp"
#include "gqw/graph/matcher.hpp"
#include "gqw/graph/property_graph.hpp"
#include "gqw/graph/query_graph.hpp"

namespace gqw {

/// One returned variable: emitted name, originating query element, element kind.
struct ResultColumn {
    std::string variable;
    std::string element;
    ElementKind kind = ElementKind::Node;
    bool operator==(const ResultColumn&) const = default;
};

using Element = std::variant<NodeRecord, RelRecord>;

inline ElementRef ref_of(const Element& e) {
    if (const auto* n = std::get_if<NodeRecord>(&e)) return {ElementKind::Node, n->id.value};
    return {ElementKind::Relationship, std::get<RelRecord>(e).id.value};
}

/// Records as a store would return them with full element payloads inline.
struct RawResult {
    std::vector<ResultColumn> columns;
    std::vector<std::vector<Element>> records;
    bool operator==(const RawResult&) const = default;
};

/// Deduplicated result: each record is a row of element references aligned with `columns`,
/// and every referenced element is stored once in the distinct tables.
struct ResultSet {
    std::vector<ResultColumn> columns;
    std::vector<std::vector<ElementRef>> reference_list;
    std::map<NodeId, NodeRecord> distinct_nodes;
    std::map<RelId, RelRecord> distinct_rels;

    std::size_t record_count() const noexcept { return reference_list.size(); }
    std::size_t distinct_count() const noexcept { return distinct_nodes.size() + distinct_rels.size(); }

    /// Records as embeddings of q (node and relation order of q).
    std::vector<Embedding> embeddings(const QueryGraph& q) const {
        std::vector<std::size_t> node_col(q.nodes.size(), columns.size()), rel_col(q.relationships.size(), columns.size());
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (columns[c].kind == ElementKind::Node) {
                if (auto p = q.node_position(columns[c].element)) node_col[*p] = c;
            } else if (auto p = q.relationship_position(columns[c].element)) {
                rel_col[*p] = c;
            }
        }
        for (auto c : node_col)
            if (c == columns.size()) throw Error(ErrorCode::Validation, "result lacks a column for a query node");
        for (auto c : rel_col)
            if (c == columns.size()) throw Error(ErrorCode::Validation, "result lacks a column for a query relation");
        std::vector<Embedding> out;
        out.reserve(reference_list.size());
        for (const auto& row : reference_list) {
            Embedding e;
            for (auto c : node_col) e.nodes.push_back(NodeId{row[c].id});
            for (auto c : rel_col) e.rels.push_back(RelId{row[c].id});
            out.push_back(std::move(e));
        }
        return out;
    }

    /// Union of all distinct elements; relationships whose endpoints were not returned are left out.
    PropertyGraph result_graph() const {
        PropertyGraph g;
        for (const auto& [id, n] : distinct_nodes) g.add_node(n);
        for (const auto& [id, r] : distinct_rels)
            if (g.find_node(r.source) && g.find_node(r.target)) g.add_relationship(r);
        return g;
    }
};

/// Keeps each element payload once and replaces record entries by references. Two payloads with
/// the same id must be identical.
inline ResultSet dedupe(const RawResult& raw) {
    ResultSet out;
    out.columns = raw.columns;
    out.reference_list.reserve(raw.records.size());
    for (const auto& rec : raw.records) {
        if (rec.size() != raw.columns.size()) throw Error(ErrorCode::Validation, "record width differs from column count");
        std::vector<ElementRef> row;
        row.reserve(rec.size());
        for (const auto& el : rec) {
            if (const auto* n = std::get_if<NodeRecord>(&el)) {
                auto [it, fresh] = out.distinct_nodes.try_emplace(n->id, *n);
                if (!fresh && !(it->second == *n))
                    throw Error(ErrorCode::Validation, "conflicting payloads for node '" + n->id.value + "'");
            } else {
                const auto& r = std::get<RelRecord>(el);
                auto [it, fresh] = out.distinct_rels.try_emplace(r.id, r);
                if (!fresh && !(it->second == r))
                    throw Error(ErrorCode::Validation, "conflicting payloads for relationship '" + r.id.value + "'");
            }
            row.push_back(ref_of(el));
        }
        out.reference_list.push_back(std::move(row));
    }
    return out;
}

inline RawResult reconstruct(const ResultSet& rs) {
    RawResult out;
    out.columns = rs.columns;
    out.records.reserve(rs.reference_list.size());
    for (const auto& row : rs.reference_list) {
        std::vector<Element> rec;
        rec.reserve(row.size());
        for (const auto& ref : row) {
            if (ref.kind == ElementKind::Node) {
                auto it = rs.distinct_nodes.find(NodeId{ref.id});
                if (it == rs.distinct_nodes.end()) throw Error(ErrorCode::NotFound, "dangling node reference '" + ref.id + "'");
                rec.emplace_back(it->second);
            } else {
                auto it = rs.distinct_rels.find(RelId{ref.id});
                if (it == rs.distinct_rels.end()) throw Error(ErrorCode::NotFound, "dangling relationship reference '" + ref.id + "'");
                rec.emplace_back(it->second);
            }
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

// Result document:
//   { "columns": [ { "variable": "n1", "element": "a", "kind": "node" } ],
//     "records": [ [ "id", ... ] ],   aligned with columns
//     "nodes": [ <node> ], "relationships": [ <relationship> ] }
inline json result_to_json(const ResultSet& rs) {
    json columns = json::array();
    for (const auto& c : rs.columns)
        columns.push_back({{"variable", c.variable}, {"element", c.element}, {"kind", std::string(to_string(c.kind))}});
    json records = json::array();
    for (const auto& row : rs.reference_list) {
        json r = json::array();
        for (const auto& ref : row) r.push_back(ref.id);
        records.push_back(std::move(r));
    }
    json nodes = json::array(), rels = json::array();
    for (const auto& [id, n] : rs.distinct_nodes) nodes.push_back(node_to_json(n));
    for (const auto& [id, r] : rs.distinct_rels) rels.push_back(relationship_to_json(r));
    return {{"columns", std::move(columns)},
            {"records", std::move(records)},
            {"nodes", std::move(nodes)},
            {"relationships", std::move(rels)}};
}

inline ResultSet result_from_json(const json& doc) {
    ResultSet rs;
    for (const auto& c : detail::require_array(doc, "columns")) {
        const auto kind = detail::require_string(c, "kind", "column");
        if (kind != "node" && kind != "relationship") throw Error(ErrorCode::ParseError, "column kind must be node or relationship");
        rs.columns.push_back(ResultColumn{detail::require_string(c, "variable", "column"), detail::require_string(c, "element", "column"),
                                          kind == "node" ? ElementKind::Node : ElementKind::Relationship});
    }
    for (const auto& row : detail::require_array(doc, "records")) {
        if (!row.is_array() || row.size() != rs.columns.size()) throw Error(ErrorCode::ParseError, "record width differs from column count");
        std::vector<ElementRef> refs;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (!row[c].is_string()) throw Error(ErrorCode::ParseError, "record entries must be id strings");
            refs.push_back(ElementRef{rs.columns[c].kind, row[c].get<std::string>()});
        }
        rs.reference_list.push_back(std::move(refs));
    }
    for (const auto& n : detail::require_array(doc, "nodes")) {
        auto rec = node_from_json(n);
        rs.distinct_nodes.emplace(rec.id, std::move(rec));
    }
    for (const auto& r : detail::require_array(doc, "relationships")) {
        auto rec = relationship_from_json(r);
        rs.distinct_rels.emplace(rec.id, std::move(rec));
    }
    return rs;
}

} // namespace gqw
