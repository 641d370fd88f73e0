#pragma once

#include <array>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "gqw/cypher/parser.hpp"
#include "gqw/cypher/translate.hpp"
#include "gqw/error.hpp"
#include "gqw/graph/interchange.hpp"

// Wire protocol of the remote adapter: the graph database's HTTP transactional API.
//
//   POST /db/{database}/tx/commit          one-shot transaction
//   POST /db/{database}/tx                 open; 201 with "commit": ".../tx/{n}/commit"
//   POST /db/{database}/tx/{n}             run statements inside the open transaction
//   POST /db/{database}/tx/{n}/commit      run (optional) statements and close
//
// Every request carries "Authorization: Basic ...", "Accept: application/json",
// "Content-Type: application/json" and "access-mode: READ". Bodies:
//
//   { "statements": [ { "statement": "...", "parameters": { ... },
//                       "resultDataContents": [ "row" ] } ] }
//
//   { "results": [ { "columns": [ ... ], "data": [ { "row": [ ... ] } ] } ],
//     "errors": [ { "code": "...", "message": "..." } ] }
//
// With "resultDataContents": ["graph"] each data entry holds
// { "graph": { "nodes": [ {id, labels, properties} ],
//              "relationships": [ {id, type, startNode, endNode, properties} ] } }.

namespace gqw::protocol {

inline constexpr std::string_view kPing = "RETURN 1";
inline constexpr std::string_view kNodeCount = "MATCH (n) RETURN count(n) AS count";
inline constexpr std::string_view kRelCount = "MATCH ()-[r]->() RETURN count(r) AS count";
inline constexpr std::string_view kLabels = "CALL db.labels() YIELD label RETURN label";
inline constexpr std::string_view kTypes = "CALL db.relationshipTypes() YIELD relationshipType RETURN relationshipType";
inline constexpr std::string_view kNodeProperties =
    "CALL db.schema.nodeTypeProperties() YIELD nodeLabels, propertyName, propertyTypes "
    "RETURN nodeLabels, propertyName, propertyTypes";
inline constexpr std::string_view kRelProperties =
    "CALL db.schema.relTypeProperties() YIELD relType, propertyName, propertyTypes "
    "RETURN relType, propertyName, propertyTypes";
inline constexpr std::string_view kSchema = "CALL db.schema.visualization()";
inline constexpr std::string_view kFetchNodes =
    "MATCH (n) WHERE id(n) IN $ids RETURN id(n) AS id, labels(n) AS labels, properties(n) AS properties";
inline constexpr std::string_view kFetchRels =
    "MATCH ()-[r]->() WHERE id(r) IN $ids RETURN id(r) AS id, type(r) AS type, id(startNode(r)) AS source, "
    "id(endNode(r)) AS target, properties(r) AS properties";
inline constexpr std::string_view kExportNodes =
    "MATCH (n) RETURN id(n) AS id, labels(n) AS labels, properties(n) AS properties ORDER BY id SKIP $skip LIMIT $limit";
inline constexpr std::string_view kExportRels =
    "MATCH ()-[r]->() RETURN id(r) AS id, type(r) AS type, id(startNode(r)) AS source, id(endNode(r)) AS target, "
    "properties(r) AS properties ORDER BY id SKIP $skip LIMIT $limit";

inline constexpr std::array<std::string_view, 12> kFixedStatements{kPing,          kNodeCount,     kRelCount,  kLabels,
                                                                   kTypes,         kNodeProperties, kRelProperties, kSchema,
                                                                   kFetchNodes,    kFetchRels,     kExportNodes, kExportRels};

inline std::string backtick(const std::string& name) {
    std::string out = "`";
    for (char c : name) {
        if (c == '`') out += '`';
        out += c;
    }
    return out + "`";
}

inline std::string label_count_statement(const std::string& label) {
    return "MATCH (n:" + backtick(label) + ") RETURN count(n) AS count";
}

inline std::string type_count_statement(const std::string& type) {
    return "MATCH ()-[r:" + backtick(type) + "]->() RETURN count(r) AS count";
}

/// Metadata statements: the fixed ones plus one count per label and per type.
inline bool is_metadata_statement(std::string_view s) {
    for (auto f : {kPing, kNodeCount, kRelCount, kLabels, kTypes, kNodeProperties, kRelProperties, kSchema})
        if (s == f) return true;
    static const std::regex label_count(R"(MATCH \(n:`(?:[^`]|``)+`\) RETURN count\(n\) AS count)");
    static const std::regex type_count(R"(MATCH \(\)-\[r:`(?:[^`]|``)+`\]->\(\) RETURN count\(r\) AS count)");
    const std::string text(s);
    return std::regex_match(text, label_count) || std::regex_match(text, type_count);
}

/// Read-only allowlist shared by the adapter and the server: the documented fixed and templated
/// statements, plus anything inside the translator's emission grammar (which has no write clause).
inline bool is_allowed_statement(std::string_view s) {
    for (auto f : kFixedStatements)
        if (s == f) return true;
    if (is_metadata_statement(s)) return true;
    try {
        (void)cypher::parse(s);
        return true;
    } catch (const Error&) {
        return false;
    }
}

struct Statement {
    std::string text;
    json parameters = json::object();
    bool graph = false; // request the graph result format instead of rows
};

inline json request_body(const std::vector<Statement>& statements) {
    json list = json::array();
    for (const auto& s : statements) {
        if (!is_allowed_statement(s.text))
            throw Error(ErrorCode::ReadOnlyViolation, "statement outside the read-only grammar: " + s.text);
        list.push_back({{"statement", s.text},
                        {"parameters", s.parameters},
                        {"resultDataContents", json::array({s.graph ? "graph" : "row"})}});
    }
    return {{"statements", std::move(list)}};
}

struct StatementResult {
    std::vector<std::string> columns;
    std::vector<json> rows;   // row format: one array per record
    std::vector<json> graphs; // graph format: one {nodes, relationships} per record
};

/// Interprets a transactional response body. Server-side errors surface verbatim.
inline std::vector<StatementResult> parse_response(std::string_view body, std::size_t expected) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception&) {
        throw Error(ErrorCode::Capability, "endpoint did not answer with a transactional JSON document");
    }
    if (!doc.is_object()) throw Error(ErrorCode::Capability, "endpoint did not answer with a transactional JSON document");
    if (auto it = doc.find("errors"); it != doc.end() && it->is_array() && !it->empty()) {
        const auto& e = (*it)[0];
        std::string message = e.value("message", std::string{});
        const std::string code = e.value("code", std::string{});
        if (code.find("Security.Unauthorized") != std::string::npos || code.find("Security.AuthenticationRateLimit") != std::string::npos)
            throw Error(ErrorCode::Authentication, message);
        if (code.find("Forbidden") != std::string::npos && code.find("ReadOnly") != std::string::npos)
            throw Error(ErrorCode::ReadOnlyViolation, message);
        throw Error(ErrorCode::RemoteQuery, message);
    }
    auto results = doc.find("results");
    if (results == doc.end() || !results->is_array())
        throw Error(ErrorCode::Capability, "response lacks a results array; transactional HTTP API not available");
    if (results->size() != expected)
        throw Error(ErrorCode::Capability, "response holds " + std::to_string(results->size()) + " results for " +
                                               std::to_string(expected) + " statements");
    std::vector<StatementResult> out;
    for (const auto& r : *results) {
        StatementResult sr;
        if (auto c = r.find("columns"); c != r.end() && c->is_array())
            for (const auto& name : *c) sr.columns.push_back(name.is_string() ? name.get<std::string>() : name.dump());
        if (auto d = r.find("data"); d != r.end() && d->is_array()) {
            for (const auto& entry : *d) {
                if (auto row = entry.find("row"); row != entry.end()) sr.rows.push_back(*row);
                if (auto g = entry.find("graph"); g != entry.end()) sr.graphs.push_back(*g);
            }
        }
        out.push_back(std::move(sr));
    }
    return out;
}

/// Element ids travel as strings or integers depending on the server; both map to one string.
inline std::string id_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return v.dump();
    throw Error(ErrorCode::Capability, "element id of unexpected JSON type " + std::string(v.type_name()));
}

} // namespace gqw::protocol
