#pragma once

#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gqw/error.hpp"
#include "gqw/graph/matcher.hpp"
#include "gqw/graph/query_graph.hpp"
#include "gqw/graph/value.hpp"

// Emission grammar (every statement produced here parses with gqw/cypher/parser.hpp):
//
//   MATCH <part>,\n      <part> ...        one part per relation, then one per isolated node
//   WHERE <cond> AND <cond> ...           property equalities, then id(a) <> id(b) inequalities
//   RETURN n1, n2, ..., r1, r2, ...       or "id(n1) AS n1, ..." in reference mode
//
//   <part> := (n1:Label)-[r1:TYPE]-(n2)   "->" for directed relations; labels on first use only
//
// Homomorphism mode emits one "MATCH <part>" clause per line instead of a single clause, which
// drops relationship uniqueness between parts.

namespace gqw {

enum class ReturnMode { Elements, References };

struct TranslateOptions {
    /// NodeIso adds node-pair inequalities; RelIsoOnly omits them; Homomorphism also splits
    /// the MATCH clause.
    IsomorphismMode isomorphism = IsomorphismMode::NodeIso;
    bool eliminate_trivial = true;
    /// Every store node carries at most one label, so differing labels prove distinctness.
    bool exclusive_labels = true;
    ReturnMode returns = ReturnMode::Elements;
};

struct CypherText {
    std::string text;
    /// Query element id -> emitted variable name.
    std::map<std::string, std::string> var_map;
    /// Node-pair inequalities present in the WHERE clause, as query node positions (i < j).
    std::vector<std::pair<std::size_t, std::size_t>> inequalities;
};

namespace cypher {

inline bool is_plain_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

inline std::string quote_identifier(std::string_view s) {
    if (is_plain_identifier(s)) return std::string(s);
    std::string out = "`";
    for (char c : s) {
        if (c == '`') out += '`';
        out += c;
    }
    out += '`';
    return out;
}

inline std::string string_literal(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    out += '"';
    return out;
}

inline std::string literal(const Scalar& v) {
    struct Visitor {
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return format_double(d); }
        std::string operator()(const std::string& s) const { return string_literal(s); }
    };
    return std::visit(Visitor{}, v);
}

} // namespace cypher

/// A node pair needs no inequality when the two nodes provably cannot bind the same element:
/// differing label annotations (both present, under exclusive labels) or contradictory equality
/// constraints on a shared property key.
inline bool provably_distinct(const QueryNode& a, const QueryNode& b, bool exclusive_labels = true) {
    if (exclusive_labels && !a.labels.empty() && !b.labels.empty() && a.labels != b.labels) return true;
    for (const auto& [k, v] : a.properties) {
        auto it = b.properties.find(k);
        if (it != b.properties.end() && !scalar_equal(v, it->second)) return true;
    }
    return false;
}

inline std::vector<std::pair<std::size_t, std::size_t>> node_pairs(const QueryGraph& q) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
        for (std::size_t j = i + 1; j < q.nodes.size(); ++j) pairs.emplace_back(i, j);
    return pairs;
}

/// Drops the pairs whose inequality is implied by the nodes' own constraints.
inline std::vector<std::pair<std::size_t, std::size_t>>
eliminate_trivial(const QueryGraph& q, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                  bool exclusive_labels = true) {
    std::vector<std::pair<std::size_t, std::size_t>> kept;
    for (const auto& [i, j] : pairs)
        if (!provably_distinct(q.nodes.at(i), q.nodes.at(j), exclusive_labels)) kept.emplace_back(i, j);
    return kept;
}

inline CypherText translate(const QueryGraph& q, const TranslateOptions& options = {}) {
    if (q.nodes.empty()) throw Error(ErrorCode::EmptyQuery, "query has no nodes");
    q.validate();

    CypherText out;
    std::vector<std::string> node_var(q.nodes.size());
    std::vector<std::string> rel_var(q.relationships.size());
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        node_var[i] = "n" + std::to_string(i + 1);
        out.var_map[q.nodes[i].id] = node_var[i];
    }
    for (std::size_t j = 0; j < q.relationships.size(); ++j) {
        rel_var[j] = "r" + std::to_string(j + 1);
        out.var_map[q.relationships[j].id] = rel_var[j];
    }

    std::vector<bool> annotated(q.nodes.size(), false);
    std::vector<bool> touched(q.nodes.size(), false);
    auto node_pattern = [&](std::size_t i) {
        std::string s = "(" + node_var[i];
        if (!annotated[i]) {
            for (const auto& l : q.nodes[i].labels) s += ":" + cypher::quote_identifier(l);
            annotated[i] = true;
        }
        return s + ")";
    };

    std::vector<std::string> parts;
    for (std::size_t j = 0; j < q.relationships.size(); ++j) {
        const auto& r = q.relationships[j];
        const std::size_t s = *q.node_position(r.source);
        const std::size_t t = *q.node_position(r.target);
        touched[s] = touched[t] = true;
        std::string rel = "[" + rel_var[j];
        if (r.type) rel += ":" + cypher::quote_identifier(*r.type);
        rel += "]";
        std::string left = node_pattern(s);
        std::string right = node_pattern(t);
        parts.push_back(left + "-" + rel + (r.directed ? "->" : "-") + right);
    }
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
        if (!touched[i]) parts.push_back(node_pattern(i));

    std::string text;
    if (options.isomorphism == IsomorphismMode::Homomorphism) {
        for (std::size_t p = 0; p < parts.size(); ++p) text += (p ? "\nMATCH " : "MATCH ") + parts[p];
    } else {
        text = "MATCH ";
        for (std::size_t p = 0; p < parts.size(); ++p) text += (p ? ",\n      " : "") + parts[p];
    }

    std::vector<std::string> conditions;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
        for (const auto& [k, v] : q.nodes[i].properties)
            conditions.push_back(node_var[i] + "." + cypher::quote_identifier(k) + " = " + cypher::literal(v));
    for (std::size_t j = 0; j < q.relationships.size(); ++j)
        for (const auto& [k, v] : q.relationships[j].properties)
            conditions.push_back(rel_var[j] + "." + cypher::quote_identifier(k) + " = " + cypher::literal(v));
    if (options.isomorphism == IsomorphismMode::NodeIso) {
        auto pairs = node_pairs(q);
        out.inequalities = options.eliminate_trivial ? eliminate_trivial(q, pairs, options.exclusive_labels) : pairs;
        for (const auto& [i, j] : out.inequalities)
            conditions.push_back("id(" + node_var[i] + ") <> id(" + node_var[j] + ")");
    }
    if (!conditions.empty()) {
        text += "\nWHERE ";
        for (std::size_t c = 0; c < conditions.size(); ++c) text += (c ? " AND " : "") + conditions[c];
    }

    text += "\nRETURN ";
    bool first = true;
    auto add_return = [&](const std::string& var) {
        if (!first) text += ", ";
        first = false;
        text += options.returns == ReturnMode::References ? "id(" + var + ") AS " + var : var;
    };
    for (const auto& v : node_var) add_return(v);
    for (const auto& v : rel_var) add_return(v);

    out.text = std::move(text);
    return out;
}

} // namespace gqw
