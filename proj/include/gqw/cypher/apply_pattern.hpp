#pragma once

#include <map>
#include <optional>
#include <string>

#include "gqw/error.hpp"
#include "gqw/graph/query_graph.hpp"

namespace gqw {

namespace detail {

inline std::string fresh_id(const QueryGraph& q, char prefix, std::size_t& counter) {
    for (;;) {
        std::string id = prefix + std::to_string(++counter);
        if (!q.has_id(id)) return id;
    }
}

} // namespace detail

/// Pattern-at-a-time insertion: adds fresh copies of the pattern's nodes and relations to q.
/// With an anchor, the pattern's attachment node is merged into that existing query node; the
/// two label sets must agree unless one of them is empty.
inline QueryGraph apply_pattern(const QueryGraph& q, const QueryGraph& pattern, const std::string& attachment,
                                const std::optional<std::string>& anchor = std::nullopt) {
    pattern.validate();
    if (!pattern.node_position(attachment))
        throw Error(ErrorCode::InvalidQuery, "pattern has no attachment node '" + attachment + "'");
    QueryGraph out = q;
    std::map<std::string, std::string> rename;
    std::size_t node_counter = out.nodes.size();
    std::size_t rel_counter = out.relationships.size();

    if (anchor) {
        auto pos = out.node_position(*anchor);
        if (!pos) throw Error(ErrorCode::NotFound, "anchor node '" + *anchor + "' is not in the query");
        auto& target = out.nodes[*pos];
        const auto& source = pattern.nodes[*pattern.node_position(attachment)];
        if (!target.labels.empty() && !source.labels.empty() && target.labels != source.labels)
            throw Error(ErrorCode::LabelConflict, "anchor '" + *anchor + "' labels do not match the pattern's attachment node");
        if (target.labels.empty()) target.labels = source.labels;
        rename[attachment] = *anchor;
    }
    for (const auto& n : pattern.nodes) {
        if (rename.contains(n.id)) continue;
        QueryNode copy = n;
        copy.id = detail::fresh_id(out, 'n', node_counter);
        rename[n.id] = copy.id;
        out.nodes.push_back(std::move(copy));
    }
    for (const auto& r : pattern.relationships) {
        QueryRelation copy = r;
        copy.id = detail::fresh_id(out, 'r', rel_counter);
        copy.source = rename.at(r.source);
        copy.target = rename.at(r.target);
        out.relationships.push_back(std::move(copy));
    }
    return out;
}

} // namespace gqw
