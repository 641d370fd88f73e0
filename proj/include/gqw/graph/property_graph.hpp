#pragma once

#include <algorithm>
#include <atomic>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gqw/error.hpp"
#include "gqw/graph/value.hpp"

namespace gqw {

struct NodeId {
    std::string value;
    auto operator<=>(const NodeId&) const = default;
};

struct RelId {
    std::string value;
    auto operator<=>(const RelId&) const = default;
};

using LabelSet = std::set<std::string>;

struct NodeRecord {
    NodeId id;
    LabelSet labels;
    PropertyMap properties;
    bool operator==(const NodeRecord&) const = default;
};

struct RelRecord {
    RelId id;
    std::string type;
    NodeId source;
    NodeId target;
    PropertyMap properties;
    bool operator==(const RelRecord&) const = default;
    bool is_self_loop() const noexcept { return source == target; }
};

enum class OwnerKind { Node, Relationship };

constexpr std::string_view to_string(OwnerKind kind) noexcept {
    return kind == OwnerKind::Node ? "node" : "relationship";
}

/// "A:B" for {A, B}; empty string for the empty set.
inline std::string label_key(const LabelSet& labels) {
    std::string key;
    for (const auto& l : labels) {
        if (!key.empty()) key += ':';
        key += l;
    }
    return key;
}

/// Aggregate statistics maintained incrementally on every insert, so every lookup is a map probe
/// and never walks the element tables.
class CountStore {
public:
    struct Triple {
        LabelSet source;
        std::string type;
        LabelSet target;
        auto operator<=>(const Triple&) const = default;
    };
    using PropertyKey = std::pair<OwnerKind, std::string>;

    std::size_t node_count() const noexcept { return nodes_; }
    std::size_t relationship_count() const noexcept { return rels_; }

    std::size_t label_count(const std::string& label) const {
        auto it = labels_.find(label);
        return it == labels_.end() ? 0 : it->second;
    }
    std::size_t type_count(const std::string& type) const {
        auto it = types_.find(type);
        return it == types_.end() ? 0 : it->second;
    }

    const std::map<std::string, std::size_t>& label_table() const noexcept { return labels_; }
    const std::map<std::string, std::size_t>& type_table() const noexcept { return types_; }
    const std::map<LabelSet, std::size_t>& label_set_table() const noexcept { return label_sets_; }
    const std::map<Triple, std::size_t>& triple_table() const noexcept { return triples_; }
    const std::map<PropertyKey, std::map<ValueType, std::size_t>>& property_registry() const noexcept {
        return properties_;
    }

    std::set<ValueType> property_types(OwnerKind owner, const std::string& key) const {
        std::set<ValueType> out;
        if (auto it = properties_.find({owner, key}); it != properties_.end())
            for (const auto& [t, n] : it->second) out.insert(t);
        return out;
    }

    bool operator==(const CountStore&) const = default;

private:
    friend class PropertyGraph;

    void add_node(const NodeRecord& n) {
        ++nodes_;
        for (const auto& l : n.labels) ++labels_[l];
        ++label_sets_[n.labels];
        for (const auto& [k, v] : n.properties) ++properties_[{OwnerKind::Node, k}][type_of(v)];
    }

    void add_relationship(const RelRecord& r, const LabelSet& src, const LabelSet& tgt) {
        ++rels_;
        ++types_[r.type];
        ++triples_[Triple{src, r.type, tgt}];
        for (const auto& [k, v] : r.properties) ++properties_[{OwnerKind::Relationship, k}][type_of(v)];
    }

    std::size_t nodes_ = 0;
    std::size_t rels_ = 0;
    std::map<std::string, std::size_t> labels_;
    std::map<std::string, std::size_t> types_;
    std::map<LabelSet, std::size_t> label_sets_;
    std::map<Triple, std::size_t> triples_;
    std::map<PropertyKey, std::map<ValueType, std::size_t>> properties_;
};

/// Labeled, attributed multigraph with string element IDs.
///
/// Elements are stored densely in insertion order; `incident(i)` lists the relationship indices
/// touching node i (a self-loop is listed once). Whole-table accessors `nodes()` and
/// `relationships()` bump `scan_count()` so callers can assert that a code path never scans.
class PropertyGraph {
public:
    PropertyGraph() = default;
    PropertyGraph(const PropertyGraph& other)
        : nodes_(other.nodes_), rels_(other.rels_), node_index_(other.node_index_),
          rel_index_(other.rel_index_), incident_(other.incident_), endpoints_(other.endpoints_),
          counts_(other.counts_), scans_(other.scans_.load()) {}
    PropertyGraph(PropertyGraph&& other) noexcept
        : nodes_(std::move(other.nodes_)), rels_(std::move(other.rels_)),
          node_index_(std::move(other.node_index_)), rel_index_(std::move(other.rel_index_)),
          incident_(std::move(other.incident_)), endpoints_(std::move(other.endpoints_)),
          counts_(std::move(other.counts_)), scans_(other.scans_.load()) {}
    PropertyGraph& operator=(PropertyGraph other) noexcept {
        swap(other);
        return *this;
    }

    void swap(PropertyGraph& other) noexcept {
        using std::swap;
        swap(nodes_, other.nodes_);
        swap(rels_, other.rels_);
        swap(node_index_, other.node_index_);
        swap(rel_index_, other.rel_index_);
        swap(incident_, other.incident_);
        swap(endpoints_, other.endpoints_);
        swap(counts_, other.counts_);
        auto s = scans_.load();
        scans_.store(other.scans_.load());
        other.scans_.store(s);
    }

    const NodeRecord& add_node(NodeRecord node) {
        if (node.id.value.empty()) throw Error(ErrorCode::InvalidValue, "node id must be non-empty");
        for (const auto& [k, v] : node.properties)
            if (k.empty())
                throw Error(ErrorCode::InvalidValue, "node '" + node.id.value + "' has an empty property key");
        if (node_index_.contains(node.id.value))
            throw Error(ErrorCode::DuplicateId, "duplicate node id '" + node.id.value + "'");
        node_index_.emplace(node.id.value, nodes_.size());
        counts_.add_node(node);
        nodes_.push_back(std::move(node));
        incident_.emplace_back();
        return nodes_.back();
    }

    const RelRecord& add_relationship(RelRecord rel) {
        if (rel.id.value.empty()) throw Error(ErrorCode::InvalidValue, "relationship id must be non-empty");
        if (rel.type.empty())
            throw Error(ErrorCode::InvalidValue, "relationship '" + rel.id.value + "' has an empty type");
        for (const auto& [k, v] : rel.properties)
            if (k.empty())
                throw Error(ErrorCode::InvalidValue,
                            "relationship '" + rel.id.value + "' has an empty property key");
        if (rel_index_.contains(rel.id.value))
            throw Error(ErrorCode::DuplicateId, "duplicate relationship id '" + rel.id.value + "'");
        auto s = node_index(rel.source);
        auto t = node_index(rel.target);
        if (!s || !t)
            throw Error(ErrorCode::DanglingEndpoint,
                        "relationship '" + rel.id.value + "' references missing node '" +
                            (!s ? rel.source.value : rel.target.value) + "'");
        const std::size_t index = rels_.size();
        rel_index_.emplace(rel.id.value, index);
        counts_.add_relationship(rel, nodes_[*s].labels, nodes_[*t].labels);
        incident_[*s].push_back(index);
        if (*t != *s) incident_[*t].push_back(index);
        endpoints_.emplace_back(*s, *t);
        rels_.push_back(std::move(rel));
        return rels_.back();
    }

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t relationship_count() const noexcept { return rels_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }

    std::optional<std::size_t> node_index(const NodeId& id) const {
        auto it = node_index_.find(id.value);
        if (it == node_index_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<std::size_t> relationship_index(const RelId& id) const {
        auto it = rel_index_.find(id.value);
        if (it == rel_index_.end()) return std::nullopt;
        return it->second;
    }

    const NodeRecord* find_node(const NodeId& id) const {
        auto i = node_index(id);
        return i ? &nodes_[*i] : nullptr;
    }
    const RelRecord* find_relationship(const RelId& id) const {
        auto i = relationship_index(id);
        return i ? &rels_[*i] : nullptr;
    }

    const NodeRecord& node_at(std::size_t index) const { return nodes_.at(index); }
    const RelRecord& relationship_at(std::size_t index) const { return rels_.at(index); }

    std::span<const std::size_t> incident(std::size_t node) const { return incident_.at(node); }
    std::size_t source_index(std::size_t rel) const { return endpoints_.at(rel).first; }
    std::size_t target_index(std::size_t rel) const { return endpoints_.at(rel).second; }

    std::span<const NodeRecord> nodes() const {
        scans_.fetch_add(1, std::memory_order_relaxed);
        return nodes_;
    }
    std::span<const RelRecord> relationships() const {
        scans_.fetch_add(1, std::memory_order_relaxed);
        return rels_;
    }

    const CountStore& counts() const noexcept { return counts_; }
    std::size_t scan_count() const noexcept { return scans_.load(std::memory_order_relaxed); }
    void reset_scan_count() const noexcept { scans_.store(0, std::memory_order_relaxed); }

    /// Element-wise equality, independent of insertion order.
    friend bool operator==(const PropertyGraph& a, const PropertyGraph& b) {
        if (a.nodes_.size() != b.nodes_.size() || a.rels_.size() != b.rels_.size()) return false;
        for (const auto& n : a.nodes_) {
            const auto* other = b.find_node(n.id);
            if (!other || !(*other == n)) return false;
        }
        for (const auto& r : a.rels_) {
            const auto* other = b.find_relationship(r.id);
            if (!other || !(*other == r)) return false;
        }
        return true;
    }

private:
    std::vector<NodeRecord> nodes_;
    std::vector<RelRecord> rels_;
    std::unordered_map<std::string, std::size_t> node_index_;
    std::unordered_map<std::string, std::size_t> rel_index_;
    std::vector<std::vector<std::size_t>> incident_;
    std::vector<std::pair<std::size_t, std::size_t>> endpoints_;
    CountStore counts_;
    mutable std::atomic<std::size_t> scans_{0};
};

} // namespace gqw

template <>
struct std::hash<gqw::NodeId> {
    std::size_t operator()(const gqw::NodeId& id) const noexcept { return std::hash<std::string>{}(id.value); }
};

template <>
struct std::hash<gqw::RelId> {
    std::size_t operator()(const gqw::RelId& id) const noexcept { return std::hash<std::string>{}(id.value); }
};
