#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gqw/cypher/parser.hpp"
#include "gqw/graph/element_ref.hpp"
#include "gqw/graph/property_graph.hpp"

namespace gqw::cypher {

struct QueryResult {
    std::vector<std::string> columns;
    std::vector<std::vector<ElementRef>> rows;
};

namespace detail {

// Path-walking nested-loop evaluator. Each MATCH clause scopes its own relationship-uniqueness
// set; predicates are checked as soon as all their variables are bound.
class Executor {
public:
    Executor(const Statement& st, const PropertyGraph& g) : st_(st), g_(g) {}

    QueryResult run() {
        for (const auto& [name, kind] : st_.variables) slot_[name] = slots_++;
        binding_.assign(slots_, kUnset);
        used_.assign(st_.matches.size(), std::vector<bool>(g_.relationship_count(), false));

        for (std::size_t c = 0; c < st_.matches.size(); ++c) {
            for (const auto& path : st_.matches[c].paths) {
                steps_.push_back(Step{c, &path.start, nullptr, {}});
                for (std::size_t h = 0; h < path.hops.size(); ++h) {
                    const std::string& from = h == 0 ? path.start.var : path.hops[h - 1].second.var;
                    steps_.push_back(Step{c, &path.hops[h].second, &path.hops[h].first, from});
                }
            }
        }
        schedule_predicates();

        QueryResult out;
        for (const auto& r : st_.returns) out.columns.push_back(r.alias);
        out_ = &out;
        walk(0);
        return out;
    }

private:
    static constexpr std::size_t kUnset = static_cast<std::size_t>(-1);

    struct Step {
        std::size_t clause;
        const NodePattern* node;
        const RelPattern* rel; // null for a path start
        std::string from;
    };

    void schedule_predicates() {
        ready_after_.assign(steps_.size(), {});
        std::vector<bool> bound(slots_, false);
        std::vector<bool> placed(st_.where.size(), false);
        auto vars_of = [](const Predicate& p) {
            if (const auto* e = std::get_if<PropertyEquals>(&p)) return std::vector<std::string>{e->var};
            const auto& d = std::get<IdsDiffer>(p);
            return std::vector<std::string>{d.left, d.right};
        };
        for (std::size_t s = 0; s < steps_.size(); ++s) {
            bound[slot_.at(steps_[s].node->var)] = true;
            if (steps_[s].rel) bound[slot_.at(steps_[s].rel->var)] = true;
            for (std::size_t p = 0; p < st_.where.size(); ++p) {
                if (placed[p]) continue;
                bool ready = true;
                for (const auto& v : vars_of(st_.where[p])) ready = ready && bound[slot_.at(v)];
                if (ready) {
                    placed[p] = true;
                    ready_after_[s].push_back(p);
                }
            }
        }
    }

    bool node_ok(const NodePattern& np, std::size_t v) const {
        const auto& n = g_.node_at(v);
        if (!std::includes(n.labels.begin(), n.labels.end(), np.labels.begin(), np.labels.end())) return false;
        for (const auto& [k, val] : np.properties) {
            auto it = n.properties.find(k);
            if (it == n.properties.end() || !scalar_equal(it->second, val)) return false;
        }
        return true;
    }

    bool rel_ok(const RelPattern& rp, std::size_t e) const {
        const auto& r = g_.relationship_at(e);
        if (rp.type && r.type != *rp.type) return false;
        for (const auto& [k, val] : rp.properties) {
            auto it = r.properties.find(k);
            if (it == r.properties.end() || !scalar_equal(it->second, val)) return false;
        }
        return true;
    }

    const PropertyMap& properties_of(std::size_t slot) const {
        for (const auto& [name, kind] : st_.variables)
            if (slot_.at(name) == slot) {
                return kind == ElementKind::Node ? g_.node_at(binding_[slot]).properties
                                                 : g_.relationship_at(binding_[slot]).properties;
            }
        throw Error(ErrorCode::InvalidQuery, "unknown variable slot");
    }

    std::string id_of(const std::string& var) const {
        const std::size_t slot = slot_.at(var);
        return st_.variables.at(var) == ElementKind::Node ? g_.node_at(binding_[slot]).id.value
                                                          : g_.relationship_at(binding_[slot]).id.value;
    }

    bool predicates_hold(std::size_t step) const {
        for (std::size_t p : ready_after_[step]) {
            const auto& pred = st_.where[p];
            if (const auto* e = std::get_if<PropertyEquals>(&pred)) {
                const auto& props = properties_of(slot_.at(e->var));
                auto it = props.find(e->key);
                if (it == props.end() || !scalar_equal(it->second, e->value)) return false;
            } else {
                const auto& d = std::get<IdsDiffer>(pred);
                if (id_of(d.left) == id_of(d.right)) return false;
            }
        }
        return true;
    }

    // Binds the step's node to v (or checks an existing binding) and recurses.
    void bind_node_and_continue(std::size_t step, std::size_t v) {
        const Step& s = steps_[step];
        const std::size_t slot = slot_.at(s.node->var);
        const bool was_bound = binding_[slot] != kUnset;
        if (was_bound && binding_[slot] != v) return;
        if (!node_ok(*s.node, v)) return;
        binding_[slot] = v;
        if (predicates_hold(step)) walk(step + 1);
        if (!was_bound) binding_[slot] = kUnset;
    }

    void walk(std::size_t step) {
        if (step == steps_.size()) {
            emit();
            return;
        }
        const Step& s = steps_[step];
        if (!s.rel) {
            const std::size_t slot = slot_.at(s.node->var);
            if (binding_[slot] != kUnset) {
                bind_node_and_continue(step, binding_[slot]);
            } else {
                for (std::size_t v = 0; v < g_.node_count(); ++v) bind_node_and_continue(step, v);
            }
            return;
        }
        const std::size_t u = binding_[slot_.at(s.from)];
        const std::size_t rslot = slot_.at(s.rel->var);
        auto& used = used_[s.clause];
        for (std::size_t e : g_.incident(u)) {
            if (used[e]) continue;
            if (binding_[rslot] != kUnset && binding_[rslot] != e) continue;
            const std::size_t src = g_.source_index(e);
            const std::size_t tgt = g_.target_index(e);
            std::size_t next = kUnset;
            switch (s.rel->direction) {
            case Direction::Outgoing:
                if (src == u) next = tgt;
                break;
            case Direction::Incoming:
                if (tgt == u) next = src;
                break;
            case Direction::Undirected: next = src == u ? tgt : src; break;
            }
            if (next == kUnset || !rel_ok(*s.rel, e)) continue;
            const bool rel_was_bound = binding_[rslot] != kUnset;
            binding_[rslot] = e;
            used[e] = true;
            bind_node_and_continue(step, next);
            used[e] = false;
            if (!rel_was_bound) binding_[rslot] = kUnset;
        }
    }

    void emit() {
        std::vector<ElementRef> row;
        row.reserve(st_.returns.size());
        for (const auto& r : st_.returns)
            row.push_back(ElementRef{st_.variables.at(r.var), id_of(r.var)});
        out_->rows.push_back(std::move(row));
    }

    const Statement& st_;
    const PropertyGraph& g_;
    std::map<std::string, std::size_t> slot_;
    std::size_t slots_ = 0;
    std::vector<std::size_t> binding_;
    std::vector<std::vector<bool>> used_;
    std::vector<Step> steps_;
    std::vector<std::vector<std::size_t>> ready_after_;
    QueryResult* out_ = nullptr;
};

} // namespace detail

/// Evaluates a parsed statement against an in-memory store. Rows come out in enumeration order.
inline QueryResult execute(const Statement& statement, const PropertyGraph& store) {
    return detail::Executor(statement, store).run();
}

inline QueryResult execute(std::string_view text, const PropertyGraph& store) {
    return execute(parse(text), store);
}

} // namespace gqw::cypher
