#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gqw/error.hpp"
#include "gqw/mining/edge_set.hpp"
#include "gqw/mining/shape.hpp"
#include "gqw/partition/partitioner.hpp"

namespace gqw {

struct CoverElement {
    std::size_t part = 0;
    RelId rel;
    auto operator<=>(const CoverElement&) const = default;
};

/// Dense numbering of every relationship of every part: offset(part) + local index.
class EdgeIndex {
public:
    explicit EdgeIndex(const PartitionSet& d) {
        offsets_.reserve(d.parts.size() + 1);
        std::size_t total = 0;
        for (const auto& p : d.parts) {
            offsets_.push_back(total);
            total += p.relationship_count();
        }
        offsets_.push_back(total);
    }

    std::size_t size() const noexcept { return offsets_.back(); }
    std::size_t global(std::size_t part, std::size_t local) const { return offsets_[part] + local; }

    CoverElement element(const PartitionSet& d, std::size_t global_index) const {
        auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global_index);
        const std::size_t part = static_cast<std::size_t>(it - offsets_.begin()) - 1;
        return CoverElement{part, d.parts[part].relationship_at(global_index - offsets_[part]).id};
    }

    std::vector<CoverElement> elements(const PartitionSet& d, const EdgeSet& set) const {
        std::vector<CoverElement> out;
        set.for_each([&](std::size_t g) { out.push_back(element(d, g)); });
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::vector<std::size_t> offsets_;
};

/// A connected edge subset of one part (sorted part-local relationship indices).
struct Occurrence {
    std::uint32_t part = 0;
    std::vector<std::uint32_t> edges;
    auto operator<=>(const Occurrence&) const = default;
};

/// One distinct shape of a level together with every occurrence of it in the partition set.
struct Candidate {
    PatternShape shape; // canonical order
    std::string code;
    std::vector<Occurrence> occurrences;

    EdgeSet cover(const EdgeIndex& index) const {
        EdgeSet out(index.size());
        for (const auto& occ : occurrences)
            for (auto e : occ.edges) out.set(index.global(occ.part, e));
        return out;
    }
};

/// Candidates of one size, ordered by canonical code.
using CandidateLevel = std::vector<Candidate>;

namespace detail {

inline CandidateLevel group_occurrences(const PartitionSet& d, std::vector<Occurrence> occs) {
    std::sort(occs.begin(), occs.end());
    occs.erase(std::unique(occs.begin(), occs.end()), occs.end());
    std::map<std::string, Candidate> by_code;
    std::vector<std::size_t> rels;
    for (auto& occ : occs) {
        rels.assign(occ.edges.begin(), occ.edges.end());
        auto canon = canonicalize(shape_of(d.parts[occ.part], rels));
        auto it = by_code.find(canon.code);
        if (it == by_code.end()) it = by_code.emplace(canon.code, Candidate{std::move(canon.shape), canon.code, {}}).first;
        it->second.occurrences.push_back(std::move(occ));
    }
    CandidateLevel level;
    level.reserve(by_code.size());
    for (auto& [code, cand] : by_code) level.push_back(std::move(cand));
    return level;
}

} // namespace detail

/// Level tau of the connected-subgraph lattice. Level 1 holds every single-edge shape; level
/// tau >= 2 grows each occurrence of the (tau-1) frontier by one relationship incident to its node
/// set, then deduplicates both occurrences (by edge set) and shapes (by canonical code).
inline CandidateLevel enumerate_candidates(const PartitionSet& d, std::size_t tau, const CandidateLevel& frontier = {}) {
    if (tau == 0) throw Error(ErrorCode::Validation, "pattern size must be at least 1");
    std::vector<Occurrence> occs;
    if (tau == 1) {
        for (std::uint32_t p = 0; p < d.parts.size(); ++p)
            for (std::uint32_t e = 0; e < d.parts[p].relationship_count(); ++e) occs.push_back(Occurrence{p, {e}});
        return detail::group_occurrences(d, std::move(occs));
    }
    for (const auto& cand : frontier) {
        if (cand.shape.size() != tau - 1)
            throw Error(ErrorCode::Validation, "frontier must hold shapes of size " + std::to_string(tau - 1));
        for (const auto& occ : cand.occurrences) {
            const auto& g = d.parts[occ.part];
            std::vector<std::size_t> touched;
            for (auto e : occ.edges) {
                touched.push_back(g.source_index(e));
                touched.push_back(g.target_index(e));
            }
            std::sort(touched.begin(), touched.end());
            touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
            for (auto v : touched) {
                for (auto inc : g.incident(v)) {
                    const auto e = static_cast<std::uint32_t>(inc);
                    if (std::binary_search(occ.edges.begin(), occ.edges.end(), e)) continue;
                    Occurrence grown{occ.part, occ.edges};
                    grown.edges.insert(std::lower_bound(grown.edges.begin(), grown.edges.end(), e), e);
                    occs.push_back(std::move(grown));
                }
            }
        }
    }
    return detail::group_occurrences(d, std::move(occs));
}

} // namespace gqw
