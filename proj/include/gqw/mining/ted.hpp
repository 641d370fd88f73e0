#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "gqw/error.hpp"
#include "gqw/graph/matcher.hpp"
#include "gqw/mining/edge_set.hpp"
#include "gqw/mining/enumerate.hpp"
#include "gqw/mining/shape.hpp"
#include "gqw/partition/partitioner.hpp"

namespace gqw {

/// Cov(p, D): every part relationship lying in the image of some label-exact, node- and
/// relationship-injective embedding of p. Computed with the reference matcher, independently of
/// the miner's occurrence bookkeeping.
inline std::set<CoverElement> coverage(const PatternShape& p, const PartitionSet& d) {
    std::set<CoverElement> cover;
    if (!p.connected()) throw Error(ErrorCode::Validation, "pattern shape must be connected");
    const auto q = p.to_query();
    for (std::size_t part = 0; part < d.parts.size(); ++part)
        for (const auto& emb : match_subgraph(q, d.parts[part], MatchOptions{IsomorphismMode::NodeIso, LabelMatch::Exact}))
            for (const auto& r : emb.rels) cover.insert(CoverElement{part, r});
    return cover;
}

struct Pattern {
    PatternShape shape;
    std::string code;
    std::vector<CoverElement> cover; // sorted

    std::size_t size() const noexcept { return shape.size(); }
    /// Node merged with the anchor when the pattern is dropped onto an existing query node.
    static constexpr const char* attachment = "p0";
};

struct SwapScores {
    std::size_t score_b = 0; // |Cov(g) \ total_cover|
    std::size_t score_l = 0; // min over members of |Cov(p) \ Cov(P - p)|
    std::size_t victim = 0;  // lowest index attaining score_l
};

/// Swap iff score_b > (1 + alpha) * score_l + (1 - alpha) * total / k.
/// Both sides are multiplied by k so the only inexact quantity is alpha itself; for the usual
/// thresholds 0, 0.5 and 1 the comparison is exact.
inline bool swap_decision(const SwapScores& s, std::size_t total_cover_size, std::size_t k, double alpha) {
    if (k == 0) throw Error(ErrorCode::Validation, "k must be at least 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::Validation, "alpha must lie in [0, 1]");
    const long double kk = static_cast<long double>(k);
    const long double lhs = static_cast<long double>(s.score_b) * kk;
    const long double rhs = (1.0L + alpha) * static_cast<long double>(s.score_l) * kk +
                            (1.0L - alpha) * static_cast<long double>(total_cover_size);
    return lhs > rhs;
}

struct MinerParams {
    std::size_t k = 5;
    double alpha = 0.5;
    std::size_t tau_max = 3;
    /// Recompute the union of member covers after every swap and count disagreements.
    bool verify_bookkeeping = false;

    void validate() const {
        if (k == 0) throw Error(ErrorCode::Validation, "k must be at least 1");
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::Validation, "alpha must lie in [0, 1]");
        if (tau_max == 0) throw Error(ErrorCode::Validation, "tau_max must be at least 1");
    }
};

struct SwapEvent {
    std::size_t tau = 0;
    std::string candidate;
    std::size_t victim = 0;
    std::size_t score_b = 0;
    std::size_t score_l = 0;
    std::size_t cover_before = 0;
    std::size_t cover_after = 0;
};

struct MiningTrace {
    std::vector<SwapEvent> swaps;
    std::size_t candidates = 0;      // distinct shapes considered
    std::size_t rejected = 0;        // candidates that failed the swap test
    std::size_t levels = 0;          // sizes enumerated
    std::size_t peak_frontier = 0;   // most occurrences held for one level
    std::size_t bookkeeping_mismatches = 0;
};

struct PatternSet {
    std::vector<Pattern> members;
    std::vector<CoverElement> total_cover; // sorted union of member covers
    std::size_t k = 0;
    double alpha = 0.5;
    std::size_t tau_max = 0;
    std::size_t universe = 0; // relationships across all parts
    MiningTrace trace;

    std::size_t coverage() const noexcept { return total_cover.size(); }
};

namespace detail {

// Member covers with per-edge multiplicities; "single" marks edges covered by exactly one member
// so a member's loss is one popcount.
class CoverBook {
public:
    explicit CoverBook(std::size_t universe) : mult_(universe, 0), covered_(universe), single_(universe) {}

    std::size_t total() const noexcept { return total_; }
    std::size_t benefit(const EdgeSet& g) const { return g.count_minus(covered_); }
    std::size_t loss(const EdgeSet& member) const { return member.count_and(single_); }

    void add(const EdgeSet& s) {
        s.for_each([&](std::size_t e) {
            if (mult_[e]++ == 0) ++total_;
            sync(e);
        });
    }
    void remove(const EdgeSet& s) {
        s.for_each([&](std::size_t e) {
            if (--mult_[e] == 0) --total_;
            sync(e);
        });
    }
    const EdgeSet& covered() const noexcept { return covered_; }

private:
    void sync(std::size_t e) {
        if (mult_[e] > 0) covered_.set(e);
        else covered_.reset(e);
        if (mult_[e] == 1) single_.set(e);
        else single_.reset(e);
    }

    std::vector<std::size_t> mult_;
    EdgeSet covered_;
    EdgeSet single_;
    std::size_t total_ = 0;
};

} // namespace detail

inline SwapScores swap_scores(const std::vector<EdgeSet>& members, const detail::CoverBook& book, const EdgeSet& g) {
    SwapScores s;
    s.score_b = book.benefit(g);
    s.score_l = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto l = book.loss(members[i]);
        if (l < s.score_l) {
            s.score_l = l;
            s.victim = i;
        }
    }
    return s;
}

/// Top-k edge-diversified patterns. Shapes are enumerated level by level (size 1 up to tau_max,
/// canonical-code order within a level). While fewer than k patterns are held every candidate is
/// appended; afterwards a candidate g replaces the member of minimum loss whenever swap_decision
/// accepts its scores. Only the current level's occurrences and the k members are retained.
inline PatternSet mine(const PartitionSet& d, const MinerParams& params) {
    params.validate();
    if (d.parts.empty()) throw Error(ErrorCode::Validation, "partition set is empty");

    const EdgeIndex index(d);
    PatternSet out;
    out.k = params.k;
    out.alpha = params.alpha;
    out.tau_max = params.tau_max;
    out.universe = index.size();

    std::vector<Candidate> members;
    std::vector<EdgeSet> covers;
    detail::CoverBook book(index.size());

    CandidateLevel level;
    for (std::size_t tau = 1; tau <= params.tau_max; ++tau) {
        level = enumerate_candidates(d, tau, level);
        if (level.empty()) break;
        ++out.trace.levels;
        std::size_t occs = 0;
        for (const auto& c : level) occs += c.occurrences.size();
        out.trace.peak_frontier = std::max(out.trace.peak_frontier, occs);

        for (const auto& cand : level) {
            ++out.trace.candidates;
            EdgeSet g = cand.cover(index);
            if (members.size() < params.k) {
                book.add(g);
                members.push_back(Candidate{cand.shape, cand.code, {}});
                covers.push_back(std::move(g));
                continue;
            }
            const auto scores = swap_scores(covers, book, g);
            if (!swap_decision(scores, book.total(), params.k, params.alpha)) {
                ++out.trace.rejected;
                continue;
            }
            SwapEvent ev{tau, cand.code, scores.victim, scores.score_b, scores.score_l, book.total(), 0};
            book.remove(covers[scores.victim]);
            book.add(g);
            covers[scores.victim] = std::move(g);
            members[scores.victim] = Candidate{cand.shape, cand.code, {}};
            ev.cover_after = book.total();
            out.trace.swaps.push_back(std::move(ev));
            if (params.verify_bookkeeping) {
                EdgeSet recomputed(index.size());
                for (const auto& c : covers) recomputed |= c;
                if (!(recomputed == book.covered()) || recomputed.count() != book.total())
                    ++out.trace.bookkeeping_mismatches;
            }
        }
    }

    for (std::size_t i = 0; i < members.size(); ++i)
        out.members.push_back(Pattern{std::move(members[i].shape), std::move(members[i].code), index.elements(d, covers[i])});
    out.total_cover = index.elements(d, book.covered());
    return out;
}

} // namespace gqw
