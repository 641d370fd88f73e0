#pragma once

#include <string>

#include "gqw/graph/interchange.hpp"
#include "gqw/graph/query_graph.hpp"
#include "gqw/mining/ted.hpp"

// Pattern set document:
//
//   { "parameters": { "k": 3, "alpha": 0.5, "tau_max": 2 },
//     "universe": 12, "total_coverage": 9,
//     "patterns": [ { "code": "...", "size": 2, "cover_size": 6, "attachment": "p0",
//                     "graph": <QueryGraph document>,
//                     "cover": [ { "part": 0, "rel": "r3" } ] } ] }
//
// "cover" is present only when requested; "graph" uses node ids p0.. and relation ids e0...

namespace gqw {

inline json pattern_to_json(const Pattern& p, bool include_cover) {
    json out{{"code", p.code},
             {"size", p.size()},
             {"cover_size", p.cover.size()},
             {"attachment", Pattern::attachment},
             {"graph", query_to_json(p.shape.to_query())}};
    if (include_cover) {
        json cover = json::array();
        for (const auto& c : p.cover) cover.push_back({{"part", c.part}, {"rel", c.rel.value}});
        out["cover"] = std::move(cover);
    }
    return out;
}

inline json pattern_set_to_json(const PatternSet& s, bool include_cover = false) {
    json patterns = json::array();
    for (const auto& p : s.members) patterns.push_back(pattern_to_json(p, include_cover));
    return {{"parameters", {{"k", s.k}, {"alpha", s.alpha}, {"tau_max", s.tau_max}}},
            {"universe", s.universe},
            {"total_coverage", s.coverage()},
            {"patterns", std::move(patterns)}};
}

inline json mining_trace_to_json(const MiningTrace& t) {
    json swaps = json::array();
    for (const auto& s : t.swaps)
        swaps.push_back({{"tau", s.tau},
                         {"candidate", s.candidate},
                         {"victim", s.victim},
                         {"score_b", s.score_b},
                         {"score_l", s.score_l},
                         {"cover_before", s.cover_before},
                         {"cover_after", s.cover_after}});
    return {{"candidates", t.candidates}, {"rejected", t.rejected},       {"levels", t.levels},
            {"peak_frontier", t.peak_frontier}, {"swaps", std::move(swaps)}};
}

inline MinerParams miner_params_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::Validation, "mining parameters must be an object");
    MinerParams p;
    auto count = [&](const char* key, std::size_t& slot) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw Error(ErrorCode::Validation, std::string(key) + " must be a non-negative integer");
        slot = v.get<std::size_t>();
    };
    count("k", p.k);
    count("tau_max", p.tau_max);
    if (j.contains("alpha")) {
        if (!j.at("alpha").is_number()) throw Error(ErrorCode::Validation, "alpha must be a number");
        p.alpha = j.at("alpha").get<double>();
    }
    p.validate();
    return p;
}

} // namespace gqw
