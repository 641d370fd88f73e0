#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "gqw/error.hpp"
#include "gqw/graph/interchange.hpp"
#include "gqw/graph/property_graph.hpp"

namespace gqw {

struct LayoutParams {
    double d_opt = 100.0;
    double r_max = 300.0;
    std::size_t iterations = 300;
    /// Step bound for the first iteration; defaults to 0.1 * d_opt * sqrt(|V|).
    std::optional<double> initial_temperature;
    /// Step bound for the last iteration; defaults to 0.001 * d_opt.
    std::optional<double> final_temperature;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(d_opt > 0.0) || !std::isfinite(d_opt)) throw Error(ErrorCode::Validation, "d_opt must be positive");
        if (!(r_max >= d_opt) || !std::isfinite(r_max)) throw Error(ErrorCode::Validation, "r_max must be at least d_opt");
        if (iterations == 0) throw Error(ErrorCode::Validation, "iterations must be at least 1");
        for (const auto& t : {initial_temperature, final_temperature})
            if (t && !(*t >= 0.0 && std::isfinite(*t))) throw Error(ErrorCode::Validation, "temperatures must be finite and non-negative");
    }
};

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

struct PruneStats {
    std::size_t self_loops = 0;
    std::size_t parallel = 0;
    bool operator==(const PruneStats&) const = default;
};

/// Undirected simple graph over the store's nodes (store order).
struct SimpleGraph {
    std::vector<NodeId> nodes;
    std::vector<std::pair<std::size_t, std::size_t>> edges; // u < v, one per unordered pair
    std::vector<RelId> kept;                               // relationship retained for each edge
    PruneStats pruned;
};

/// Drops self-loops and keeps, for every unordered node pair, the relationship with the lowest id.
inline SimpleGraph prune_for_layout(const PropertyGraph& g) {
    SimpleGraph out;
    out.nodes.reserve(g.node_count());
    for (std::size_t v = 0; v < g.node_count(); ++v) out.nodes.push_back(g.node_at(v).id);
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> slot;
    for (std::size_t e = 0; e < g.relationship_count(); ++e) {
        std::size_t u = g.source_index(e), v = g.target_index(e);
        if (u == v) {
            ++out.pruned.self_loops;
            continue;
        }
        if (u > v) std::swap(u, v);
        const auto& id = g.relationship_at(e).id;
        auto [it, fresh] = slot.try_emplace({u, v}, out.edges.size());
        if (fresh) {
            out.edges.emplace_back(u, v);
            out.kept.push_back(id);
        } else {
            ++out.pruned.parallel;
            if (id < out.kept[it->second]) out.kept[it->second] = id;
        }
    }
    return out;
}

struct LayoutResult {
    std::vector<std::pair<NodeId, Point>> positions; // sorted by node id
    PruneStats pruned;

    const Point* find(const NodeId& id) const {
        auto it = std::lower_bound(positions.begin(), positions.end(), id, [](const auto& p, const NodeId& k) { return p.first < k; });
        return it != positions.end() && it->first == id ? &it->second : nullptr;
    }
};

namespace detail {

inline double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::vector<Point> disk_positions(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Point> pos(n);
    constexpr double two_pi = 6.283185307179586476925;
    for (auto& p : pos) {
        const double r = std::sqrt(unit_double(rng));
        const double a = two_pi * unit_double(rng);
        p = {r * std::cos(a), r * std::sin(a)};
    }
    return pos;
}

inline void center(std::vector<Point>& pos) {
    if (pos.empty()) return;
    for (int pass = 0; pass < 2; ++pass) {
        long double sx = 0, sy = 0;
        for (const auto& p : pos) {
            sx += p.x;
            sy += p.y;
        }
        const double mx = static_cast<double>(sx / static_cast<long double>(pos.size()));
        const double my = static_cast<double>(sy / static_cast<long double>(pos.size()));
        for (auto& p : pos) {
            p.x -= mx;
            p.y -= my;
        }
    }
}

// Fruchterman-Reingold with a fixed optimal distance, repulsion cut off at r_max, no frame,
// and linear cooling of the per-iteration step bound.
inline void simulate(const SimpleGraph& g, std::vector<Point>& pos, const LayoutParams& params) {
    const std::size_t n = pos.size();
    if (n == 0) return;
    const double k = params.d_opt;
    const double k2 = k * k;
    const double r_max = params.r_max;
    const double eps = 1e-9 * k;
    const double t0 = params.initial_temperature.value_or(0.1 * k * std::sqrt(static_cast<double>(n)));
    const double t1 = params.final_temperature.value_or(0.001 * k);
    std::vector<Point> disp(n);

    for (std::size_t it = 0; it < params.iterations; ++it) {
        const double frac = params.iterations > 1 ? static_cast<double>(it) / static_cast<double>(params.iterations - 1) : 1.0;
        const double temperature = t0 + (t1 - t0) * frac;
        std::fill(disp.begin(), disp.end(), Point{});

        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                double dx = pos[i].x - pos[j].x;
                double dy = pos[i].y - pos[j].y;
                double d = std::hypot(dx, dy);
                if (d >= r_max) continue;
                if (d < eps) {
                    // Coincident nodes: separate along a direction fixed by the pair.
                    const double a = static_cast<double>((i * 7919 + j * 104729) % 6283) * 1e-3;
                    dx = eps * std::cos(a);
                    dy = eps * std::sin(a);
                    d = eps;
                }
                const double f = k2 / d;
                const double fx = dx / d * f, fy = dy / d * f;
                disp[i].x += fx;
                disp[i].y += fy;
                disp[j].x -= fx;
                disp[j].y -= fy;
            }
        }
        for (const auto& [u, v] : g.edges) {
            const double dx = pos[u].x - pos[v].x;
            const double dy = pos[u].y - pos[v].y;
            const double d = std::hypot(dx, dy);
            if (d < eps) continue;
            const double f = d * d / k;
            const double fx = dx / d * f, fy = dy / d * f;
            disp[u].x -= fx;
            disp[u].y -= fy;
            disp[v].x += fx;
            disp[v].y += fy;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double len = std::hypot(disp[i].x, disp[i].y);
            if (!(len > 0.0) || !std::isfinite(len)) continue;
            const double step = std::min(len, temperature);
            pos[i].x += disp[i].x / len * step;
            pos[i].y += disp[i].y / len * step;
        }
    }
}

inline LayoutResult finish(const SimpleGraph& g, std::vector<Point> pos) {
    center(pos);
    LayoutResult out;
    out.pruned = g.pruned;
    out.positions.reserve(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) out.positions.emplace_back(g.nodes[i], pos[i]);
    std::sort(out.positions.begin(), out.positions.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

} // namespace detail

/// Layout from caller-supplied starting positions; nodes absent from `initial` start at the seeded
/// pseudo-random disk position they would otherwise get.
inline LayoutResult layout(const PropertyGraph& g, const LayoutParams& params, const std::map<NodeId, Point>& initial) {
    params.validate();
    const SimpleGraph simple = prune_for_layout(g);
    auto pos = detail::disk_positions(simple.nodes.size(), params.seed);
    for (std::size_t i = 0; i < simple.nodes.size(); ++i) {
        auto it = initial.find(simple.nodes[i]);
        if (it == initial.end()) continue;
        if (!std::isfinite(it->second.x) || !std::isfinite(it->second.y))
            throw Error(ErrorCode::Validation, "initial position of '" + it->first.value + "' is not finite");
        pos[i] = it->second;
    }
    detail::simulate(simple, pos, params);
    return detail::finish(simple, std::move(pos));
}

inline LayoutResult layout(const PropertyGraph& g, const LayoutParams& params = {}) { return layout(g, params, {}); }

inline json layout_to_json(const LayoutResult& r) {
    json positions = json::array();
    for (const auto& [id, p] : r.positions) positions.push_back({{"id", id.value}, {"x", p.x}, {"y", p.y}});
    return {{"positions", std::move(positions)}, {"pruned", {{"self_loops", r.pruned.self_loops}, {"parallel", r.pruned.parallel}}}};
}

inline LayoutParams layout_params_from_json(const json& j) {
    LayoutParams p;
    if (!j.is_object()) throw Error(ErrorCode::Validation, "layout parameters must be an object");
    try {
        if (j.contains("d_opt")) p.d_opt = j.at("d_opt").get<double>();
        if (j.contains("r_max")) p.r_max = j.at("r_max").get<double>();
        if (j.contains("iterations")) p.iterations = j.at("iterations").get<std::size_t>();
        if (j.contains("initial_temperature")) p.initial_temperature = j.at("initial_temperature").get<double>();
        if (j.contains("final_temperature")) p.final_temperature = j.at("final_temperature").get<double>();
        if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Validation, std::string("layout parameters: ") + e.what());
    }
    p.validate();
    return p;
}

} // namespace gqw
