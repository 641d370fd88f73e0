// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gqw/handler/adapter.hpp"
#include "gqw/handler/protocol.hpp"
#include "gqw/handler/remote.hpp"
#include "gqw/handler/result_set.hpp"
#include "gqw/layout/layout.hpp"
#include "gqw/mining/brute_force.hpp"
#include "gqw/mining/ted.hpp"
#include "gqw/partition/partitioner.hpp"

#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "support/run_cypher.hpp"
#include "support/stub_graph_server.hpp"

using namespace gqw;
using namespace gqw::testing;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

/// Runs a check body, turning an escaped exception into a failure line.
void check(const char* name, const std::function<std::pair<bool, std::string>()>& body) {
    try {
        auto [ok, detail] = body();
        report(ok, name, detail);
    } catch (const std::exception& e) {
        report(false, name, std::string("exception: ") + e.what());
    }
}

std::string fmt(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// ---------------------------------------------------------------- mining

struct MiningRun {
    std::size_t mined = 0;
    std::size_t optimum = 0;
    std::vector<SwapEvent> swaps;
    std::size_t mismatches = 0;
};

std::vector<MiningRun> mining_runs;
double mining_seconds = 0;

void run_mining_instances() {
    std::mt19937_64 rng(20240601);
    const double alphas[] = {0.0, 0.5, 1.0};
    const auto t0 = Clock::now();
    for (int i = 0; i < 50; ++i) {
        RandomStoreSpec spec;
        spec.nodes = 6 + rng() % 15;
        spec.rels = 8 + rng() % 23; // at most 30
        spec.labels = {"A", "B", "C"};
        spec.types = {"X", "Y"};
        spec.unlabeled = 0.1;
        spec.self_loop = 0.0;
        const auto g = random_store(rng, spec);
        const auto d = partition(g, 4 + rng() % 6, static_cast<std::uint64_t>(i));
        MinerParams mp;
        mp.k = 1 + i % 3;
        mp.tau_max = 1 + (i / 3) % 3;
        mp.alpha = alphas[(i / 9) % 3];
        mp.verify_bookkeeping = true;
        const auto set = mine(d, mp);
        const auto opt = brute_force_optimum(d, mp.k, mp.tau_max);
        mining_runs.push_back(MiningRun{set.coverage(), opt.best.coverage(), set.trace.swaps, set.trace.bookkeeping_mismatches});
    }
    mining_seconds = seconds_since(t0);
}

// ---------------------------------------------------------------- query family

/// Query shapes over 1..4 nodes: every edge subset of the complete graph for up to 3 nodes,
/// every connected edge subset for 4 nodes, plus a self-loop and a doubled edge.
std::vector<std::pair<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>>> query_shapes() {
    std::vector<std::pair<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>>> out;
    for (std::size_t n = 1; n <= 4; ++n) {
        std::vector<std::pair<std::size_t, std::size_t>> all;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) all.emplace_back(i, j);
        for (std::size_t mask = 0; mask < (std::size_t{1} << all.size()); ++mask) {
            std::vector<std::pair<std::size_t, std::size_t>> edges;
            for (std::size_t b = 0; b < all.size(); ++b)
                if (mask >> b & 1U) edges.push_back(all[b]);
            if (n == 4) {
                std::vector<std::size_t> comp(n);
                for (std::size_t v = 0; v < n; ++v) comp[v] = v;
                for (int pass = 0; pass < 4; ++pass)
                    for (auto [u, v] : edges) comp[u] = comp[v] = std::min(comp[u], comp[v]);
                if (std::any_of(comp.begin(), comp.end(), [](std::size_t c) { return c != 0; })) continue;
            }
            out.emplace_back(n, edges);
        }
    }
    out.push_back({2, {{0, 1}, {0, 1}}});
    out.push_back({2, {{0, 0}, {0, 1}}});
    return out;
}

std::vector<QueryGraph> query_family() {
    std::vector<QueryGraph> out;
    enum Variant { Plain, AllA, Alternating, FirstB, Directed, Property, Typed };
    for (const auto& [n, edges] : query_shapes()) {
        for (int v = Plain; v <= Typed; ++v) {
            QueryGraph q;
            for (std::size_t i = 0; i < n; ++i) {
                LabelSet ls;
                if (v == AllA) ls = {"A"};
                if (v == Alternating) ls = {i % 2 ? "B" : "A"};
                if (v == FirstB && i == 0) ls = {"B"};
                PropertyMap props;
                if (v == Property && i == 0) props["k"] = std::int64_t{0};
                q.add_node("q" + std::to_string(i), ls, props);
            }
            for (std::size_t j = 0; j < edges.size(); ++j) {
                std::optional<std::string> type;
                if (v == Typed) type = j % 2 ? "Y" : "X";
                q.add_relationship("e" + std::to_string(j), "q" + std::to_string(edges[j].first), "q" + std::to_string(edges[j].second),
                                   type, v == Directed);
            }
            out.push_back(std::move(q));
        }
    }
    return out;
}

std::vector<PropertyGraph> fixture_stores() {
    std::mt19937_64 rng(77);
    std::vector<PropertyGraph> out;
    for (int i = 0; i < 10; ++i) {
        RandomStoreSpec spec;
        spec.nodes = 10 + rng() % 41; // at most 50
        spec.rels = spec.nodes + rng() % spec.nodes;
        spec.multi_label = i % 2 ? 0.3 : 0.0;
        spec.self_loop = 0.1;
        out.push_back(random_store(rng, spec));
    }
    return out;
}

// ---------------------------------------------------------------- dedup

RawResult random_raw(std::mt19937_64& rng) {
    std::vector<NodeRecord> nodes;
    std::vector<RelRecord> rels;
    const std::size_t pool = 1 + rng() % 12;
    for (std::size_t i = 0; i < pool; ++i) {
        PropertyMap props{{"w", static_cast<std::int64_t>(rng() % 5)}};
        if (rng() % 2) props["name"] = std::string("x") + std::to_string(rng() % 9);
        nodes.push_back(node("n" + std::to_string(i), rng() % 2 ? LabelSet{"A"} : LabelSet{}, props));
    }
    for (std::size_t i = 0; i < pool; ++i)
        rels.push_back(rel("r" + std::to_string(i), rng() % 2 ? "X" : "Y", nodes[rng() % pool].id.value, nodes[rng() % pool].id.value));
    RawResult raw;
    const std::size_t width = 1 + rng() % 4;
    for (std::size_t c = 0; c < width; ++c)
        raw.columns.push_back(ResultColumn{"v" + std::to_string(c), "q" + std::to_string(c), rng() % 3 ? ElementKind::Node : ElementKind::Relationship});
    const std::size_t records = rng() % 40;
    for (std::size_t r = 0; r < records; ++r) {
        std::vector<Element> row;
        for (const auto& c : raw.columns) {
            if (c.kind == ElementKind::Node) row.emplace_back(nodes[rng() % pool]);
            else row.emplace_back(rels[rng() % pool]);
        }
        raw.records.push_back(std::move(row));
    }
    return raw;
}

// ---------------------------------------------------------------- layout

PropertyGraph random_connected(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    PropertyGraph g;
    for (std::size_t i = 0; i < n; ++i) g.add_node(node("v" + std::to_string(i)));
    std::size_t e = 0;
    for (std::size_t i = 1; i < n; ++i) g.add_relationship(rel("e" + std::to_string(e++), "L", "v" + std::to_string(rng() % i), "v" + std::to_string(i)));
    for (std::size_t i = 0; i < n; ++i)
        g.add_relationship(rel("e" + std::to_string(e++), "L", "v" + std::to_string(rng() % n), "v" + std::to_string(rng() % n)));
    return g;
}

double centroid_error(const LayoutResult& r, bool& finite) {
    long double sx = 0, sy = 0;
    for (const auto& [id, p] : r.positions) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) finite = false;
        sx += p.x;
        sy += p.y;
    }
    if (r.positions.empty()) return 0;
    const auto n = static_cast<long double>(r.positions.size());
    return static_cast<double>(std::max(std::fabs(sx / n), std::fabs(sy / n)));
}

double min_layout_seconds(const PropertyGraph& g, int repeats) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = Clock::now();
        auto r = layout(g);
        best = std::min(best, seconds_since(t0));
        if (r.positions.size() != g.node_count()) return -1;
    }
    return best;
}

// ---------------------------------------------------------------- partition

std::string partition_violation(const PropertyGraph& g, const PartitionSet& d, std::size_t target) {
    if (d.assignment.size() != g.node_count()) return "assignment not total";
    std::set<NodeId> seen;
    for (std::size_t p = 0; p < d.parts.size(); ++p) {
        if (d.parts[p].node_count() < 1 || d.parts[p].node_count() > 2 * target) return "part size out of bounds";
        for (const auto& n : d.parts[p].nodes()) {
            if (!seen.insert(n.id).second) return "node " + n.id.value + " in two parts";
            if (d.assignment.at(n.id) != p) return "assignment disagrees with part";
        }
    }
    std::set<RelId> cut(d.cut_edges.begin(), d.cut_edges.end());
    std::size_t inside = 0;
    for (const auto& r : g.relationships()) {
        const bool same = d.assignment.at(r.source) == d.assignment.at(r.target);
        if (same) {
            const auto* copy = d.parts[d.assignment.at(r.source)].find_relationship(r.id);
            if (!copy || !(*copy == r)) return "relationship " + r.id.value + " missing from its part";
            if (cut.contains(r.id)) return "internal relationship listed as cut";
            ++inside;
        } else if (!cut.contains(r.id)) {
            return "crossing relationship " + r.id.value + " not listed as cut";
        }
    }
    if (inside != d.edge_count() || inside + cut.size() != g.relationship_count()) return "edge accounting mismatch";
    return {};
}

} // namespace

int main() {
    run_mining_instances();

    check("ted_approximation_bound", [] {
        double worst = 1.0;
        std::size_t below = 0;
        for (const auto& r : mining_runs) {
            const double ratio = r.optimum == 0 ? 1.0 : static_cast<double>(r.mined) / static_cast<double>(r.optimum);
            worst = std::min(worst, ratio);
            if (4 * r.mined < r.optimum) ++below;
        }
        const bool ok = mining_runs.size() == 50 && below == 0 && mining_seconds < 60.0;
        return std::pair{ok, std::to_string(mining_runs.size()) + " instances, worst mined/optimum " + fmt(worst) + ", below 1/4: " +
                                 std::to_string(below) + ", " + fmt(mining_seconds, 2) + " s (limit 60 s)"};
    });

    check("swap_strict_improvement", [] {
        std::size_t swaps = 0, violations = 0, mismatches = 0;
        for (const auto& r : mining_runs) {
            mismatches += r.mismatches;
            for (const auto& s : r.swaps) {
                ++swaps;
                if (!(s.cover_after > s.cover_before)) ++violations;
                if (s.cover_after != s.cover_before + s.score_b - s.score_l) ++violations;
            }
        }
        return std::pair{violations == 0 && mismatches == 0 && swaps > 0,
                         std::to_string(swaps) + " accepted swaps, " + std::to_string(violations) + " violations, " +
                             std::to_string(mismatches) + " bookkeeping mismatches"};
    });

    check("figure4_discrimination", [] {
        const auto q = pattern_a_query();
        const auto names = translate(q);
        const auto stripped_text = strip_inequalities(q, {});
        TranslateOptions hom_opts;
        hom_opts.isomorphism = IsomorphismMode::Homomorphism;
        const auto b = pattern_b_store(), c = pattern_c_store();

        const auto b_full = run_translated(q, b);
        const auto c_full = run_translated(q, c);
        const auto b_stripped = run_as_embeddings(stripped_text, names, q, b);
        const auto c_stripped = run_as_embeddings(stripped_text, names, q, c);
        const auto c_hom = run_translated(q, c, hom_opts);

        const auto b_iso = brute_force_embeddings(q, b, IsomorphismMode::NodeIso);
        const auto c_iso = brute_force_embeddings(q, c, IsomorphismMode::NodeIso);
        const auto b_rel = brute_force_embeddings(q, b, IsomorphismMode::RelIsoOnly);
        const auto c_rel = brute_force_embeddings(q, c, IsomorphismMode::RelIsoOnly);
        const auto c_hom_oracle = brute_force_embeddings(q, c, IsomorphismMode::Homomorphism);

        const bool ok = b_full.empty() && c_full.empty() && b_iso.empty() && c_iso.empty() && b_stripped.size() == 4 &&
                        b_stripped == b_rel && c_stripped == c_rel && !c_hom.empty() && c_hom == c_hom_oracle && names.inequalities.size() == 3;
        return std::pair{ok, "with inequalities B=" + std::to_string(b_full.size()) + " C=" + std::to_string(c_full.size()) +
                                 "; stripped B=" + std::to_string(b_stripped.size()) + " (oracle " + std::to_string(b_rel.size()) +
                                 "), stripped C=" + std::to_string(c_stripped.size()) + " (oracle " + std::to_string(c_rel.size()) +
                                 "), C under homomorphism=" + std::to_string(c_hom.size()) + " (oracle " +
                                 std::to_string(c_hom_oracle.size()) + ")"};
    });

    const auto family = query_family();
    const auto stores = fixture_stores();

    check("translation_equals_oracle", [&] {
        std::size_t checked = 0, mismatches = 0, records = 0;
        for (const auto& g : stores) {
            EmbeddedAdapter adapter(g);
            for (const auto& q : family) {
                auto got = adapter.execute(q).result.embeddings(q);
                std::sort(got.begin(), got.end());
                const auto want = match_subgraph(q, g, IsomorphismMode::NodeIso);
                ++checked;
                records += want.size();
                if (got != want) ++mismatches;
            }
        }
        return std::pair{mismatches == 0, std::to_string(family.size()) + " queries x " + std::to_string(stores.size()) + " stores = " +
                                              std::to_string(checked) + " comparisons, " + std::to_string(records) + " records, " +
                                              std::to_string(mismatches) + " mismatches"};
    });

    check("trivial_inequality_safety", [&] {
        std::size_t checked = 0, mismatches = 0, eliminated = 0;
        for (const auto& g : stores) {
            bool exclusive = true;
            for (const auto& n : g.nodes()) exclusive = exclusive && n.labels.size() <= 1;
            for (const auto& q : family) {
                TranslateOptions on, off;
                on.exclusive_labels = off.exclusive_labels = exclusive;
                off.eliminate_trivial = false;
                eliminated += translate(q, off).inequalities.size() - translate(q, on).inequalities.size();
                ++checked;
                if (run_translated(q, g, on) != run_translated(q, g, off)) ++mismatches;
            }
        }
        return std::pair{mismatches == 0 && eliminated > 0, std::to_string(checked) + " comparisons, " + std::to_string(eliminated) +
                                                                " inequalities eliminated, " + std::to_string(mismatches) + " mismatches"};
    });

    check("dedup_lossless_and_economical", [] {
        std::mt19937_64 rng(5150);
        std::size_t lossy = 0, wasteful = 0, elements = 0, kept = 0;
        for (int i = 0; i < 100; ++i) {
            const auto raw = random_raw(rng);
            const auto rs = dedupe(raw);
            if (!(reconstruct(rs) == raw)) ++lossy;
            std::set<std::string> node_ids, rel_ids;
            for (const auto& row : raw.records)
                for (const auto& el : row) {
                    ++elements;
                    if (const auto* n = std::get_if<NodeRecord>(&el)) node_ids.insert(n->id.value);
                    else rel_ids.insert(std::get<RelRecord>(el).id.value);
                }
            if (rs.distinct_nodes.size() != node_ids.size() || rs.distinct_rels.size() != rel_ids.size()) ++wasteful;
            kept += rs.distinct_count();
        }
        return std::pair{lossy == 0 && wasteful == 0, "100 result sets, " + std::to_string(lossy) + " lossy, " + std::to_string(wasteful) +
                                                          " with extra table entries; " + std::to_string(elements) +
                                                          " record entries stored as " + std::to_string(kept) + " distinct elements"};
    });

    check("layout_properties", [] {
        double worst_centroid = 0, worst_pair = 0;
        bool finite = true;
        std::size_t outputs = 0;
        auto note = [&](const LayoutResult& r) {
            worst_centroid = std::max(worst_centroid, centroid_error(r, finite));
            ++outputs;
        };
        for (double d_opt : {30.0, 100.0, 400.0}) {
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                PropertyGraph g;
                g.add_node(node("a"));
                g.add_node(node("b"));
                g.add_relationship(rel("r", "L", "a", "b"));
                LayoutParams p;
                p.d_opt = d_opt;
                p.r_max = 3 * d_opt;
                p.seed = seed;
                const auto r = layout(g, p);
                note(r);
                const auto& a = *r.find(NodeId{"a"});
                const auto& b = *r.find(NodeId{"b"});
                worst_pair = std::max(worst_pair, std::fabs(std::hypot(a.x - b.x, a.y - b.y) - d_opt) / d_opt);
            }
        }
        std::mt19937_64 rng(99);
        for (int i = 0; i < 20; ++i) {
            RandomStoreSpec spec;
            spec.nodes = rng() % 80;
            spec.rels = spec.nodes ? rng() % (3 * spec.nodes) : 0;
            spec.self_loop = 0.2;
            LayoutParams p;
            p.seed = i;
            note(layout(random_store(rng, spec), p));
        }

        const auto g100 = random_connected(100, 1), g200 = random_connected(200, 2), g400 = random_connected(400, 3);
        note(layout(g100));
        note(layout(g200));
        note(layout(g400));
        const double t100 = min_layout_seconds(g100, 7), t200 = min_layout_seconds(g200, 5), t400 = min_layout_seconds(g400, 3);
        const double r1 = t200 / t100, r2 = t400 / t200;
        const bool timing = r1 >= 2.0 && r1 <= 8.0 && r2 >= 2.0 && r2 <= 8.0;
        const bool ok = worst_centroid <= 1e-9 && worst_pair <= 0.05 && finite && timing;
        return std::pair{ok, std::to_string(outputs) + " layouts, max |centroid| " + fmt(worst_centroid * 1e12, 3) + "e-12, worst two-node error " +
                                 fmt(100 * worst_pair, 3) + "% of d_opt, " + (finite ? "all finite" : "NON-FINITE") + "; time 100/200/400 = " +
                                 fmt(t100 * 1e3, 1) + "/" + fmt(t200 * 1e3, 1) + "/" + fmt(t400 * 1e3, 1) + " ms, ratios " + fmt(r1, 2) +
                                 " and " + fmt(r2, 2) + " (quadratic 4, allowed [2, 8])"};
    });

    check("metadata_constant_time", [] {
        std::mt19937_64 rng(3);
        std::size_t scans = 0;
        for (int i = 0; i < 10; ++i) {
            RandomStoreSpec spec;
            spec.nodes = 50 + rng() % 500;
            spec.rels = rng() % 1000;
            spec.multi_label = 0.2;
            auto store = std::make_shared<const PropertyGraph>(random_store(rng, spec));
            EmbeddedAdapter adapter(store);
            store->reset_scan_count();
            const auto m = adapter.fetch_metadata();
            scans += store->scan_count();
            if (m.node_count != spec.nodes) return std::pair{false, std::string("wrong node count")};
        }

        StubGraphServer stub(movies());
        RemoteConfig c;
        c.url = stub.url();
        c.user = stub.options().user;
        c.password = stub.options().password;
        RemoteAdapter remote(c);
        const auto m = remote.fetch_metadata();
        std::size_t undocumented = 0;
        for (const auto& s : stub.statements()) undocumented += !protocol::is_metadata_statement(s);
        const auto txs = stub.transactions().size();
        const bool counts_ok = m.labels == movies().counts().label_table() && m.rel_count == 4;
        const bool ok = scans == 0 && undocumented == 0 && txs == 1 && stub.requests_without_read_mode() == 0 && counts_ok &&
                        stub.open_transactions() == 0;
        return std::pair{ok, "embedded: " + std::to_string(scans) + " element scans over 10 stores; remote: " +
                                 std::to_string(stub.statements().size()) + " statements, " + std::to_string(undocumented) +
                                 " undocumented, " + std::to_string(txs) + " transaction(s), " +
                                 std::to_string(stub.requests_without_read_mode()) + " requests without READ access mode"};
    });

    check("partitioner_invariants", [] {
        std::mt19937_64 rng(1234);
        std::size_t broken = 0;
        std::string first;
        for (int i = 0; i < 50; ++i) {
            RandomStoreSpec spec;
            spec.nodes = 1 + rng() % 300;
            spec.rels = rng() % (3 * spec.nodes + 1);
            const auto g = random_store(rng, spec);
            const std::size_t target = 2 + rng() % 40;
            const auto d = partition(g, target, static_cast<std::uint64_t>(i));
            auto why = partition_violation(g, d, target);
            if (why.empty() && !(partition(g, target, static_cast<std::uint64_t>(i)).assignment == d.assignment)) why = "not reproducible";
            if (!why.empty()) {
                ++broken;
                if (first.empty()) first = why;
            }
        }
        const auto path = path_graph(6);
        const auto d = partition(path, 3);
        const std::size_t optimum = min_balanced_cut(path, 3);
        const bool path_ok = d.cut_edges.size() == 1 && optimum == 1 && d.parts.size() == 2 && partition_violation(path, d, 3).empty();
        return std::pair{broken == 0 && path_ok, "50 random graphs, " + std::to_string(broken) + " violations" +
                                                     (first.empty() ? std::string{} : " (" + first + ")") + "; path of 6: " +
                                                     std::to_string(d.cut_edges.size()) + " cut edge(s), exhaustive optimum " +
                                                     std::to_string(optimum)};
    });

    std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
