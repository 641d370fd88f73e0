// gqw: batch front end and HTTP server for the graph-query workbench.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "gqw/cypher/translate.hpp"
#include "gqw/error.hpp"
#include "gqw/graph/interchange.hpp"
#include "gqw/graph/query_graph.hpp"
#include "gqw/handler/adapter.hpp"
#include "gqw/handler/metadata.hpp"
#include "gqw/handler/result_set.hpp"
#include "gqw/layout/layout.hpp"
#include "gqw/mining/pattern_io.hpp"
#include "gqw/mining/ted.hpp"
#include "gqw/partition/partitioner.hpp"
#include "gqw/server/api.hpp"
#include "gqw/server/http.hpp"

namespace {

using gqw::json;

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gqw::Error(gqw::ErrorCode::NotFound, "cannot write '" + path + "'");
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
}

gqw::PropertyGraph read_graph(const std::string& path) { return gqw::load_graph(gqw::read_file(path)); }

struct StoreOptions {
    std::string input;
    std::string remote;
    std::string database = "neo4j";
    long long timeout_ms = 30000;
};

void add_store_options(CLI::App* cmd, StoreOptions& o) {
    auto* in = cmd->add_option("--input,-i", o.input, "graph interchange document");
    auto* remote = cmd->add_option("--remote", o.remote, "HTTP endpoint of a graph database (credentials from GQW_REMOTE_USER/GQW_REMOTE_PASSWORD)");
    in->excludes(remote);
    cmd->add_option("--database", o.database, "remote database name");
    cmd->add_option("--timeout-ms", o.timeout_ms, "remote statement timeout");
}

gqw::StoreAdapter open_store(const StoreOptions& o) {
    if (!o.remote.empty())
        return gqw::connect(json{{"kind", "remote"}, {"url", o.remote}, {"database", o.database}, {"timeout_ms", o.timeout_ms}});
    if (o.input.empty()) throw gqw::Error(gqw::ErrorCode::Validation, "either --input or --remote is required");
    return gqw::connect(read_graph(o.input));
}

gqw::ApiServer* g_server = nullptr;

extern "C" void on_signal(int) {
    if (g_server) g_server->stop();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-query workbench: pattern mining, Cypher translation, execution and layout"};
    app.require_subcommand(1);
    std::string output;

    auto* serve = app.add_subcommand("serve", "run the HTTP API");
    std::string config_path;
    std::optional<int> port_override;
    serve->add_option("--config,-c", config_path, "server config document");
    serve->add_option("--port", port_override, "listen port (overrides the config file)");

    auto* mine_cmd = app.add_subcommand("mine", "mine top-k edge-diversified patterns");
    StoreOptions mine_store;
    gqw::MinerParams mp;
    std::size_t part_size = gqw::kDefaultPartSize;
    std::uint64_t seed = 0;
    bool with_cover = false, with_trace = false;
    add_store_options(mine_cmd, mine_store);
    mine_cmd->add_option("--k", mp.k, "number of patterns");
    mine_cmd->add_option("--alpha", mp.alpha, "swap threshold in [0,1]");
    mine_cmd->add_option("--tau-max", mp.tau_max, "largest pattern size in edges");
    mine_cmd->add_option("--part-size", part_size, "target nodes per partition");
    mine_cmd->add_option("--seed", seed, "partitioner seed");
    mine_cmd->add_flag("--cover", with_cover, "include cover sets");
    mine_cmd->add_flag("--trace", with_trace, "include the swap trace");
    mine_cmd->add_option("--output,-o", output, "output file (default stdout)");

    auto* translate_cmd = app.add_subcommand("translate", "translate a query document to Cypher");
    std::string query_path;
    bool keep_trivial = false, multi_label = false, references = false;
    std::string mode = "node-iso";
    translate_cmd->add_option("--query,-q", query_path, "query document")->required();
    translate_cmd->add_flag("--keep-trivial", keep_trivial, "emit inequalities that are provably redundant");
    translate_cmd->add_flag("--multi-label", multi_label, "store nodes may carry several labels");
    translate_cmd->add_flag("--references", references, "return id(v) instead of elements");
    translate_cmd->add_option("--mode", mode, "node-iso | rel-iso | homomorphism")
        ->check(CLI::IsMember({"node-iso", "rel-iso", "homomorphism"}));
    translate_cmd->add_option("--output,-o", output, "output file (default stdout)");

    auto* exec_cmd = app.add_subcommand("exec", "execute a query document and lay out the result");
    StoreOptions exec_store;
    std::string exec_query;
    bool with_layout = false;
    gqw::LayoutParams lp;
    add_store_options(exec_cmd, exec_store);
    exec_cmd->add_option("--query,-q", exec_query, "query document")->required();
    exec_cmd->add_flag("--layout", with_layout, "include node positions");
    exec_cmd->add_option("--output,-o", output, "output file (default stdout)");

    auto* layout_cmd = app.add_subcommand("layout", "lay out a graph document");
    std::string layout_input;
    layout_cmd->add_option("--input,-i", layout_input, "graph interchange document")->required();
    for (auto* cmd : {exec_cmd, layout_cmd}) {
        cmd->add_option("--d-opt", lp.d_opt, "optimal edge length");
        cmd->add_option("--r-max", lp.r_max, "repulsion cut-off distance");
        cmd->add_option("--iterations", lp.iterations, "force iterations");
        cmd->add_option("--layout-seed", lp.seed, "initial position seed");
    }
    layout_cmd->add_option("--output,-o", output, "output file (default stdout)");

    auto* metadata_cmd = app.add_subcommand("metadata", "print store metadata");
    StoreOptions md_store;
    add_store_options(metadata_cmd, md_store);
    metadata_cmd->add_option("--output,-o", output, "output file (default stdout)");

    auto* partition_cmd = app.add_subcommand("partition", "split a graph into small parts");
    std::string part_input;
    partition_cmd->add_option("--input,-i", part_input, "graph interchange document")->required();
    partition_cmd->add_option("--part-size", part_size, "target nodes per partition");
    partition_cmd->add_option("--seed", seed, "partitioner seed");
    partition_cmd->add_option("--output,-o", output, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (serve->parsed()) {
            gqw::ServerConfig cfg;
            if (!config_path.empty()) cfg = gqw::server_config_from_json(gqw::parse_json_document(gqw::read_file(config_path)));
            if (port_override) cfg.port = *port_override;
            gqw::ApiService service(cfg);
            gqw::ApiServer server(service);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "listening on " << cfg.host << ":" << cfg.port << std::endl;
            server.run(cfg.host, cfg.port);
            g_server = nullptr;
            service.wait_for_jobs();
            return 0;
        }
        if (mine_cmd->parsed()) {
            mp.validate();
            auto store = open_store(mine_store);
            const auto d = gqw::partition(store.export_graph(), part_size, seed);
            if (d.parts.empty()) throw gqw::Error(gqw::ErrorCode::Validation, "store is empty; nothing to mine");
            const auto set = gqw::mine(d, mp);
            json doc = gqw::pattern_set_to_json(set, with_cover);
            if (with_trace) doc["trace"] = gqw::mining_trace_to_json(set.trace);
            write_output(output, doc.dump(2));
            return 0;
        }
        if (translate_cmd->parsed()) {
            gqw::TranslateOptions opts;
            opts.eliminate_trivial = !keep_trivial;
            opts.exclusive_labels = !multi_label;
            opts.returns = references ? gqw::ReturnMode::References : gqw::ReturnMode::Elements;
            opts.isomorphism = mode == "rel-iso"        ? gqw::IsomorphismMode::RelIsoOnly
                               : mode == "homomorphism" ? gqw::IsomorphismMode::Homomorphism
                                                        : gqw::IsomorphismMode::NodeIso;
            write_output(output, gqw::translate(gqw::load_query(gqw::read_file(query_path)), opts).text);
            return 0;
        }
        if (exec_cmd->parsed()) {
            auto store = open_store(exec_store);
            if (store.is_remote()) store.fetch_metadata();
            const auto ex = store.execute(gqw::load_query(gqw::read_file(exec_query)));
            json doc{{"cypher", ex.cypher.text}, {"result", gqw::result_to_json(ex.result)}};
            if (with_layout) doc["layout"] = gqw::layout_to_json(gqw::layout(ex.result.result_graph(), lp));
            write_output(output, doc.dump(2));
            return 0;
        }
        if (layout_cmd->parsed()) {
            write_output(output, gqw::layout_to_json(gqw::layout(read_graph(layout_input), lp)).dump(2));
            return 0;
        }
        if (metadata_cmd->parsed()) {
            auto store = open_store(md_store);
            write_output(output, gqw::metadata_to_json(store.fetch_metadata()).dump(2));
            return 0;
        }
        if (partition_cmd->parsed()) {
            const auto d = gqw::partition(read_graph(part_input), part_size, seed);
            json parts = json::array();
            for (const auto& p : d.parts) {
                json ids = json::array();
                for (const auto& n : p.nodes()) ids.push_back(n.id.value);
                parts.push_back({{"nodes", std::move(ids)}, {"relationships", p.relationship_count()}});
            }
            json cut = json::array();
            for (const auto& r : d.cut_edges) cut.push_back(r.value);
            write_output(output, json{{"parts", std::move(parts)}, {"cut_edges", std::move(cut)}}.dump(2));
            return 0;
        }
    } catch (const gqw::Error& e) {
        std::cerr << gqw::error_body(e.code(), e.what()).dump() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << gqw::error_body(gqw::ErrorCode::Validation, e.what()).dump() << std::endl;
        return 1;
    }
    return 1;
}
