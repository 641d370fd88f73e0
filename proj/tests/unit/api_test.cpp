#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "gqw/server/api.hpp"
#include "gqw/server/http.hpp"

#include "support/fixtures.hpp"
#include "support/stub_graph_server.hpp"

using namespace gqw;
using namespace gqw::testing;

namespace {

std::string slurp(const std::string& rel) {
    std::ifstream in(std::string(GQW_TEST_DATA_DIR) + "/" + rel, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json embedded_spec(const std::string& fixture) {
    return {{"kind", "embedded"}, {"graph", json::parse(slurp("fixtures/" + fixture))}};
}

std::string open_session(ApiService& api, const json& adapter) {
    const auto r = api.handle("POST", "/sessions", json{{"adapter", adapter}}.dump());
    EXPECT_EQ(r.status, 201) << r.body.dump();
    return r.body.value("session_id", std::string{});
}

ApiResponse wait_for_patterns(ApiService& api, const std::string& id) {
    api.wait_for_jobs();
    return api.handle("GET", "/sessions/" + id + "/patterns", "");
}

} // namespace

TEST(Api, HealthAndUnknownRoutes) {
    ApiService api;
    EXPECT_EQ(api.handle("GET", "/health", "").status, 200);
    const auto r = api.handle("GET", "/nope", "");
    EXPECT_EQ(r.status, 404);
    EXPECT_EQ(r.body["error"]["code"], "not_found");
    EXPECT_EQ(api.handle("GET", "/sessions/0123456789abcdef/metadata", "").status, 404);
    EXPECT_EQ(api.handle("POST", "/sessions", "{not json").status, 400);
}

TEST(Api, ConnectPopulatesMetadata) {
    ApiService api;
    const auto r = api.handle("POST", "/sessions", json{{"adapter", embedded_spec("movies.json")}}.dump());
    ASSERT_EQ(r.status, 201);
    const std::string id = r.body["session_id"];
    EXPECT_EQ(id.size(), 16u);
    EXPECT_EQ(r.body["metadata"]["labels"]["Person"], 3);
    const auto m = api.handle("GET", "/sessions/" + id + "/metadata", "");
    EXPECT_EQ(m.status, 200);
    EXPECT_EQ(m.body["relationship_count"], 4);
    EXPECT_EQ(api.session_count(), 1u);
}

TEST(Api, BadRemoteCredentialsGiveAuthPayload) {
    StubGraphServer stub(movies());
    ApiService api;
    const auto r = api.handle(
        "POST", "/sessions",
        json{{"adapter", {{"kind", "remote"}, {"url", stub.url()}, {"user", "reader"}, {"password", "nope"}}}}.dump());
    EXPECT_EQ(r.status, 401);
    EXPECT_EQ(r.body["error"]["code"], "authentication");
}

TEST(Api, RemoteSessionRunsEndToEnd) {
    StubGraphServer stub(movies());
    ApiService api;
    const auto id = open_session(api, {{"kind", "remote"}, {"url", stub.url()}, {"user", "reader"}, {"password", "secret"}});
    const auto ex = api.handle("POST", "/sessions/" + id + "/execute",
                               json{{"query", json::parse(slurp("fixtures/single.q.json"))}}.dump());
    ASSERT_EQ(ex.status, 200) << ex.body.dump();
    EXPECT_EQ(ex.body["result"]["records"].size(), 5u);
    EXPECT_EQ(ex.body["layout"]["positions"].size(), 5u);
    EXPECT_EQ(stub.requests_without_read_mode(), 0u);
}

TEST(Api, RemoteTimeoutSurfacesStatement) {
    StubGraphServer stub(movies());
    ServerConfig cfg;
    ApiService api(cfg);
    const auto id = open_session(api, {{"kind", "remote"}, {"url", stub.url()}, {"user", "reader"}, {"password", "secret"}});
    // Reconnect the same session to a slow server with a short timeout.
    StubGraphServer::Options slow;
    slow.delay = std::chrono::milliseconds(700);
    StubGraphServer lagging(movies(), slow);
    const auto r = api.handle("POST", "/sessions",
                              json{{"session_id", id},
                                   {"adapter", {{"kind", "remote"}, {"url", lagging.url()}, {"user", "reader"}, {"password", "secret"},
                                                {"timeout_ms", 200}}}}
                                  .dump());
    EXPECT_EQ(r.status, 504);
    EXPECT_EQ(r.body["error"]["code"], "timeout");
    EXPECT_NE(r.body["error"]["message"].get<std::string>().find("RETURN 1"), std::string::npos);
}

TEST(Api, PatternJobOnTriangle) {
    ApiService api;
    const auto id = open_session(api, embedded_spec("triangle.json"));
    const auto start = api.handle("POST", "/sessions/" + id + "/patterns", json{{"k", 1}, {"tau_max", 1}}.dump());
    EXPECT_EQ(start.status, 202);
    const auto done = wait_for_patterns(api, id);
    ASSERT_EQ(done.status, 200);
    EXPECT_EQ(done.body["job"]["state"], "done");
    ASSERT_EQ(done.body["patterns"]["patterns"].size(), 1u);
    EXPECT_EQ(done.body["patterns"]["total_coverage"], 3);
}

TEST(Api, PatternParametersAreValidated) {
    ApiService api;
    const auto id = open_session(api, embedded_spec("triangle.json"));
    const auto r = api.handle("POST", "/sessions/" + id + "/patterns", json{{"k", 0}}.dump());
    EXPECT_EQ(r.status, 400);
    EXPECT_EQ(r.body["error"]["code"], "validation");
    EXPECT_EQ(api.handle("POST", "/sessions/" + id + "/patterns", json{{"target_part_size", 1}}.dump()).status, 400);
}

TEST(Api, SecondPatternJobWhileRunningIsRejected) {
    StubGraphServer::Options slow;
    slow.delay = std::chrono::milliseconds(150);
    StubGraphServer stub(movies(), slow);
    ApiService api;
    const auto id = open_session(api, {{"kind", "remote"}, {"url", stub.url()}, {"user", "reader"}, {"password", "secret"}});
    EXPECT_EQ(api.handle("POST", "/sessions/" + id + "/patterns", json{{"k", 2}}.dump()).status, 202);
    const auto again = api.handle("POST", "/sessions/" + id + "/patterns", json{{"k", 2}}.dump());
    EXPECT_EQ(again.status, 409);
    EXPECT_EQ(again.body["error"]["code"], "job_in_progress");
    EXPECT_EQ(wait_for_patterns(api, id).body["job"]["state"], "done");
}

TEST(Api, TranslateMatchesGolden) {
    ApiService api;
    const auto id = open_session(api, embedded_spec("movies.json"));
    const auto r = api.handle("POST", "/sessions/" + id + "/translate", slurp("fixtures/path3.q.json"));
    ASSERT_EQ(r.status, 200) << r.body.dump();
    EXPECT_EQ(r.body, json::parse(slurp("golden/api_translate_path3.json")));
    const auto single = api.handle("POST", "/sessions/" + id + "/translate", slurp("fixtures/single.q.json"));
    EXPECT_EQ(single.body["cypher"], "MATCH (n1)\nRETURN n1");
    const auto empty = api.handle("POST", "/sessions/" + id + "/translate", R"({"nodes": [], "relationships": []})");
    EXPECT_EQ(empty.status, 400);
    EXPECT_EQ(empty.body["error"]["code"], "empty_query");
}

TEST(Api, ExecuteSingleNodeOnThreeNodes) {
    ApiService api;
    const auto id = open_session(api, embedded_spec("three-nodes.json"));
    const auto r = api.handle("POST", "/sessions/" + id + "/execute", json{{"query", json::parse(slurp("fixtures/single.q.json"))}}.dump());
    ASSERT_EQ(r.status, 200) << r.body.dump();
    EXPECT_EQ(r.body["result"]["records"].size(), 3u);
    const auto& pos = r.body["layout"]["positions"];
    ASSERT_EQ(pos.size(), 3u);
    double sx = 0, sy = 0;
    for (const auto& p : pos) {
        sx += p["x"].get<double>();
        sy += p["y"].get<double>();
    }
    EXPECT_LE(std::fabs(sx / 3), 1e-9);
    EXPECT_LE(std::fabs(sy / 3), 1e-9);
    const auto again = api.handle("GET", "/sessions/" + id + "/result", "");
    EXPECT_EQ(again.status, 200);
    EXPECT_EQ(again.body, r.body);
}

TEST(Api, ExecutePatternAOnPatternBIsEmpty) {
    ApiService api;
    const auto id = open_session(api, embedded_spec("pattern_b.json"));
    const auto r = api.handle("POST", "/sessions/" + id + "/execute", json{{"query", json::parse(slurp("fixtures/pattern_a.q.json"))}}.dump());
    ASSERT_EQ(r.status, 200);
    EXPECT_TRUE(r.body["result"]["records"].empty());
    EXPECT_TRUE(r.body["layout"]["positions"].empty());
}

TEST(Api, ExecuteWithoutQueryAndResultBeforeExecute) {
    ApiService api;
    const auto id = open_session(api, embedded_spec("movies.json"));
    const auto r = api.handle("POST", "/sessions/" + id + "/execute", "{}");
    EXPECT_EQ(r.status, 400);
    EXPECT_EQ(r.body["error"]["code"], "empty_query");
    EXPECT_EQ(api.handle("GET", "/sessions/" + id + "/result", "").status, 404);
}

TEST(Api, ApplyPatternFromMinedSet) {
    ApiService api;
    const auto id = open_session(api, embedded_spec("movies.json"));
    api.handle("POST", "/sessions/" + id + "/patterns", json{{"k", 2}, {"tau_max", 2}}.dump());
    ASSERT_EQ(wait_for_patterns(api, id).body["job"]["state"], "done");
    const auto r = api.handle("POST", "/sessions/" + id + "/apply-pattern", json{{"pattern", 0}}.dump());
    ASSERT_EQ(r.status, 200) << r.body.dump();
    EXPECT_FALSE(r.body["query"]["nodes"].empty());
    EXPECT_TRUE(r.body.contains("cypher"));
    QueryGraph q;
    q.add_node("n1", {"Movie"});
    const auto conflict = api.handle("POST", "/sessions/" + id + "/apply-pattern",
                                     json{{"query", query_to_json(q)},
                                          {"graph", {{"nodes", {{{"id", "p0"}, {"labels", {"Person"}}}}}, {"relationships", json::array()}}},
                                          {"anchor", "n1"}}
                                         .dump());
    EXPECT_EQ(conflict.status, 400);
    EXPECT_EQ(conflict.body["error"]["code"], "label_conflict");
    EXPECT_EQ(api.handle("POST", "/sessions/" + id + "/apply-pattern", json{{"pattern", 99}}.dump()).status, 404);
}

TEST(Api, ReconnectClearsSessionState) {
    ApiService api;
    const auto id = open_session(api, embedded_spec("movies.json"));
    api.handle("POST", "/sessions/" + id + "/patterns", json{{"k", 1}, {"tau_max", 1}}.dump());
    wait_for_patterns(api, id);
    ASSERT_EQ(api.handle("POST", "/sessions/" + id + "/execute", json{{"query", json::parse(slurp("fixtures/single.q.json"))}}.dump()).status, 200);
    const auto r = api.handle("POST", "/sessions", json{{"session_id", id}, {"adapter", embedded_spec("triangle.json")}}.dump());
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.body["session_id"], id);
    EXPECT_EQ(r.body["generation"], 1);
    EXPECT_EQ(r.body["metadata"]["node_count"], 3);
    const auto p = api.handle("GET", "/sessions/" + id + "/patterns", "");
    EXPECT_EQ(p.body["job"]["state"], "idle");
    EXPECT_FALSE(p.body.contains("patterns"));
    EXPECT_EQ(api.handle("GET", "/sessions/" + id + "/result", "").status, 404);
    EXPECT_EQ(api.handle("POST", "/sessions/" + id + "/execute", "{}").status, 400);
}

TEST(Api, IdleSessionsExpire) {
    auto now = std::chrono::steady_clock::time_point{};
    ServerConfig cfg;
    cfg.session_ttl = std::chrono::seconds(60);
    ApiService api(cfg, [&] { return now; });
    const auto id = open_session(api, embedded_spec("triangle.json"));
    now += std::chrono::seconds(30);
    EXPECT_EQ(api.handle("GET", "/sessions/" + id + "/metadata", "").status, 200);
    now += std::chrono::seconds(61);
    EXPECT_EQ(api.handle("GET", "/sessions/" + id + "/metadata", "").status, 404);
    EXPECT_EQ(api.session_count(), 0u);
}

TEST(Api, ServerConfigDocument) {
    const auto cfg = server_config_from_json(json::parse(slurp("fixtures/server.json")));
    EXPECT_EQ(cfg.port, 8080);
    EXPECT_EQ(cfg.session_ttl, std::chrono::seconds(1800));
    EXPECT_EQ(cfg.layout.r_max, 300);
    EXPECT_THROW(server_config_from_json(json{{"listen", {{"port", -4}}}}), Error);
}

TEST(HttpServer, ServesTheApiOverHttp) {
    ApiService api;
    ApiServer server(api);
    const int port = server.start("127.0.0.1", 0);
    httplib::Client cli("127.0.0.1", port);
    auto health = cli.Get("/health");
    ASSERT_TRUE(health);
    EXPECT_EQ(health->status, 200);
    auto created = cli.Post("/sessions", json{{"adapter", embedded_spec("movies.json")}}.dump(), "application/json");
    ASSERT_TRUE(created);
    EXPECT_EQ(created->status, 201);
    const auto id = json::parse(created->body)["session_id"].get<std::string>();
    auto tr = cli.Post("/sessions/" + id + "/translate", slurp("fixtures/single.q.json"), "application/json");
    ASSERT_TRUE(tr);
    EXPECT_EQ(json::parse(tr->body)["cypher"], "MATCH (n1)\nRETURN n1");
    auto missing = cli.Get("/sessions/" + id + "/result");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
    server.stop();
}
