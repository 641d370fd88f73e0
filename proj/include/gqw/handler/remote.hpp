#pragma once

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "httplib.h"

#include "gqw/cypher/translate.hpp"
#include "gqw/error.hpp"
#include "gqw/graph/interchange.hpp"
#include "gqw/graph/property_graph.hpp"
#include "gqw/graph/query_graph.hpp"
#include "gqw/graph/schema.hpp"
#include "gqw/handler/metadata.hpp"
#include "gqw/handler/protocol.hpp"
#include "gqw/handler/result_set.hpp"

namespace gqw {

struct RemoteConfig {
    std::string url; // scheme://host:port
    std::string database = "neo4j";
    std::string user;
    std::string password;
    std::chrono::milliseconds timeout{30000};
    std::size_t page_size = 1000;
};

/// Fills missing credentials from GQW_REMOTE_USER / GQW_REMOTE_PASSWORD.
inline void credentials_from_environment(RemoteConfig& c) {
    if (c.user.empty())
        if (const char* u = std::getenv("GQW_REMOTE_USER")) c.user = u;
    if (c.password.empty())
        if (const char* p = std::getenv("GQW_REMOTE_PASSWORD")) c.password = p;
}

/// Outcome of one execute call: the text sent and the deduplicated records.
struct Execution {
    CypherText cypher;
    ResultSet result;
};

/// Read-only client of the HTTP transactional API. Every outbound statement passes the
/// allowlist and is recorded in the statement log.
class RemoteAdapter {
public:
    explicit RemoteAdapter(RemoteConfig config) : config_(std::move(config)) {
        if (config_.url.empty()) throw Error(ErrorCode::Validation, "remote url is empty");
        if (config_.page_size == 0) throw Error(ErrorCode::Validation, "page size must be at least 1");
    }

    const RemoteConfig& config() const noexcept { return config_; }

    /// No-op read transaction; distinguishes bad credentials, unreachable hosts and servers
    /// without the transactional endpoint.
    void verify() {
        auto r = commit({protocol::Statement{std::string(protocol::kPing)}});
        if (r.at(0).rows.size() != 1 || r[0].rows[0] != json::array({1}))
            throw Error(ErrorCode::Capability, "unexpected answer to " + std::string(protocol::kPing));
    }

    /// All metadata statements inside one explicit transaction.
    Metadata fetch_metadata() {
        std::lock_guard metadata_lock(metadata_mutex_);
        Transaction tx(*this);
        auto first = tx.run({{std::string(protocol::kNodeCount)},
                             {std::string(protocol::kRelCount)},
                             {std::string(protocol::kLabels)},
                             {std::string(protocol::kTypes)},
                             {std::string(protocol::kNodeProperties)},
                             {std::string(protocol::kRelProperties)},
                             {std::string(protocol::kSchema), json::object(), true}});
        Metadata m;
        m.node_count = single_count(first[0]);
        m.rel_count = single_count(first[1]);
        std::vector<std::string> labels = string_column(first[2]);
        std::vector<std::string> types = string_column(first[3]);

        std::vector<protocol::Statement> counts;
        for (const auto& l : labels) counts.push_back({protocol::label_count_statement(l)});
        for (const auto& t : types) counts.push_back({protocol::type_count_statement(t)});
        std::vector<protocol::StatementResult> second;
        if (!counts.empty()) second = tx.run(counts);
        tx.commit();

        for (std::size_t i = 0; i < labels.size(); ++i) m.labels[labels[i]] = single_count(second[i]);
        for (std::size_t i = 0; i < types.size(); ++i) m.types[types[i]] = single_count(second[labels.size() + i]);

        for (const auto& row : first[4].rows) {
            if (!row.is_array() || row.size() < 3) continue;
            LabelSet ls;
            if (row[0].is_array())
                for (const auto& l : row[0])
                    if (l.is_string()) ls.insert(l.get<std::string>());
            m.label_sets.insert(ls);
            add_property(m, OwnerKind::Node, row[1], row[2]);
        }
        for (const auto& row : first[5].rows)
            if (row.is_array() && row.size() >= 3) add_property(m, OwnerKind::Relationship, row[1], row[2]);
        m.schema = schema_from_visualization(first[6], m.labels);
        {
            std::lock_guard lock(state_mutex_);
            exclusive_labels_ = m.exclusive_labels();
        }
        return m;
    }

    /// Two phases: the translated query returns element ids only, then every distinct id is
    /// fetched once in a single batched request.
    Execution execute(const QueryGraph& q) {
        TranslateOptions opts;
        opts.returns = ReturnMode::References;
        {
            std::lock_guard lock(state_mutex_);
            opts.exclusive_labels = exclusive_labels_.value_or(false);
        }
        Execution ex{translate(q, opts), {}};
        auto& rs = ex.result;
        for (const auto& n : q.nodes) rs.columns.push_back(ResultColumn{ex.cypher.var_map.at(n.id), n.id, ElementKind::Node});
        for (const auto& r : q.relationships)
            rs.columns.push_back(ResultColumn{ex.cypher.var_map.at(r.id), r.id, ElementKind::Relationship});

        auto refs = commit({protocol::Statement{ex.cypher.text}});
        const auto& sr = refs.at(0);
        std::vector<std::size_t> position;
        for (const auto& c : rs.columns) {
            auto it = std::find(sr.columns.begin(), sr.columns.end(), c.variable);
            if (it == sr.columns.end()) throw Error(ErrorCode::Capability, "response lacks column " + c.variable);
            position.push_back(static_cast<std::size_t>(it - sr.columns.begin()));
        }
        std::map<std::string, json> node_ids, rel_ids;
        for (const auto& row : sr.rows) {
            if (!row.is_array() || row.size() != sr.columns.size()) throw Error(ErrorCode::Capability, "malformed result row");
            std::vector<ElementRef> out;
            for (std::size_t c = 0; c < rs.columns.size(); ++c) {
                const auto& v = row[position[c]];
                auto id = protocol::id_text(v);
                (rs.columns[c].kind == ElementKind::Node ? node_ids : rel_ids).emplace(id, v);
                out.push_back(ElementRef{rs.columns[c].kind, std::move(id)});
            }
            rs.reference_list.push_back(std::move(out));
        }
        if (node_ids.empty() && rel_ids.empty()) return ex;

        std::vector<protocol::Statement> fetch;
        if (!node_ids.empty()) fetch.push_back({std::string(protocol::kFetchNodes), {{"ids", values_of(node_ids)}}});
        if (!rel_ids.empty()) fetch.push_back({std::string(protocol::kFetchRels), {{"ids", values_of(rel_ids)}}});
        auto payload = commit(fetch);
        std::size_t slot = 0;
        if (!node_ids.empty())
            for (const auto& row : payload.at(slot++).rows) {
                auto n = node_from_row(row);
                rs.distinct_nodes.emplace(n.id, std::move(n));
            }
        if (!rel_ids.empty())
            for (const auto& row : payload.at(slot++).rows) {
                auto r = rel_from_row(row);
                rs.distinct_rels.emplace(r.id, std::move(r));
            }
        for (const auto& [id, v] : node_ids)
            if (!rs.distinct_nodes.contains(NodeId{id})) throw Error(ErrorCode::RemoteQuery, "node '" + id + "' vanished before fetch");
        for (const auto& [id, v] : rel_ids)
            if (!rs.distinct_rels.contains(RelId{id})) throw Error(ErrorCode::RemoteQuery, "relationship '" + id + "' vanished before fetch");
        return ex;
    }

    /// Whole-store export through paged reads inside one transaction.
    PropertyGraph export_graph() {
        try {
            Transaction tx(*this);
            PropertyGraph g;
            std::vector<RelRecord> rels;
            for (std::size_t skip = 0;; skip += config_.page_size) {
                auto page = tx.run({{std::string(protocol::kExportNodes), {{"skip", skip}, {"limit", config_.page_size}}}});
                for (const auto& row : page.at(0).rows) g.add_node(node_from_row(row));
                if (page[0].rows.size() < config_.page_size) break;
            }
            for (std::size_t skip = 0;; skip += config_.page_size) {
                auto page = tx.run({{std::string(protocol::kExportRels), {{"skip", skip}, {"limit", config_.page_size}}}});
                for (const auto& row : page.at(0).rows) rels.push_back(rel_from_row(row));
                if (page[0].rows.size() < config_.page_size) break;
            }
            tx.commit();
            for (auto& r : rels) g.add_relationship(std::move(r));
            return g;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Network || e.code() == ErrorCode::Authentication || e.code() == ErrorCode::Timeout) throw;
            throw Error(ErrorCode::ExportFailure, std::string("export failed: ") + e.what());
        }
    }

    std::vector<std::string> statement_log() const {
        std::lock_guard lock(state_mutex_);
        return log_;
    }

private:
    class Transaction {
    public:
        explicit Transaction(RemoteAdapter& a) : a_(a) {
            auto [body, location] = a_.post(a_.base() + "/tx", protocol::request_body({}), {});
            json doc = json::parse(body, nullptr, false);
            std::string commit = doc.is_object() ? doc.value("commit", std::string{}) : std::string{};
            if (commit.empty()) commit = location.empty() ? std::string{} : location + "/commit";
            auto pos = commit.find("/db/");
            if (pos == std::string::npos || commit.size() < 7 || commit.substr(commit.size() - 7) != "/commit")
                throw Error(ErrorCode::Capability, "server did not open an explicit transaction");
            path_ = commit.substr(pos, commit.size() - 7 - pos);
        }
        Transaction(const Transaction&) = delete;
        Transaction& operator=(const Transaction&) = delete;
        ~Transaction() {
            if (open_) a_.rollback(path_);
        }

        std::vector<protocol::StatementResult> run(const std::vector<protocol::Statement>& statements) {
            return a_.send(path_, statements);
        }
        void commit() {
            a_.send(path_ + "/commit", {});
            open_ = false;
        }

    private:
        RemoteAdapter& a_;
        std::string path_;
        bool open_ = true;
    };

    std::string base() const { return "/db/" + config_.database; }

    std::vector<protocol::StatementResult> commit(const std::vector<protocol::Statement>& statements) {
        return send(base() + "/tx/commit", statements);
    }

    std::vector<protocol::StatementResult> send(const std::string& path, const std::vector<protocol::Statement>& statements) {
        json body = protocol::request_body(statements);
        {
            std::lock_guard lock(state_mutex_);
            for (const auto& s : statements) log_.push_back(s.text);
        }
        auto [text, location] = post(path, body, statements);
        return protocol::parse_response(text, statements.size());
    }

    httplib::Client client() const {
        httplib::Client cli(config_.url);
        const auto us = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout).count();
        cli.set_connection_timeout(static_cast<time_t>(us / 1000000), static_cast<time_t>(us % 1000000));
        cli.set_read_timeout(static_cast<time_t>(us / 1000000), static_cast<time_t>(us % 1000000));
        cli.set_write_timeout(static_cast<time_t>(us / 1000000), static_cast<time_t>(us % 1000000));
        if (!config_.user.empty() || !config_.password.empty()) cli.set_basic_auth(config_.user, config_.password);
        return cli;
    }

    static httplib::Headers headers() { return {{"Accept", "application/json"}, {"access-mode", "READ"}}; }

    std::pair<std::string, std::string> post(const std::string& path, const json& body,
                                             const std::vector<protocol::Statement>& statements) {
        auto cli = client();
        if (!cli.is_valid()) throw Error(ErrorCode::Network, "invalid endpoint " + config_.url);
        auto res = cli.Post(path, headers(), body.dump(), "application/json");
        if (!res) {
            const auto err = res.error();
            if (err == httplib::Error::Read) {
                std::string what = "no answer from " + config_.url + " within " + std::to_string(config_.timeout.count()) + " ms";
                for (const auto& s : statements) what += "; statement: " + s.text;
                throw Error(ErrorCode::Timeout, what);
            }
            throw Error(ErrorCode::Network, "cannot reach " + config_.url + path + ": " + httplib::to_string(err));
        }
        if (res->status == 401 || res->status == 403)
            throw Error(ErrorCode::Authentication, "authentication rejected by " + config_.url + " (HTTP " + std::to_string(res->status) + ")");
        if (res->status == 404 || res->status == 405)
            throw Error(ErrorCode::Capability, "no transactional endpoint at " + config_.url + path);
        if (res->status >= 500 && res->body.find("\"errors\"") == std::string::npos)
            throw Error(ErrorCode::RemoteQuery, "server error HTTP " + std::to_string(res->status));
        return {res->body, res->get_header_value("Location")};
    }

    void rollback(const std::string& path) noexcept {
        try {
            auto cli = client();
            cli.Delete(path, headers());
        } catch (...) {
        }
    }

    static std::size_t single_count(const protocol::StatementResult& r) {
        if (r.rows.size() != 1 || !r.rows[0].is_array() || r.rows[0].empty() || !r.rows[0][0].is_number_integer() ||
            r.rows[0][0].get<long long>() < 0)
            throw Error(ErrorCode::Capability, "count statement returned an unexpected shape");
        return r.rows[0][0].get<std::size_t>();
    }

    static std::vector<std::string> string_column(const protocol::StatementResult& r) {
        std::vector<std::string> out;
        for (const auto& row : r.rows)
            if (row.is_array() && !row.empty() && row[0].is_string()) out.push_back(row[0].get<std::string>());
        return out;
    }

    static void add_property(Metadata& m, OwnerKind owner, const json& name, const json& types) {
        if (!name.is_string() || !types.is_array()) return;
        auto& slot = m.properties[{owner, name.get<std::string>()}];
        for (const auto& t : types) {
            if (!t.is_string()) continue;
            try {
                slot.insert(value_type_from_string(t.get<std::string>()));
            } catch (const Error&) {
                // Array and temporal types lie outside the scalar model.
            }
        }
    }

    static PropertyGraph schema_from_visualization(const protocol::StatementResult& r, const std::map<std::string, std::size_t>& counts) {
        PropertyGraph schema;
        std::map<std::string, LabelSet> by_remote_id;
        for (const auto& g : r.graphs) {
            for (const auto& n : g.value("nodes", json::array())) {
                LabelSet ls;
                for (const auto& l : n.value("labels", json::array()))
                    if (l.is_string()) ls.insert(l.get<std::string>());
                by_remote_id[protocol::id_text(n.at("id"))] = ls;
                const NodeId id{schema_node_id(ls)};
                if (schema.find_node(id)) continue;
                PropertyMap props;
                if (ls.size() == 1)
                    if (auto c = counts.find(*ls.begin()); c != counts.end()) props["count"] = static_cast<std::int64_t>(c->second);
                schema.add_node(NodeRecord{id, ls, std::move(props)});
            }
            for (const auto& e : g.value("relationships", json::array())) {
                const auto s = by_remote_id.find(protocol::id_text(e.at("startNode")));
                const auto t = by_remote_id.find(protocol::id_text(e.at("endNode")));
                if (s == by_remote_id.end() || t == by_remote_id.end()) continue;
                const std::string type = e.value("type", std::string{});
                const RelId id{schema_relationship_id(s->second, type, t->second)};
                if (type.empty() || schema.find_relationship(id)) continue;
                schema.add_relationship(RelRecord{id, type, NodeId{schema_node_id(s->second)}, NodeId{schema_node_id(t->second)}, {}});
            }
        }
        return schema;
    }

    static json values_of(const std::map<std::string, json>& ids) {
        json out = json::array();
        for (const auto& [k, v] : ids) out.push_back(v);
        return out;
    }

    static NodeRecord node_from_row(const json& row) {
        if (!row.is_array() || row.size() != 3) throw Error(ErrorCode::Capability, "malformed node row");
        NodeRecord n;
        n.id = NodeId{protocol::id_text(row[0])};
        for (const auto& l : row[1]) n.labels.insert(l.get<std::string>());
        n.properties = properties_from_json(row[2], "node " + n.id.value);
        return n;
    }

    static RelRecord rel_from_row(const json& row) {
        if (!row.is_array() || row.size() != 5 || !row[1].is_string()) throw Error(ErrorCode::Capability, "malformed relationship row");
        RelRecord r;
        r.id = RelId{protocol::id_text(row[0])};
        r.type = row[1].get<std::string>();
        r.source = NodeId{protocol::id_text(row[2])};
        r.target = NodeId{protocol::id_text(row[3])};
        r.properties = properties_from_json(row[4], "relationship " + r.id.value);
        return r;
    }

    RemoteConfig config_;
    mutable std::mutex state_mutex_;
    std::mutex metadata_mutex_;
    std::vector<std::string> log_;
    std::optional<bool> exclusive_labels_;
};

} // namespace gqw
