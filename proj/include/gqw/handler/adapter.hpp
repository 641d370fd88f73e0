#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <variant>

#include "gqw/cypher/executor.hpp"
#include "gqw/cypher/translate.hpp"
#include "gqw/error.hpp"
#include "gqw/graph/interchange.hpp"
#include "gqw/graph/property_graph.hpp"
#include "gqw/handler/metadata.hpp"
#include "gqw/handler/remote.hpp"
#include "gqw/handler/result_set.hpp"

namespace gqw {

/// In-process store: queries run through the translator and the embedded Cypher executor.
class EmbeddedAdapter {
public:
    explicit EmbeddedAdapter(std::shared_ptr<const PropertyGraph> store) : store_(std::move(store)) {
        if (!store_) throw Error(ErrorCode::Validation, "embedded adapter needs a store");
    }
    explicit EmbeddedAdapter(PropertyGraph store) : EmbeddedAdapter(std::make_shared<const PropertyGraph>(std::move(store))) {}

    const PropertyGraph& store() const noexcept { return *store_; }

    void verify() const noexcept {}

    Metadata fetch_metadata() const { return metadata_from_counts(*store_); }

    bool exclusive_labels() const {
        for (const auto& [labels, n] : store_->counts().label_set_table())
            if (labels.size() > 1) return false;
        return true;
    }

    Execution execute(const QueryGraph& q) const {
        TranslateOptions opts;
        opts.exclusive_labels = exclusive_labels();
        Execution ex{translate(q, opts), {}};
        const auto statement = cypher::parse(ex.cypher.text);
        const auto rows = cypher::execute(statement, *store_);

        RawResult raw;
        std::map<std::string, std::string> element_of;
        for (const auto& [element, var] : ex.cypher.var_map) element_of[var] = element;
        for (const auto& item : statement.returns)
            raw.columns.push_back(ResultColumn{item.alias, element_of.at(item.var), statement.variables.at(item.var)});
        raw.records.reserve(rows.rows.size());
        for (const auto& row : rows.rows) {
            std::vector<Element> rec;
            rec.reserve(row.size());
            for (const auto& ref : row) {
                if (ref.kind == ElementKind::Node) rec.emplace_back(*store_->find_node(NodeId{ref.id}));
                else rec.emplace_back(*store_->find_relationship(RelId{ref.id}));
            }
            raw.records.push_back(std::move(rec));
        }
        ex.result = dedupe(raw);
        return ex;
    }

    PropertyGraph export_graph() const { return *store_; }

private:
    std::shared_ptr<const PropertyGraph> store_;
};

/// Uniform handle over both store kinds.
class StoreAdapter {
public:
    explicit StoreAdapter(EmbeddedAdapter a) : impl_(std::move(a)) {}
    explicit StoreAdapter(std::shared_ptr<RemoteAdapter> a) : impl_(std::move(a)) {
        if (!std::get<1>(impl_)) throw Error(ErrorCode::Validation, "remote adapter is null");
    }

    bool is_remote() const noexcept { return impl_.index() == 1; }
    std::string kind() const { return is_remote() ? "remote" : "embedded"; }

    EmbeddedAdapter* embedded() noexcept { return std::get_if<EmbeddedAdapter>(&impl_); }
    RemoteAdapter* remote() noexcept { return is_remote() ? std::get<1>(impl_).get() : nullptr; }

    void verify() {
        std::visit([](auto& a) { deref(a).verify(); }, impl_);
    }
    Metadata fetch_metadata() {
        return std::visit([](auto& a) { return deref(a).fetch_metadata(); }, impl_);
    }
    Execution execute(const QueryGraph& q) {
        return std::visit([&](auto& a) { return deref(a).execute(q); }, impl_);
    }
    PropertyGraph export_graph() {
        return std::visit([](auto& a) { return deref(a).export_graph(); }, impl_);
    }

private:
    static EmbeddedAdapter& deref(EmbeddedAdapter& a) { return a; }
    static RemoteAdapter& deref(std::shared_ptr<RemoteAdapter>& a) { return *a; }

    std::variant<EmbeddedAdapter, std::shared_ptr<RemoteAdapter>> impl_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Adapter spec document:
//   { "kind": "embedded", "graph": <graph document> }      or  { "kind": "embedded", "path": "g.json" }
//   { "kind": "remote", "url": "http://host:7474", "database": "neo4j",
//     "timeout_ms": 30000, "page_size": 1000, "user": "...", "password": "..." }
// Remote credentials missing from the document are taken from GQW_REMOTE_USER and
// GQW_REMOTE_PASSWORD.
inline StoreAdapter connect(const json& spec) {
    if (!spec.is_object()) throw Error(ErrorCode::Validation, "adapter spec must be an object");
    const std::string kind = spec.value("kind", std::string{"embedded"});
    try {
        if (kind == "embedded") {
            if (spec.contains("graph")) return StoreAdapter(EmbeddedAdapter(graph_from_json(spec.at("graph"))));
            if (spec.contains("path")) return StoreAdapter(EmbeddedAdapter(load_graph(read_file(spec.at("path").get<std::string>()))));
            throw Error(ErrorCode::Validation, "embedded spec needs \"graph\" or \"path\"");
        }
        if (kind == "remote") {
            RemoteConfig c;
            c.url = spec.at("url").get<std::string>();
            c.database = spec.value("database", c.database);
            c.timeout = std::chrono::milliseconds(spec.value("timeout_ms", static_cast<long long>(c.timeout.count())));
            c.page_size = spec.value("page_size", c.page_size);
            c.user = spec.value("user", std::string{});
            c.password = spec.value("password", std::string{});
            credentials_from_environment(c);
            auto remote = std::make_shared<RemoteAdapter>(std::move(c));
            remote->verify();
            return StoreAdapter(std::move(remote));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Validation, std::string("adapter spec: ") + e.what());
    }
    throw Error(ErrorCode::Validation, "unknown adapter kind '" + kind + "'");
}

inline StoreAdapter connect(PropertyGraph store) { return StoreAdapter(EmbeddedAdapter(std::move(store))); }

} // namespace gqw
