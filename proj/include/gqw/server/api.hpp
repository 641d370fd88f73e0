#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <regex>
#include <string>
#include <thread>

#include "gqw/cypher/apply_pattern.hpp"
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

// HTTP endpoints (JSON bodies; errors are {"error": {"code": "...", "message": "..."}}):
//
//   POST /sessions                        {"adapter": <adapter spec>, "session_id"?: id}
//   GET  /sessions/{id}/metadata
//   POST /sessions/{id}/patterns          {"k", "alpha", "tau_max", "target_part_size", "seed"}
//   GET  /sessions/{id}/patterns          job state, and the pattern set once done
//   POST /sessions/{id}/translate         {"query": <query document>}
//   POST /sessions/{id}/apply-pattern     {"pattern": index | "graph": <query document>,
//                                          "attachment"?: id, "anchor"?: id, "query"?: <query document>}
//   POST /sessions/{id}/execute           {"query"?: <query document>, "layout"?: <layout parameters>}
//   GET  /sessions/{id}/result
//   GET  /health

namespace gqw {

struct ServerConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::chrono::seconds session_ttl{1800};
    std::chrono::milliseconds remote_timeout{30000};
    LayoutParams layout;
};

// Config document: {"listen": {"host": "127.0.0.1", "port": 8080}, "session_ttl_s": 1800,
//                   "remote_timeout_ms": 30000, "layout": <layout parameters>}
inline ServerConfig server_config_from_json(const json& j) {
    ServerConfig c;
    if (!j.is_object()) throw Error(ErrorCode::Validation, "server config must be an object");
    try {
        if (j.contains("listen")) {
            c.host = j["listen"].value("host", c.host);
            c.port = j["listen"].value("port", c.port);
        }
        c.session_ttl = std::chrono::seconds(j.value("session_ttl_s", static_cast<long long>(c.session_ttl.count())));
        c.remote_timeout = std::chrono::milliseconds(j.value("remote_timeout_ms", static_cast<long long>(c.remote_timeout.count())));
        if (j.contains("layout")) c.layout = layout_params_from_json(j["layout"]);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Validation, std::string("server config: ") + e.what());
    }
    if (c.port < 0 || c.port > 65535) throw Error(ErrorCode::Validation, "port out of range");
    if (c.session_ttl.count() <= 0) throw Error(ErrorCode::Validation, "session_ttl_s must be positive");
    return c;
}

inline int http_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::Authentication: return 401;
    case ErrorCode::ReadOnlyViolation: return 403;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::JobInProgress: return 409;
    case ErrorCode::Network:
    case ErrorCode::RemoteQuery:
    case ErrorCode::Capability:
    case ErrorCode::ExportFailure: return 502;
    case ErrorCode::Timeout: return 504;
    default: return 400;
    }
}

inline json error_body(ErrorCode code, const std::string& message) {
    return {{"error", {{"code", std::string(to_string(code))}, {"message", message}}}};
}

struct ApiResponse {
    int status = 200;
    json body;
};

enum class JobState { Idle, Running, Done, Failed };

constexpr std::string_view to_string(JobState s) noexcept {
    switch (s) {
    case JobState::Idle: return "idle";
    case JobState::Running: return "running";
    case JobState::Done: return "done";
    case JobState::Failed: return "failed";
    }
    return "idle";
}

struct Session {
    std::string id;
    std::uint64_t generation = 0;
    std::shared_ptr<StoreAdapter> adapter;
    Metadata metadata;
    std::optional<PatternSet> patterns;
    QueryGraph query;
    std::optional<ResultSet> result;
    std::optional<LayoutResult> layout;
    std::optional<std::string> cypher;

    JobState job = JobState::Idle;
    std::optional<json> job_error;
    bool executing = false;
    std::chrono::steady_clock::time_point last_access;
    std::mutex mutex;
};

/// Transport-independent request handling; ApiServer binds it to HTTP.
class ApiService {
public:
    using Clock = std::function<std::chrono::steady_clock::time_point()>;

    explicit ApiService(ServerConfig config = {}, Clock clock = [] { return std::chrono::steady_clock::now(); })
        : config_(std::move(config)), clock_(std::move(clock)), rng_(std::random_device{}()) {}

    ~ApiService() {
        std::unique_lock lock(jobs_mutex_);
        jobs_done_.wait(lock, [&] { return jobs_ == 0; });
    }

    ApiService(const ApiService&) = delete;
    ApiService& operator=(const ApiService&) = delete;

    const ServerConfig& config() const noexcept { return config_; }

    ApiResponse handle(const std::string& method, const std::string& path, const std::string& body) {
        try {
            evict_expired();
            return route(method, path, body);
        } catch (const Error& e) {
            return {http_status(e.code()), error_body(e.code(), e.what())};
        } catch (const json::exception& e) {
            return {400, error_body(ErrorCode::Validation, e.what())};
        }
    }

    std::size_t session_count() const {
        std::lock_guard lock(sessions_mutex_);
        return sessions_.size();
    }

    /// Blocks until no mining job is running.
    void wait_for_jobs() {
        std::unique_lock lock(jobs_mutex_);
        jobs_done_.wait(lock, [&] { return jobs_ == 0; });
    }

private:
    ApiResponse route(const std::string& method, const std::string& path, const std::string& body) {
        static const std::regex session_path(R"(/sessions/([A-Za-z0-9_-]+)/([a-z-]+))");
        if (path == "/health" && method == "GET") return {200, {{"status", "ok"}}};
        if (path == "/sessions") {
            if (method != "POST") throw Error(ErrorCode::NotFound, method + " " + path + " is not an endpoint");
            return connect_session(parse_body(body));
        }
        std::smatch m;
        if (!std::regex_match(path, m, session_path)) throw Error(ErrorCode::NotFound, method + " " + path + " is not an endpoint");
        auto session = find_session(m[1]);
        const std::string action = m[2];
        if (method == "GET" && action == "metadata") return metadata(*session);
        if (method == "POST" && action == "patterns") return start_mining(session, parse_body(body));
        if (method == "GET" && action == "patterns") return pattern_status(*session);
        if (method == "POST" && action == "translate") return translate_query(*session, parse_body(body));
        if (method == "POST" && action == "apply-pattern") return apply(*session, parse_body(body));
        if (method == "POST" && action == "execute") return execute(*session, parse_body(body));
        if (method == "GET" && action == "result") return last_result(*session);
        throw Error(ErrorCode::NotFound, method + " " + path + " is not an endpoint");
    }

    static json parse_body(const std::string& body) {
        if (body.empty()) return json::object();
        json j = parse_json_document(body);
        if (!j.is_object()) throw Error(ErrorCode::Validation, "request body must be a JSON object");
        return j;
    }

    std::shared_ptr<StoreAdapter> open_adapter(json spec) {
        if (spec.value("kind", std::string{}) == "remote" && !spec.contains("timeout_ms"))
            spec["timeout_ms"] = config_.remote_timeout.count();
        return std::make_shared<StoreAdapter>(connect(spec));
    }

    ApiResponse connect_session(const json& req) {
        if (!req.contains("adapter")) throw Error(ErrorCode::Validation, "request needs an \"adapter\" spec");
        auto adapter = open_adapter(req.at("adapter"));
        Metadata md = adapter->fetch_metadata();

        if (req.contains("session_id")) {
            auto s = find_session(req.at("session_id").get<std::string>());
            std::lock_guard lock(s->mutex);
            s->adapter = std::move(adapter);
            s->metadata = std::move(md);
            ++s->generation;
            s->patterns.reset();
            s->query = {};
            s->result.reset();
            s->layout.reset();
            s->cypher.reset();
            s->job_error.reset();
            if (s->job != JobState::Running) s->job = JobState::Idle;
            return {200, session_summary(*s)};
        }

        auto s = std::make_shared<Session>();
        s->adapter = std::move(adapter);
        s->metadata = std::move(md);
        s->last_access = clock_();
        std::lock_guard lock(sessions_mutex_);
        do {
            s->id = fresh_id();
        } while (sessions_.contains(s->id));
        sessions_[s->id] = s;
        return {201, session_summary(*s)};
    }

    static json session_summary(const Session& s) {
        return {{"session_id", s.id},
                {"generation", s.generation},
                {"adapter", s.adapter->kind()},
                {"metadata", metadata_to_json(s.metadata)}};
    }

    ApiResponse metadata(Session& s) {
        std::lock_guard lock(s.mutex);
        return {200, metadata_to_json(s.metadata)};
    }

    ApiResponse start_mining(const std::shared_ptr<Session>& s, const json& req) {
        const MinerParams params = miner_params_from_json(req);
        std::size_t part_size = kDefaultPartSize;
        if (req.contains("target_part_size")) {
            const auto& v = req.at("target_part_size");
            if (!v.is_number_integer() || v.get<long long>() < 2) throw Error(ErrorCode::Validation, "target_part_size must be an integer of at least 2");
            part_size = v.get<std::size_t>();
        }
        const std::uint64_t seed = req.value("seed", std::uint64_t{0});

        std::shared_ptr<StoreAdapter> adapter;
        std::uint64_t generation = 0;
        {
            std::lock_guard lock(s->mutex);
            if (s->job == JobState::Running) throw Error(ErrorCode::JobInProgress, "a pattern job is already running for this session");
            s->job = JobState::Running;
            s->job_error.reset();
            adapter = s->adapter;
            generation = s->generation;
        }
        {
            std::lock_guard lock(jobs_mutex_);
            ++jobs_;
        }
        std::thread([this, s, adapter, generation, params, part_size, seed] {
            std::optional<PatternSet> mined;
            std::optional<json> failure;
            try {
                const PropertyGraph store = adapter->export_graph();
                const PartitionSet d = partition(store, part_size, seed);
                if (d.parts.empty()) throw Error(ErrorCode::Validation, "store is empty; nothing to mine");
                mined = mine(d, params);
            } catch (const Error& e) {
                failure = error_body(e.code(), e.what())["error"];
            } catch (const std::exception& e) {
                failure = error_body(ErrorCode::Validation, e.what())["error"];
            }
            {
                std::lock_guard lock(s->mutex);
                if (s->generation == generation) {
                    s->patterns = std::move(mined);
                    s->job_error = std::move(failure);
                    s->job = s->job_error ? JobState::Failed : JobState::Done;
                } else {
                    s->job = JobState::Idle;
                }
            }
            std::lock_guard lock(jobs_mutex_);
            --jobs_;
            jobs_done_.notify_all();
        }).detach();
        return {202, {{"job", {{"state", "running"}}}}};
    }

    ApiResponse pattern_status(Session& s) {
        std::lock_guard lock(s.mutex);
        json out{{"job", {{"state", std::string(to_string(s.job))}}}};
        if (s.job_error) out["job"]["error"] = *s.job_error;
        if (s.patterns) out["patterns"] = pattern_set_to_json(*s.patterns);
        return {200, out};
    }

    static json cypher_json(const CypherText& c) {
        return {{"cypher", c.text}, {"var_map", json(c.var_map)}, {"inequalities", c.inequalities.size()}};
    }

    TranslateOptions translate_options(const Session& s) const {
        TranslateOptions o;
        o.exclusive_labels = s.metadata.exclusive_labels();
        return o;
    }

    ApiResponse translate_query(Session& s, const json& req) {
        const QueryGraph q = query_from_json(req.contains("query") ? req.at("query") : req);
        auto text = translate(q, translate_options(s));
        std::lock_guard lock(s.mutex);
        s.query = q;
        return {200, cypher_json(text)};
    }

    ApiResponse apply(Session& s, const json& req) {
        std::lock_guard lock(s.mutex);
        QueryGraph base = req.contains("query") ? query_from_json(req.at("query")) : s.query;
        QueryGraph pattern;
        std::string attachment = req.value("attachment", std::string(Pattern::attachment));
        if (req.contains("pattern")) {
            if (!s.patterns) throw Error(ErrorCode::NotFound, "no mined patterns in this session");
            const auto idx = req.at("pattern").get<std::size_t>();
            if (idx >= s.patterns->members.size()) throw Error(ErrorCode::NotFound, "pattern index out of range");
            pattern = s.patterns->members[idx].shape.to_query();
        } else if (req.contains("graph")) {
            pattern = query_from_json(req.at("graph"));
        } else {
            throw Error(ErrorCode::Validation, "request needs \"pattern\" or \"graph\"");
        }
        std::optional<std::string> anchor;
        if (req.contains("anchor") && !req.at("anchor").is_null()) anchor = req.at("anchor").get<std::string>();
        QueryGraph merged = apply_pattern(base, pattern, attachment, anchor);
        s.query = merged;
        json out{{"query", query_to_json(merged)}};
        out.update(cypher_json(translate(merged, translate_options(s))));
        return {200, out};
    }

    ApiResponse execute(Session& s, const json& req) {
        QueryGraph q;
        std::shared_ptr<StoreAdapter> adapter;
        std::uint64_t generation = 0;
        LayoutParams lp = config_.layout;
        if (req.contains("layout")) lp = layout_params_from_json(req.at("layout"));
        {
            std::lock_guard lock(s.mutex);
            if (req.contains("query")) s.query = query_from_json(req.at("query"));
            if (s.query.empty()) throw Error(ErrorCode::EmptyQuery, "session has no query to execute");
            if (s.executing) throw Error(ErrorCode::JobInProgress, "an execution is already running for this session");
            s.executing = true;
            q = s.query;
            adapter = s.adapter;
            generation = s.generation;
        }
        try {
            Execution ex = adapter->execute(q);
            LayoutResult lr = layout(ex.result.result_graph(), lp);
            std::lock_guard lock(s.mutex);
            s.executing = false;
            if (s.generation != generation) throw Error(ErrorCode::NotFound, "session was reconnected during execution");
            s.cypher = ex.cypher.text;
            s.result = std::move(ex.result);
            s.layout = std::move(lr);
            return {200, result_body(s)};
        } catch (...) {
            std::lock_guard lock(s.mutex);
            s.executing = false;
            throw;
        }
    }

    static json result_body(const Session& s) {
        return {{"cypher", *s.cypher}, {"result", result_to_json(*s.result)}, {"layout", layout_to_json(*s.layout)}};
    }

    ApiResponse last_result(Session& s) {
        std::lock_guard lock(s.mutex);
        if (!s.result) throw Error(ErrorCode::NotFound, "no result for this session");
        return {200, result_body(s)};
    }

    std::shared_ptr<Session> find_session(const std::string& id) {
        std::lock_guard lock(sessions_mutex_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "unknown session '" + id + "'");
        it->second->last_access = clock_();
        return it->second;
    }

    void evict_expired() {
        const auto now = clock_();
        std::lock_guard lock(sessions_mutex_);
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            bool busy = false;
            {
                std::lock_guard slock(it->second->mutex);
                busy = it->second->job == JobState::Running || it->second->executing;
            }
            if (!busy && now - it->second->last_access > config_.session_ttl) it = sessions_.erase(it);
            else ++it;
        }
    }

    std::string fresh_id() {
        static constexpr char hex[] = "0123456789abcdef";
        std::string id;
        for (int i = 0; i < 16; ++i) id += hex[rng_() % 16];
        return id;
    }

    ServerConfig config_;
    Clock clock_;
    std::mt19937_64 rng_;
    mutable std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;

    std::mutex jobs_mutex_;
    std::condition_variable jobs_done_;
    std::size_t jobs_ = 0;
};

} // namespace gqw
