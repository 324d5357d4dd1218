#include "cutkit/server.hpp"

#include <condition_variable>
#include <deque>
#include <thread>

#include <httplib.h>

#include "cutkit/error.hpp"

namespace cutkit {

json trajectory_to_json(const std::vector<ToolCallRecord>& records) {
    json out = json::array();
    for (const auto& r : records)
        out.push_back(
            {{"index", r.index}, {"tool", r.tool}, {"args", r.args}, {"status", r.status}});
    return out;
}

std::vector<ToolCallRecord> trajectory_from_json(const json& doc) {
    if (!doc.is_array()) throw Error("malformed-trajectory", "trajectory must be a JSON array");
    std::vector<ToolCallRecord> out;
    for (const auto& jr : doc) {
        if (!jr.is_object() || !jr.contains("tool"))
            throw Error("malformed-trajectory", "trajectory records need a tool name");
        ToolCallRecord r;
        r.index = jr.value("index", out.size());
        r.tool = jr.at("tool").get<std::string>();
        r.args = jr.value("args", json::object());
        r.status = jr.value("status", "ok");
        out.push_back(std::move(r));
    }
    return out;
}

ToolServer::ToolServer(ToolkitConfig config) : toolkit_(std::move(config)) {
    sessions_["main"] = Session{"main", {}, {}, 0};
}

Session& ToolServer::require_session(const std::string& id) {
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error("unknown-session", "no session " + id);
    return it->second;
}

const Session& ToolServer::require_session(const std::string& id) const {
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error("unknown-session", "no session " + id);
    return it->second;
}

std::string ToolServer::create_session(const std::set<std::string>& whitelist) {
    std::lock_guard<std::mutex> lock(exec_mutex_);
    const std::string id = "session_" + std::to_string(++next_session_);
    sessions_[id] = Session{id, whitelist, {}, 0};
    return id;
}

const Session& ToolServer::session(const std::string& session_id) const {
    std::lock_guard<std::mutex> lock(exec_mutex_);
    return require_session(session_id);
}

json ToolServer::list_tools(const std::string& session_id) const {
    std::lock_guard<std::mutex> lock(exec_mutex_);
    const Session& s = require_session(session_id);
    json tools = json::array();
    for (const auto& schema : toolkit_.schemas())
        if (s.whitelist.empty() || s.whitelist.count(schema.name))
            tools.push_back(schema.to_json());
    return {{"tools", tools}};
}

json ToolServer::call_tool(const std::string& name, const json& args,
                           const std::string& session_id) {
    std::lock_guard<std::mutex> lock(exec_mutex_);
    Session& s = require_session(session_id);

    json envelope;
    if (!s.whitelist.empty() && !s.whitelist.count(name)) {
        envelope = {{"status", "error"},
                    {"data", {{"code", "whitelist-violation"}}},
                    {"message", "tool " + name + " is outside this session's whitelist"}};
        s.rejected_calls++;
    } else {
        envelope = toolkit_.call(name, args);
    }
    s.trajectory.push_back(
        {s.trajectory.size(), name, args, envelope.at("status").get<std::string>()});
    return envelope;
}

json ToolServer::export_trajectory(const std::string& session_id) const {
    std::lock_guard<std::mutex> lock(exec_mutex_);
    return trajectory_to_json(require_session(session_id).trajectory);
}

json ToolServer::peek_state() const {
    std::lock_guard<std::mutex> lock(exec_mutex_);
    return serialize_state(toolkit_.sequence());
}

json ToolServer::handle_request(const RpcRequest& req, const std::string& session_id) {
    if (req.method == "tools/list") return make_rpc_result(req.id, list_tools(session_id));
    if (req.method == "tools/call") {
        if (!req.params.is_object() || !req.params.contains("name") ||
            !req.params.at("name").is_string())
            return make_rpc_error(req.id, kRpcInvalidParams, "tools/call needs a tool name");
        const json args = req.params.value("arguments", json::object());
        const json envelope = call_tool(req.params.at("name").get<std::string>(), args, session_id);
        return make_rpc_result(req.id, envelope);
    }
    if (req.method == "prompts/project_context") {
        json fragments = json::array();
        for (const auto& f : toolkit_.config().project_prompt_fragments) fragments.push_back(f);
        return make_rpc_result(req.id, {{"fragments", fragments}});
    }
    return make_rpc_error(req.id, kRpcMethodNotFound, "method not found: " + req.method);
}

std::string ToolServer::handle_frame(const std::string& line, const std::string& session_id) {
    const RpcParseOutcome parsed = parse_rpc_frame(line);
    if (parsed.error_response) return parsed.error_response->dump();
    if (parsed.request->is_notification) {
        handle_request(*parsed.request, session_id);
        return "";
    }
    return handle_request(*parsed.request, session_id).dump();
}

void serve_stdio(ToolServer& server, std::istream& in, std::ostream& out) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::string reply = server.handle_frame(line);
        if (!reply.empty()) out << reply << "\n" << std::flush;
    }
}

struct HttpSseServer::Impl {
    ToolServer& server;
    httplib::Server http;
    std::thread worker;

    std::mutex events_mutex;
    std::condition_variable events_cv;
    // Every SSE subscriber gets the full broadcast backlog from its connect
    // point; the deque keeps all messages for the lifetime of the process.
    std::deque<std::string> events;
    std::atomic<bool> stopping{false};

    explicit Impl(ToolServer& s) : server(s) {}

    void broadcast(const std::string& message) {
        {
            std::lock_guard<std::mutex> lock(events_mutex);
            events.push_back(message);
        }
        events_cv.notify_all();
    }
};

HttpSseServer::HttpSseServer(ToolServer& server) : impl_(std::make_unique<Impl>(server)) {
    impl_->http.Post("/rpc", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string reply = impl_->server.handle_frame(req.body);
        if (!reply.empty()) impl_->broadcast(reply);
        res.set_content(reply, "application/json");
    });

    impl_->http.Get("/events", [this](const httplib::Request&, httplib::Response& res) {
        const size_t start_at = [&] {
            std::lock_guard<std::mutex> lock(impl_->events_mutex);
            return impl_->events.size();
        }();
        res.set_chunked_content_provider(
            "text/event-stream",
            [this, cursor = start_at](size_t, httplib::DataSink& sink) mutable {
                std::unique_lock<std::mutex> lock(impl_->events_mutex);
                impl_->events_cv.wait_for(lock, std::chrono::milliseconds(100), [&] {
                    return impl_->stopping.load() || cursor < impl_->events.size();
                });
                if (impl_->stopping.load()) return false;
                while (cursor < impl_->events.size()) {
                    const std::string frame = "data: " + impl_->events[cursor++] + "\n\n";
                    lock.unlock();
                    if (!sink.write(frame.data(), frame.size())) return false;
                    lock.lock();
                }
                return true;
            });
    });
}

HttpSseServer::~HttpSseServer() { stop(); }

int HttpSseServer::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->http.bind_to_any_port(host);
        if (bound <= 0) throw Error("bind-failure", "cannot bind " + host);
    } else {
        if (!impl_->http.bind_to_port(host, port))
            throw Error("bind-failure", "cannot bind " + host + ":" + std::to_string(port));
    }
    impl_->worker = std::thread([this] { impl_->http.listen_after_bind(); });
    impl_->http.wait_until_ready();
    return bound;
}

void HttpSseServer::stop() {
    if (!impl_) return;
    impl_->stopping = true;
    impl_->events_cv.notify_all();
    impl_->http.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

} // namespace cutkit
