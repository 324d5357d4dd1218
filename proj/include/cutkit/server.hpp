#pragma once

#include <atomic>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "cutkit/rpc.hpp"
#include "cutkit/toolkit.hpp"

namespace cutkit {

struct ToolCallRecord {
    size_t index = 0;
    std::string tool;
    json args;
    std::string status; // "ok" | "error"
};

json trajectory_to_json(const std::vector<ToolCallRecord>& records);
std::vector<ToolCallRecord> trajectory_from_json(const json& doc); // throws malformed-trajectory

// A session scopes one trajectory and an optional tool whitelist (empty set =
// no restriction). Subagents run in filtered sub-sessions of the same server.
struct Session {
    std::string id;
    std::set<std::string> whitelist;
    std::vector<ToolCallRecord> trajectory;
    size_t rejected_calls = 0;
};

// Dispatches tools/list, tools/call and prompts/project_context over a single
// toolkit. Execution is strictly serialized: transports may accept requests
// concurrently, but tool effects and trajectory indices follow one total
// order.
class ToolServer {
public:
    explicit ToolServer(ToolkitConfig config);

    // One JSON-RPC frame in, one response message out (empty for notifications).
    std::string handle_frame(const std::string& line, const std::string& session_id = "main");
    json handle_request(const RpcRequest& req, const std::string& session_id = "main");

    // In-process surface used by the harness; same serialization and recording
    // path as the wire transports.
    json call_tool(const std::string& name, const json& args,
                   const std::string& session_id = "main");
    json list_tools(const std::string& session_id = "main") const;

    std::string create_session(const std::set<std::string>& whitelist);
    const Session& session(const std::string& session_id) const;
    json export_trajectory(const std::string& session_id = "main") const;

    // Read-only snapshot for automatic state injection; takes the execution
    // lock but records nothing.
    json peek_state() const;

    Toolkit& toolkit() { return toolkit_; }
    const Toolkit& toolkit() const { return toolkit_; }

private:
    Session& require_session(const std::string& id);
    const Session& require_session(const std::string& id) const;

    Toolkit toolkit_;
    mutable std::mutex exec_mutex_;
    std::map<std::string, Session> sessions_;
    size_t next_session_ = 0;
};

// Newline-delimited JSON-RPC over a stream pair; runs until EOF.
void serve_stdio(ToolServer& server, std::istream& in, std::ostream& out);

// POST /rpc accepts a JSON-RPC request and answers in the response body; the
// same message is also broadcast on the GET /events SSE stream.
class HttpSseServer {
public:
    explicit HttpSseServer(ToolServer& server);
    ~HttpSseServer();

    // Binds 127.0.0.1 on the given port (0 = ephemeral); returns the bound port.
    int start(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace cutkit
