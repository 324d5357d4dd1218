#pragma once

#include <optional>
#include <string>

#include "cutkit/canonical_json.hpp"

namespace cutkit {

// JSON-RPC 2.0 error codes used by the wire layer.
constexpr int kRpcParseError = -32700;
constexpr int kRpcInvalidRequest = -32600;
constexpr int kRpcMethodNotFound = -32601;
constexpr int kRpcInvalidParams = -32602;

struct RpcRequest {
    json id; // null for notifications
    std::string method;
    json params = json::object();
    bool is_notification = false;
};

// Parses one frame. Returns a request, or an error-response JSON (already
// serializable) when the frame is malformed.
struct RpcParseOutcome {
    std::optional<RpcRequest> request;
    std::optional<json> error_response;
};

RpcParseOutcome parse_rpc_frame(const std::string& line);

json make_rpc_result(const json& id, json result);
json make_rpc_error(const json& id, int code, const std::string& message);

} // namespace cutkit
