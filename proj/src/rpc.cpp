#include "cutkit/rpc.hpp"

namespace cutkit {

RpcParseOutcome parse_rpc_frame(const std::string& line) {
    RpcParseOutcome out;
    json msg = json::parse(line, nullptr, false);
    if (msg.is_discarded()) {
        out.error_response = make_rpc_error(nullptr, kRpcParseError, "parse error");
        return out;
    }
    if (!msg.is_object() || msg.value("jsonrpc", "") != "2.0" || !msg.contains("method") ||
        !msg.at("method").is_string()) {
        out.error_response =
            make_rpc_error(msg.is_object() ? msg.value("id", json(nullptr)) : json(nullptr),
                           kRpcInvalidRequest, "invalid request");
        return out;
    }
    RpcRequest req;
    req.method = msg.at("method").get<std::string>();
    req.is_notification = !msg.contains("id");
    req.id = msg.value("id", json(nullptr));
    if (msg.contains("params")) req.params = msg.at("params");
    out.request = std::move(req);
    return out;
}

json make_rpc_result(const json& id, json result) {
    return {{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}};
}

json make_rpc_error(const json& id, int code, const std::string& message) {
    return {{"jsonrpc", "2.0"}, {"id", id}, {"error", {{"code", code}, {"message", message}}}};
}

} // namespace cutkit
