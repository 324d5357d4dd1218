#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "cutkit/error.hpp"
#include "cutkit/server.hpp"
#include "test_support.hpp"

using namespace cutkit;

namespace {

ToolServer make_server() {
    ToolkitConfig config;
    config.workbook_dir = oracle::repo_root() + "/assets/workbook";
    config.project_prompt_fragments = {"Characters speak plainly.", "Keep scenes under a minute."};
    return ToolServer(config);
}

std::string rpc_line(int id, const std::string& method, const json& params) {
    return json{{"jsonrpc", "2.0"}, {"id", id}, {"method", method}, {"params", params}}.dump();
}

std::string call_line(int id, const std::string& tool, const json& args) {
    return rpc_line(id, "tools/call", {{"name", tool}, {"arguments", args}});
}

// request lines shared by the transport-transparency check
std::vector<std::string> conformance_script() {
    return {
        rpc_line(1, "tools/list", json::object()),
        call_line(2, "add_character",
                  {{"name", "MIRA"}, {"identifier", "char_001"},
                   {"location", json::array({-60, 0, 0})}}),
        call_line(3, "add_character",
                  {{"name", "REX"}, {"identifier", "char_002"},
                   {"location", json::array({60, 0, 0})}}),
        call_line(4, "add_character", {{"name", "MIRA"}, {"identifier", "char_001"}}),
        call_line(5, "get_sequence_content", json::object()),
        rpc_line(6, "prompts/project_context", json::object()),
    };
}

} // namespace

TEST_CASE("rpc frame parsing") {
    const auto ok = parse_rpc_frame(R"({"jsonrpc":"2.0","id":7,"method":"tools/list"})");
    REQUIRE(ok.request.has_value());
    CHECK(ok.request->method == "tools/list");
    CHECK(ok.request->id == 7);
    CHECK_FALSE(ok.request->is_notification);

    const auto note = parse_rpc_frame(R"({"jsonrpc":"2.0","method":"ping"})");
    REQUIRE(note.request.has_value());
    CHECK(note.request->is_notification);

    const auto bad = parse_rpc_frame("{not json");
    REQUIRE(bad.error_response.has_value());
    CHECK(bad.error_response->at("error").at("code") == kRpcParseError);

    const auto invalid = parse_rpc_frame(R"({"jsonrpc":"1.0","id":1,"method":"x"})");
    REQUIRE(invalid.error_response.has_value());
    CHECK(invalid.error_response->at("error").at("code") == kRpcInvalidRequest);
}

TEST_CASE("malformed frames and unknown methods map to the standard codes") {
    ToolServer server = make_server();
    const json parse_err = json::parse(server.handle_frame("garbage"));
    CHECK(parse_err.at("error").at("code") == -32700);
    CHECK(parse_err.at("id").is_null());

    const json not_found = json::parse(server.handle_frame(rpc_line(2, "resources/list", {})));
    CHECK(not_found.at("error").at("code") == -32601);
    CHECK(not_found.at("id") == 2);

    const json bad_params =
        json::parse(server.handle_frame(rpc_line(3, "tools/call", {{"arguments", 1}})));
    CHECK(bad_params.at("error").at("code") == -32602);
}

TEST_CASE("tools/list mirrors the toolkit registry in stable order") {
    ToolServer server = make_server();
    const json first = server.list_tools();
    const json second = server.list_tools();
    CHECK(first == second);
    REQUIRE(first.at("tools").size() == server.toolkit().schemas().size());
    std::vector<std::string> names;
    for (const auto& t : first.at("tools")) names.push_back(t.at("name").get<std::string>());
    CHECK(std::find(names.begin(), names.end(), "add_character") != names.end());
    CHECK(std::find(names.begin(), names.end(), "summon_character") == names.end());
    for (size_t i = 0; i < names.size(); ++i)
        CHECK(names[i] == server.toolkit().schemas()[i].name);
}

TEST_CASE("tools/call: envelopes, domain errors stay in-band, trajectory records") {
    ToolServer server = make_server();
    const json ok = json::parse(server.handle_frame(call_line(
        1, "add_character",
        {{"name", "MIRA"}, {"identifier", "char_001"}, {"location", json::array({-60, 0, 0})}})));
    CHECK(ok.at("result").at("status") == "ok");

    // unknown tool is a domain error in the envelope, not a transport error
    const json unknown = json::parse(server.handle_frame(call_line(2, "summon_character", {})));
    CHECK_FALSE(unknown.contains("error"));
    CHECK(unknown.at("result").at("status") == "error");
    CHECK(unknown.at("result").at("data").at("code") == "unknown-tool");

    // bidirectionality: the mutation is visible in the next read
    const json state = json::parse(
        server.handle_frame(call_line(3, "get_sequence_content", json::object())));
    CHECK(state.at("result").at("data").at("bindings").size() == 1);

    const json trajectory = server.export_trajectory();
    REQUIRE(trajectory.size() == 3);
    CHECK(trajectory[0].at("tool") == "add_character");
    CHECK(trajectory[0].at("status") == "ok");
    CHECK(trajectory[1].at("tool") == "summon_character"); // rejected calls recorded too
    CHECK(trajectory[1].at("status") == "error");
    for (size_t i = 0; i < trajectory.size(); ++i) CHECK(trajectory[i].at("index") == i);
}

TEST_CASE("empty session exports an empty trajectory that round-trips") {
    ToolServer server = make_server();
    const json empty = server.export_trajectory();
    CHECK(empty.is_array());
    CHECK(empty.empty());
    CHECK(trajectory_from_json(empty).empty());
    CHECK_THROWS_AS(trajectory_from_json(json{{"not", "array"}}), cutkit::Error);

    ToolServer busy = make_server();
    busy.call_tool("get_available_characters", json::object());
    const json t = busy.export_trajectory();
    const auto records = trajectory_from_json(t);
    CHECK(trajectory_to_json(records) == t);
}

TEST_CASE("prompts/project_context returns the configured fragments") {
    ToolServer server = make_server();
    const json reply = json::parse(
        server.handle_frame(rpc_line(9, "prompts/project_context", json::object())));
    REQUIRE(reply.at("result").at("fragments").size() == 2);
    CHECK(reply.at("result").at("fragments")[0] == "Characters speak plainly.");
}

TEST_CASE("stdio transport: newline-delimited frames over streams") {
    ToolServer server = make_server();
    std::istringstream in(rpc_line(1, "tools/list", json::object()) + "\n" + "bad json\n" +
                          call_line(2, "get_available_characters", json::object()) + "\n");
    std::ostringstream out;
    serve_stdio(server, in, out);

    std::vector<json> replies;
    std::istringstream reader(out.str());
    std::string line;
    while (std::getline(reader, line)) replies.push_back(json::parse(line));
    REQUIRE(replies.size() == 3);
    CHECK(replies[0].at("id") == 1);
    CHECK(replies[0].at("result").contains("tools"));
    CHECK(replies[1].at("error").at("code") == -32700);
    CHECK(replies[2].at("result").at("data").at("count") == 2);
}

TEST_CASE("notifications produce no reply") {
    ToolServer server = make_server();
    const std::string note =
        json{{"jsonrpc", "2.0"}, {"method", "tools/call"},
             {"params", {{"name", "get_available_tone"}, {"arguments", json::object()}}}}
            .dump();
    CHECK(server.handle_frame(note).empty());
    CHECK(server.export_trajectory().size() == 1); // still executed and recorded
}

TEST_CASE("transport transparency: stdio and http+sse produce identical envelopes") {
    const auto script = conformance_script();

    // stdio pass
    ToolServer stdio_server = make_server();
    std::string joined;
    for (const auto& line : script) joined += line + "\n";
    std::istringstream in(joined);
    std::ostringstream out;
    serve_stdio(stdio_server, in, out);
    std::vector<std::string> stdio_replies;
    {
        std::istringstream reader(out.str());
        std::string line;
        while (std::getline(reader, line)) stdio_replies.push_back(line);
    }
    REQUIRE(stdio_replies.size() == script.size());

    // http pass: responses from POST bodies, plus the same frames over SSE
    ToolServer http_server = make_server();
    HttpSseServer http(http_server);
    const int port = http.start("127.0.0.1", 0);

    std::vector<std::string> sse_frames;
    std::atomic<bool> sse_done{false};
    std::thread sse_reader([&] {
        httplib::Client client("127.0.0.1", port);
        client.set_read_timeout(10, 0);
        std::string buffer;
        client.Get("/events", [&](const char* data, size_t len) {
            buffer.append(data, len);
            size_t pos;
            while ((pos = buffer.find("\n\n")) != std::string::npos) {
                std::string frame = buffer.substr(0, pos);
                buffer.erase(0, pos + 2);
                if (frame.rfind("data: ", 0) == 0) sse_frames.push_back(frame.substr(6));
            }
            return sse_frames.size() < script.size();
        });
        sse_done = true;
    });

    // give the subscriber a moment to connect before producing events
    std::this_thread::sleep_for(std::chrono::milliseconds(100));

    std::vector<std::string> http_replies;
    {
        httplib::Client client("127.0.0.1", port);
        for (const auto& line : script) {
            auto res = client.Post("/rpc", line, "application/json");
            REQUIRE(res);
            REQUIRE(res->status == 200);
            http_replies.push_back(res->body);
        }
    }
    sse_reader.join();
    CHECK(sse_done);
    http.stop();

    REQUIRE(http_replies.size() == stdio_replies.size());
    for (size_t i = 0; i < script.size(); ++i) {
        CHECK(json::parse(http_replies[i]) == json::parse(stdio_replies[i]));
        CHECK(json::parse(sse_frames[i]) == json::parse(stdio_replies[i]));
    }

    // identical trajectories across transports
    CHECK(stdio_server.export_trajectory() == http_server.export_trajectory());
}

TEST_CASE("serialized execution under 16 concurrent submitters") {
    ToolServer server = make_server();
    HttpSseServer http(server);
    const int port = http.start("127.0.0.1", 0);

    constexpr int kThreads = 16;
    constexpr int kCallsEach = 8;
    std::vector<std::thread> workers;
    std::atomic<int> failures{0};
    for (int t = 0; t < kThreads; ++t) {
        workers.emplace_back([&, t] {
            httplib::Client client("127.0.0.1", port);
            for (int i = 0; i < kCallsEach; ++i) {
                const std::string line = call_line(t * 100 + i, "get_available_tone",
                                                   {{"character_name", std::to_string(t)}});
                auto res = client.Post("/rpc", line, "application/json");
                if (!res || res->status != 200) ++failures;
            }
        });
    }
    for (auto& w : workers) w.join();
    http.stop();

    CHECK(failures == 0);
    const json trajectory = server.export_trajectory();
    REQUIRE(trajectory.size() == kThreads * kCallsEach);
    for (size_t i = 0; i < trajectory.size(); ++i)
        CHECK(trajectory[i].at("index") == i); // strictly increasing, no gaps
}

TEST_CASE("filtered sessions expose and execute only whitelisted tools") {
    ToolServer server = make_server();
    const std::string session =
        server.create_session({"get_sequence_content", "get_available_tone"});

    const json tools = server.list_tools(session);
    CHECK(tools.at("tools").size() == 2);

    const json allowed = server.call_tool("get_available_tone", json::object(), session);
    CHECK(allowed.at("status") == "ok");

    const json before = server.peek_state();
    const json rejected = server.call_tool(
        "add_character", {{"name", "X"}, {"identifier", "char_001"}}, session);
    CHECK(rejected.at("status") == "error");
    CHECK(rejected.at("data").at("code") == "whitelist-violation");
    CHECK(server.peek_state() == before); // no side effect

    const json trajectory = server.export_trajectory(session);
    REQUIRE(trajectory.size() == 2); // rejected call counted
    CHECK(trajectory[1].at("status") == "error");
    CHECK(server.session(session).rejected_calls == 1);

    // main session unaffected
    CHECK(server.export_trajectory().empty());
}
