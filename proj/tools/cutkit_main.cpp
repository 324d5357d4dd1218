#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>

#include "cutkit/bench.hpp"
#include "cutkit/error.hpp"
#include "cutkit/harness.hpp"
#include "cutkit/server.hpp"

namespace fs = std::filesystem;
using namespace cutkit;

namespace {

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io-failure", "cannot write " + path.string());
    out << text;
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("io-failure", "cannot read " + path.string());
    return json::parse(in);
}

struct SplitUrl {
    std::string host;
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

int cmd_serve(const std::string& workbook, const std::string& transport,
              const std::string& listen, const std::vector<std::string>& fragments,
              int frame_rate) {
    ToolkitConfig config;
    config.workbook_dir = workbook;
    config.project_prompt_fragments = fragments;
    config.frame_rate = frame_rate;
    ToolServer server(config);
    if (transport == "stdio") {
        serve_stdio(server, std::cin, std::cout);
        return 0;
    }
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) {
        std::cerr << "--listen expects host:port\n";
        return 1;
    }
    const std::string host = listen.substr(0, colon);
    const int port = std::stoi(listen.substr(colon + 1));
    HttpSseServer http(server);
    const int bound = http.start(host, port);
    std::cerr << "listening on " << host << ":" << bound << " (POST /rpc, SSE /events)\n";
    while (true) std::this_thread::sleep_for(std::chrono::seconds(3600));
}

int cmd_replay(const std::string& scenario_dir, const std::string& scenario_id,
               const std::string& workbook, const std::string& script_path,
               const std::string& out_dir, const std::string& remote, int frame_rate,
               size_t keep_recent, size_t token_budget) {
    const ScenarioBundle bundle = load_scenario(scenario_dir, scenario_id);
    const json script_doc = script_path.empty()
                                ? trajectory_to_json(bundle.gt_trajectory)
                                : read_json(script_path);

    if (!remote.empty()) {
        const SplitUrl url = split_url(remote);
        httplib::Client client(url.host);
        json trajectory = json::array();
        size_t index = 0;
        for (const auto& step : script_doc) {
            if (step.contains("final")) break;
            const json rpc{{"jsonrpc", "2.0"},
                           {"id", index},
                           {"method", "tools/call"},
                           {"params",
                            {{"name", step.at("tool")}, {"arguments", step.value("args", json::object())}}}};
            auto res = client.Post("/rpc", rpc.dump(), "application/json");
            if (!res || res->status != 200) throw Error("transport-failure", "POST /rpc failed");
            const json reply = json::parse(res->body);
            trajectory.push_back({{"index", index},
                                  {"tool", step.at("tool")},
                                  {"args", step.value("args", json::object())},
                                  {"status", reply.at("result").at("status")}});
            ++index;
        }
        const json state_rpc{{"jsonrpc", "2.0"},
                             {"id", "state"},
                             {"method", "tools/call"},
                             {"params", {{"name", "get_sequence_content"},
                                         {"arguments", json::object()}}}};
        auto res = client.Post("/rpc", state_rpc.dump(), "application/json");
        if (!res || res->status != 200) throw Error("transport-failure", "state fetch failed");
        const json state = json::parse(res->body).at("result").at("data");
        write_file(fs::path(out_dir) / "trajectory.json", trajectory.dump(2) + "\n");
        write_file(fs::path(out_dir) / "snapshot.json", canonical_dump(state) + "\n");
        return 0;
    }

    ToolkitConfig config;
    config.workbook_dir = workbook;
    config.frame_rate = frame_rate;
    ToolServer server(config);
    AgentHarness::Config harness_config;
    harness_config.keep_recent_n = keep_recent;
    harness_config.token_budget = token_budget;
    AgentHarness harness(server, harness_config);
    ScriptedBackend backend = ScriptedBackend::from_json(script_doc);
    harness.run_director(bundle.storyboard_text, backend);

    write_file(fs::path(out_dir) / "trajectory.json",
               server.export_trajectory().dump(2) + "\n");
    write_file(fs::path(out_dir) / "snapshot.json", snapshot_text(server.toolkit().sequence()));
    return 0;
}

int cmd_evaluate(const std::string& scenario_dir, const std::string& scenario_id,
                 const std::string& workbook, const std::string& trajectory_path,
                 const std::string& snapshot_path, const std::string& out_dir, double epsilon,
                 double delta, const std::string& model, const std::string& l3_response_path,
                 const std::vector<std::string>& gates) {
    const ScenarioBundle bundle = load_scenario(scenario_dir, scenario_id);
    const auto trajectory = trajectory_from_json(read_json(trajectory_path));

    ToolkitConfig config;
    config.workbook_dir = workbook;
    Toolkit toolkit(config);
    if (epsilon <= 0.0) epsilon = 1.0 / toolkit.sequence().frame_rate();

    std::map<std::string, double> metrics;
    const L1Report l1 = eval_l1(trajectory, bundle, toolkit);
    json l1_doc = l1.to_json();
    l1_doc["model"] = model;
    l1_doc["scenario_id"] = scenario_id;
    l1_doc["tier"] = bundle.tier;
    write_file(fs::path(out_dir) / "l1_report.json", l1_doc.dump(2) + "\n");
    metrics = {{"tsa", l1.tsa}, {"pv", l1.pv}, {"cc", l1.cc}, {"ce", l1.ce}, {"dc", l1.dc}};

    if (!snapshot_path.empty()) {
        const L2Report l2 = eval_l2(read_json(snapshot_path), bundle, epsilon, delta);
        json l2_doc = l2.to_json();
        l2_doc["model"] = model;
        l2_doc["scenario_id"] = scenario_id;
        l2_doc["tier"] = bundle.tier;
        write_file(fs::path(out_dir) / "l2_report.json", l2_doc.dump(2) + "\n");
        metrics["tc"] = l2.tc;
        metrics["camc"] = l2.camc;
        metrics["tempc"] = l2.tempc;
    } else {
        std::cerr << "no snapshot supplied; structural layer skipped\n";
    }

    if (!l3_response_path.empty()) {
        std::ifstream in(l3_response_path);
        std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        const L3Report l3 = parse_l3_response(raw);
        json l3_doc = l3.to_json();
        l3_doc["model"] = model;
        l3_doc["scenario_id"] = scenario_id;
        l3_doc["tier"] = bundle.tier;
        write_file(fs::path(out_dir) / "l3_report.json", l3_doc.dump(2) + "\n");
        metrics["l3_total"] = l3.total;
    }

    bool gate_failed = false;
    for (const auto& gate : gates) {
        const auto eq = gate.find('=');
        if (eq == std::string::npos) {
            std::cerr << "--gate expects metric=threshold\n";
            return 1;
        }
        const std::string name = gate.substr(0, eq);
        const double threshold = std::stod(gate.substr(eq + 1));
        const auto it = metrics.find(name);
        if (it == metrics.end()) {
            std::cerr << "unknown gate metric: " << name << "\n";
            return 1;
        }
        if (it->second < threshold) {
            std::cerr << "gate failed: " << name << " = " << it->second << " < " << threshold
                      << "\n";
            gate_failed = true;
        }
    }
    return gate_failed ? 2 : 0;
}

int cmd_report(const std::string& reports_dir, const std::string& out_dir) {
    if (!fs::is_directory(reports_dir)) {
        std::cerr << "reports dir not found: " << reports_dir << "\n";
        return 1;
    }
    std::map<std::pair<std::string, std::string>, ScenarioScores> merged;
    size_t files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(reports_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name != "l1_report.json" && name != "l2_report.json" && name != "l3_report.json")
            continue;
        ++files;
        const json doc = read_json(entry.path());
        const std::string model = doc.value("model", "unknown");
        const std::string scenario = doc.value("scenario_id", "unknown");
        auto& scores = merged[{model, scenario}];
        scores.model = model;
        scores.scenario_id = scenario;
        scores.tier = doc.value("tier", "unknown");
        for (const char* m : {"tsa", "pv", "cc", "ce", "dc", "tc", "camc", "tempc"})
            if (doc.contains(m)) scores.metrics[m] = doc.at(m).get<double>();
        if (name == "l3_report.json" && doc.contains("total"))
            scores.metrics["l3_total"] = doc.at("total").get<double>();
    }
    if (files == 0) {
        std::cerr << "no report files under " << reports_dir << "\n";
        return 1;
    }
    std::vector<ScenarioScores> scores;
    for (auto& [_, s] : merged) scores.push_back(std::move(s));
    const json aggregate = aggregate_reports(scores);
    write_file(fs::path(out_dir) / "summary.json", aggregate.dump(2) + "\n");
    write_file(fs::path(out_dir) / "summary.csv", summary_csv(aggregate));
    write_file(fs::path(out_dir) / "summary.md", summary_markdown(aggregate));
    std::cout << summary_markdown(aggregate);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"headless cutscene authoring server, replay harness, and benchmark evaluator"};
    app.require_subcommand(1);

    std::string workbook = "assets/workbook";
    std::string scenario_dir = "scenarios";
    std::string scenario_id;
    std::string transport = "stdio";
    std::string listen = "127.0.0.1:8731";
    std::string out_dir = "out";
    std::string script_path;
    std::string remote;
    std::string trajectory_path;
    std::string snapshot_path;
    std::string model = "unknown";
    std::string l3_response_path;
    std::string reports_dir;
    double epsilon = 0.0; // 0 = 1/frame_rate
    double delta = 0.1;
    int frame_rate = 30;
    size_t keep_recent = 5;
    size_t token_budget = 1000000;
    std::vector<std::string> gates;
    std::vector<std::string> fragments;

    auto* serve = app.add_subcommand("serve", "run the tool server until terminated");
    serve->add_option("--workbook", workbook, "static asset workbook directory");
    serve->add_option("--transport", transport)->check(CLI::IsMember({"stdio", "http"}));
    serve->add_option("--listen", listen, "host:port for the http transport");
    serve->add_option("--prompt-fragment", fragments, "project prompt fragment (repeatable)");
    serve->add_option("--frame-rate", frame_rate)->check(CLI::PositiveNumber);

    auto* replay = app.add_subcommand("replay", "replay a script through the in-process harness");
    replay->add_option("--scenario-dir", scenario_dir);
    replay->add_option("--scenario", scenario_id)->required();
    replay->add_option("--workbook", workbook);
    replay->add_option("--script", script_path, "script file; defaults to the scenario GT");
    replay->add_option("--out", out_dir);
    replay->add_option("--remote", remote, "drive a remote server at this base url instead");
    replay->add_option("--frame-rate", frame_rate)->check(CLI::PositiveNumber);
    replay->add_option("--keep-recent", keep_recent, "history entries kept in full detail");
    replay->add_option("--token-budget", token_budget)->check(CLI::PositiveNumber);

    auto* evaluate = app.add_subcommand("evaluate", "score a trajectory and snapshot");
    evaluate->add_option("--scenario-dir", scenario_dir);
    evaluate->add_option("--scenario", scenario_id)->required();
    evaluate->add_option("--workbook", workbook);
    evaluate->add_option("--trajectory", trajectory_path)->required();
    evaluate->add_option("--snapshot", snapshot_path);
    evaluate->add_option("--out", out_dir);
    evaluate->add_option("--epsilon", epsilon, "overlap tolerance; default 1/frame_rate")
        ->check(CLI::NonNegativeNumber);
    evaluate->add_option("--delta", delta, "audio-facial alignment tolerance")
        ->check(CLI::PositiveNumber);
    evaluate->add_option("--model", model, "model label for reports");
    evaluate->add_option("--l3-response", l3_response_path, "judge response to parse");
    evaluate->add_option("--gate", gates, "metric=threshold; exit 2 when any gated metric is below");

    auto* report = app.add_subcommand("report", "aggregate report files into summary tables");
    report->add_option("--reports-dir", reports_dir)->required();
    report->add_option("--out", out_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (serve->parsed()) return cmd_serve(workbook, transport, listen, fragments, frame_rate);
        if (replay->parsed())
            return cmd_replay(scenario_dir, scenario_id, workbook, script_path, out_dir, remote,
                              frame_rate, keep_recent, token_budget);
        if (evaluate->parsed())
            return cmd_evaluate(scenario_dir, scenario_id, workbook, trajectory_path,
                                snapshot_path, out_dir, epsilon, delta, model, l3_response_path,
                                gates);
        if (report->parsed()) return cmd_report(reports_dir, out_dir);
    } catch (const Error& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
