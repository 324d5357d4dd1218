#include "cutkit/harness.hpp"

#include <algorithm>
#include <cstdlib>

#include <httplib.h>

#include "cutkit/error.hpp"

namespace cutkit {

ScriptedBackend ScriptedBackend::from_json(const json& doc) {
    if (!doc.is_array()) throw Error("malformed-script", "script must be a JSON array");
    std::vector<BackendAction> script;
    for (const auto& step : doc) {
        BackendAction action;
        if (step.contains("final")) {
            action.is_final = true;
            action.final_text = step.at("final").get<std::string>();
        } else if (step.contains("tool")) {
            action.calls.push_back(
                {step.at("tool").get<std::string>(), step.value("args", json::object())});
        } else {
            throw Error("malformed-script", "script steps carry either 'tool' or 'final'");
        }
        script.push_back(std::move(action));
    }
    return ScriptedBackend(std::move(script));
}

BackendAction ScriptedBackend::next(const std::string&, const Conversation&, const json&) {
    if (script_.empty()) {
        BackendAction done;
        done.is_final = true;
        done.final_text = "done";
        return done;
    }
    BackendAction action = std::move(script_.front());
    script_.pop_front();
    return action;
}

HttpChatBackend::HttpChatBackend(std::string endpoint, std::string model, std::string api_key)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), api_key_(std::move(api_key)) {}

HttpChatBackend HttpChatBackend::from_env() {
    const auto get = [](const char* name) {
        const char* v = std::getenv(name);
        return v ? std::string(v) : std::string();
    };
    const std::string endpoint = get("CUTKIT_LLM_ENDPOINT");
    const std::string model = get("CUTKIT_LLM_MODEL");
    if (endpoint.empty() || model.empty())
        throw Error("backend-unconfigured",
                    "set CUTKIT_LLM_ENDPOINT and CUTKIT_LLM_MODEL to use a live backend");
    return HttpChatBackend(endpoint, model, get("CUTKIT_LLM_API_KEY"));
}

BackendAction HttpChatBackend::next(const std::string& system_prompt,
                                    const Conversation& conversation, const json& tool_schemas) {
    json messages = json::array();
    messages.push_back({{"role", "system"}, {"content", system_prompt}});
    for (const auto& m : conversation)
        messages.push_back({{"role", m.role == "tool" ? "user" : m.role}, {"content", m.content}});

    json tools = json::array();
    for (const auto& t : tool_schemas.value("tools", json::array()))
        tools.push_back({{"type", "function"},
                         {"function",
                          {{"name", t.at("name")},
                           {"description", t.value("description", "")},
                           {"parameters", t.at("inputSchema")}}}});
    const json body{{"model", model_}, {"messages", messages}, {"tools", tools}};

    const auto scheme_end = endpoint_.find("://");
    const auto path_start = endpoint_.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    const std::string host =
        path_start == std::string::npos ? endpoint_ : endpoint_.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : endpoint_.substr(path_start);

    httplib::Client client(host);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res || res->status != 200)
        throw Error("backend-failure", "chat endpoint returned no usable response");

    const json reply = json::parse(res->body);
    const json& message = reply.at("choices").at(0).at("message");
    BackendAction action;
    if (message.contains("tool_calls") && message.at("tool_calls").is_array() &&
        !message.at("tool_calls").empty()) {
        for (const auto& tc : message.at("tool_calls")) {
            const json& fn = tc.at("function");
            action.calls.push_back({fn.at("name").get<std::string>(),
                                    json::parse(fn.value("arguments", std::string("{}")))});
        }
    } else {
        action.is_final = true;
        action.final_text = message.value("content", "");
    }
    return action;
}

const std::vector<SubAgentTemplate>& preset_subagent_templates() {
    static const std::vector<SubAgentTemplate> presets = {
        {"Scene Specialist",
         "You are a scene construction assistant. Add the requested characters to the sequence "
         "at sensible positions, keep spacing natural (about 70 cm side-by-side, 40 cm "
         "front-to-back), and orient them toward the scene center. Two-person default: A at "
         "(-60, 0, 0), B at (60, 0, 0). Three-person triangle: (-60, 0, 0), (30, -52, 0), "
         "(30, 52, 0).",
         {"add_character", "orient_character_to_center", "get_available_characters",
          "query_assets"},
         20},
        {"Animation Specialist",
         "You are an animation choreography assistant. Select body animations whose tags "
         "(timing, expressiveness, mood) match each beat, make durations cover the dialogue, "
         "and never overlap sections on the same character.",
         {"add_character_animation", "get_available_animations", "query_assets"}, 30},
        {"Cinematographer",
         "You are a cinematographer. Place cameras with the shot templates, alternate OTS "
         "coverage for dialogue, open scenes with an Establishing shot, and keep the camera cut "
         "track continuous.",
         {"add_camera", "set_active_camera", "apply_camera_template",
          "get_available_camera_templates"},
         25},
        {"Sound Designer",
         "You are a sound designer. For each dialogue line run the full pipeline in order: tts, "
         "then add_character_audio with end_time = start_time + duration, then "
         "audio_to_face_expression, then add_character_facial_animation at the same start. Pick "
         "one tone per character up front and keep it.",
         {"tts", "add_character_audio", "audio_to_face_expression",
          "add_character_facial_animation", "get_available_tone"},
         30},
        {"Photographer",
         "You are a virtual photographer. Inspect the composition, then adjust the viewport "
         "with small move_view steps until the framing is acceptable.",
         {"move_view", "undo_move_view", "take_editor_screenshot"}, 10},
    };
    return presets;
}

json SubAgentResult::to_json() const {
    return {{"status", status},
            {"template_name", template_name},
            {"tool_calls_count", tool_calls_count},
            {"tool_calls", tool_calls},
            {"result_summary", result_summary},
            {"turns_used", turns_used}};
}

AgentHarness::AgentHarness(ToolServer& server, Config config)
    : server_(server), config_(std::move(config)) {}

std::string AgentHarness::fetch_state_text() { return canonical_dump(server_.peek_state()); }

std::vector<PromptElement> AgentHarness::director_elements() const {
    std::vector<PromptElement> elements;
    elements.push_back({PromptKind::SystemInstruction, 1000,
                        "You are the director of an automated cutscene pipeline. Interpret the "
                        "storyboard, plan the shot structure, and build the sequence with the "
                        "available tools, delegating specialist work where useful.",
                        ""});
    elements.push_back({PromptKind::SystemInstruction, 900,
                        "Call tools sequentially and respect dependencies: query catalogs before "
                        "using assets, create bindings before referencing them, and chain "
                        "timestamps from returned values rather than estimates.",
                        ""});
    elements.push_back({PromptKind::ContextBlock, 800,
                        "Workflow: add characters, then generate audio and facial expressions, "
                        "then body animations, then cameras and templates. Consult the injected "
                        "state block for incremental work.",
                        "cutscene_creation"});
    elements.push_back({PromptKind::ContextBlock, 800,
                        "Two-person staging: A at (-60, 0, 0), B at (60, 0, 0). Three-person "
                        "triangle: (-60, 0, 0), (30, -52, 0), (30, 52, 0). Keep roughly 70 cm "
                        "side-by-side and 40 cm front-to-back; orient characters to the group "
                        "center.",
                        "actor_rules"});
    elements.push_back({PromptKind::ContextBlock, 800,
                        "Keep one voice tone per character for the whole scene; vary delivery "
                        "through the emotion parameter. Compute end_time = start_time + "
                        "audio duration.",
                        "audio_rules"});
    elements.push_back({PromptKind::ContextBlock, 800,
                        "Pick animations by tag: timing (Speak/Gap/Solo), expressiveness "
                        "(Light/Medium/Heavy), mood. Animation length must cover the dialogue; "
                        "never overlap sections on one character.",
                        "animation_rules"});
    elements.push_back({PromptKind::ContextBlock, 800,
                        "Position cameras with apply_camera_template; prefer OTS "
                        "shot-reverse-shot for dialogue, an Establishing opener, and Dolly or "
                        "Orbit movement for emphasis. Vary shot types across cuts.",
                        "camera_rules"});
    elements.push_back({PromptKind::ContextBlock, 800,
                        "Query before mutating: discover assets and templates first, then build. "
                        "Every create must precede its use.",
                        "tool_usage"});
    elements.push_back({PromptKind::TextElement, 750,
                        "Delegate with run_subagent(template_name, task); presets: Scene "
                        "Specialist, Animation Specialist, Cinematographer, Sound Designer, "
                        "Photographer; use template_name \"custom\" with custom_instructions and "
                        "custom_tool_scope for ad-hoc work. Subagents return a structured JSON "
                        "summary.",
                        ""});

    const auto reply = server_.handle_request(
        RpcRequest{json(1), "prompts/project_context", json::object(), false});
    for (const auto& fragment : reply.at("result").at("fragments"))
        elements.push_back(
            {PromptKind::ContextBlock, 700, fragment.get<std::string>(), "project_context"});
    return elements;
}

AgentHarness::Outcome AgentHarness::run_director(const std::string& script_text,
                                                 ModelBackend& backend) {
    const std::vector<PromptElement> elements = director_elements();
    std::vector<HistoryEntry> history;
    Outcome outcome;

    for (size_t turn = 1; turn <= config_.max_turns; ++turn) {
        Conversation conv;
        conv.push_back({"user", script_text, false});
        inject_state(conv, fetch_state_text());
        for (const auto& e : history) conv.push_back({"tool", e.render(), false});
        transcript_.push_back(conv);

        const std::string prompt = assemble_prompt(elements, config_.token_budget);
        BackendAction action;
        try {
            action = backend.next(prompt, conv, server_.list_tools());
        } catch (const std::exception& e) {
            outcome.final_text = std::string("backend failure: ") + e.what();
            outcome.turns_used = turn;
            return outcome;
        }
        if (action.is_final) {
            outcome.final_text = action.final_text;
            outcome.turns_used = turn;
            return outcome;
        }

        for (const auto& intent : action.calls) {
            HistoryEntry entry;
            entry.tool = intent.tool;
            entry.args = intent.args;
            if (intent.tool == "run_subagent") {
                entry.mutation_flag = true;
                if (!config_.subagent_backend_factory) {
                    entry.result = {{"status", "error"},
                                    {"message", "no subagent backend configured"}};
                } else {
                    std::vector<std::string> scope;
                    for (const auto& t : intent.args.value("custom_tool_scope", json::array()))
                        scope.push_back(t.get<std::string>());
                    const std::string template_name =
                        intent.args.value("template_name", std::string("custom"));
                    auto sub_backend = config_.subagent_backend_factory(template_name);
                    const SubAgentResult result = run_subagent(
                        template_name, intent.args.value("task", ""), *sub_backend,
                        intent.args.value("context", ""),
                        intent.args.value("custom_instructions", ""), scope);
                    entry.result = result.to_json();
                }
            } else {
                entry.mutation_flag = server_.toolkit().is_mutating(intent.tool);
                entry.result = server_.call_tool(intent.tool, intent.args);
            }
            history.push_back(std::move(entry));
        }
        history = compress_history(history, config_.keep_recent_n);
    }
    outcome.turn_cap_exceeded = true;
    outcome.turns_used = config_.max_turns;
    outcome.final_text = "turn cap exceeded";
    return outcome;
}

SubAgentResult AgentHarness::run_subagent(const std::string& template_name,
                                          const std::string& task, ModelBackend& backend,
                                          const std::string& context,
                                          const std::string& custom_instructions,
                                          const std::vector<std::string>& custom_tool_scope) {
    SubAgentTemplate tpl;
    if (template_name == "custom") {
        if (custom_instructions.empty() || custom_tool_scope.empty())
            throw Error("invalid-custom",
                        "custom subagents need custom_instructions and custom_tool_scope");
        tpl = {"custom", custom_instructions, custom_tool_scope, 20};
    } else {
        const auto& presets = preset_subagent_templates();
        const auto it = std::find_if(presets.begin(), presets.end(),
                                     [&](const SubAgentTemplate& t) { return t.name == template_name; });
        if (it == presets.end())
            throw Error("unknown-template", "no subagent template named " + template_name);
        tpl = *it;
    }
    for (const auto& tool : tpl.tool_whitelist)
        if (!server_.toolkit().has_tool(tool))
            throw Error("invalid-whitelist", "whitelisted tool is not registered: " + tool);

    const std::string session_id = server_.create_session(
        std::set<std::string>(tpl.tool_whitelist.begin(), tpl.tool_whitelist.end()));

    SubAgentResult result;
    result.template_name = tpl.name;
    result.status = "ok";

    // fully independent context window, seeded with the live sequence state
    Conversation conv;
    conv.push_back({"user", context.empty() ? task : task + "\n\nContext:\n" + context, false});
    inject_state(conv, fetch_state_text());
    std::vector<HistoryEntry> history;

    std::vector<PromptElement> elements{
        {PromptKind::SystemInstruction, 1000, tpl.system_prompt, ""}};

    size_t turn = 0;
    bool finalized = false;
    while (turn < tpl.max_turns) {
        ++turn;
        Conversation view = conv;
        inject_state(view, fetch_state_text());
        for (const auto& e : history) view.push_back({"tool", e.render(), false});

        BackendAction action;
        try {
            action = backend.next(assemble_prompt(elements, config_.token_budget), view,
                                  server_.list_tools(session_id));
        } catch (const std::exception& e) {
            result.status = "error";
            result.result_summary = std::string("backend failure: ") + e.what();
            finalized = true;
            break;
        }
        if (action.is_final) {
            result.result_summary = action.final_text;
            finalized = true;
            break;
        }
        for (const auto& intent : action.calls) {
            HistoryEntry entry;
            entry.tool = intent.tool;
            entry.args = intent.args;
            entry.mutation_flag = server_.toolkit().is_mutating(intent.tool);
            entry.result = server_.call_tool(intent.tool, intent.args, session_id);
            history.push_back(std::move(entry));
        }
        history = compress_history(history, config_.keep_recent_n);
    }
    if (!finalized) {
        result.status = "turn-cap-exceeded";
        result.result_summary = "stopped at the turn budget";
    }
    result.turns_used = turn;
    result.tool_calls = server_.export_trajectory(session_id);
    result.tool_calls_count = result.tool_calls.size();
    return result;
}

} // namespace cutkit
