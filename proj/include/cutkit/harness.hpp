#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "cutkit/prompt.hpp"
#include "cutkit/server.hpp"

namespace cutkit {

struct ToolIntent {
    std::string tool;
    json args = json::object();
};

struct BackendAction {
    bool is_final = false;
    std::string final_text;
    std::vector<ToolIntent> calls;
};

// A model backend maps (system prompt, conversation, tool schemas) to either
// tool-call intents or a final message. The scripted backend makes every test
// LLM-free and byte-reproducible.
class ModelBackend {
public:
    virtual ~ModelBackend() = default;
    virtual BackendAction next(const std::string& system_prompt, const Conversation& conversation,
                               const json& tool_schemas) = 0;
};

// Emits scripted intents verbatim, one per turn; finalizes when exhausted.
class ScriptedBackend : public ModelBackend {
public:
    explicit ScriptedBackend(std::vector<BackendAction> script) : script_(script.begin(), script.end()) {}

    // Accepts both script files ([{tool, args} | {final}]) and recorded
    // trajectories ([{index, tool, args, status}]).
    static ScriptedBackend from_json(const json& doc);

    BackendAction next(const std::string&, const Conversation&, const json&) override;

private:
    std::deque<BackendAction> script_;
};

// Chat-completions style HTTP backend for live runs; the network path is
// never exercised by the test suite.
class HttpChatBackend : public ModelBackend {
public:
    HttpChatBackend(std::string endpoint, std::string model, std::string api_key);

    // Reads CUTKIT_LLM_ENDPOINT, CUTKIT_LLM_MODEL, CUTKIT_LLM_API_KEY.
    // Throws Error("backend-unconfigured") when the endpoint or model is unset.
    static HttpChatBackend from_env();

    BackendAction next(const std::string& system_prompt, const Conversation& conversation,
                       const json& tool_schemas) override;

    const std::string& endpoint() const { return endpoint_; }
    const std::string& model() const { return model_; }

private:
    std::string endpoint_;
    std::string model_;
    std::string api_key_;
};

struct SubAgentTemplate {
    std::string name;
    std::string system_prompt;
    std::vector<std::string> tool_whitelist;
    size_t max_turns = 10;
};

// Preset specialists: Scene Specialist (20 turns), Animation Specialist (30),
// Cinematographer (25), Sound Designer (30), Photographer (10).
const std::vector<SubAgentTemplate>& preset_subagent_templates();

struct SubAgentResult {
    std::string status; // ok | turn-cap-exceeded | error
    std::string template_name;
    size_t tool_calls_count = 0;
    json tool_calls = json::array();
    std::string result_summary;
    size_t turns_used = 0;

    json to_json() const;
};

class AgentHarness {
public:
    struct Config {
        size_t max_turns = 200;
        size_t keep_recent_n = 5;
        size_t token_budget = 1000000;
        // builds the backend driving a delegated subagent; required only when
        // the director actually calls run_subagent
        std::function<std::unique_ptr<ModelBackend>(const std::string& template_name)>
            subagent_backend_factory;
    };

    struct Outcome {
        std::string final_text;
        size_t turns_used = 0;
        bool turn_cap_exceeded = false;
    };

    AgentHarness(ToolServer& server, Config config);

    // Director loop: inject state -> reason -> execute -> compress -> check.
    Outcome run_director(const std::string& script_text, ModelBackend& backend);

    // Runs one subagent in a fresh, state-seeded conversation against a
    // whitelist-filtered sub-session. template_name "custom" requires
    // non-empty custom_instructions and custom_tool_scope.
    SubAgentResult run_subagent(const std::string& template_name, const std::string& task,
                                ModelBackend& backend, const std::string& context = "",
                                const std::string& custom_instructions = "",
                                const std::vector<std::string>& custom_tool_scope = {});

    // conversations exactly as handed to the backend, one per turn
    const std::vector<Conversation>& backend_transcript() const { return transcript_; }

private:
    std::string fetch_state_text();
    std::vector<PromptElement> director_elements() const;

    ToolServer& server_;
    Config config_;
    std::vector<Conversation> transcript_;
};

} // namespace cutkit
