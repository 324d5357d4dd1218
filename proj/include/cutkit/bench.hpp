#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cutkit/server.hpp"
#include "cutkit/toolkit.hpp"

namespace cutkit {

struct EssentialOp {
    std::string tool;
    json match_args = json::object(); // subset match against call args
    int multiplicity = 1;
};

struct DagEdge {
    std::string from_tool;
    std::string to_tool;
    std::string kind;         // precedence | instance
    std::string bind_on;      // to-side argument name (instance edges)
    std::string from_bind_on; // from-side argument name; defaults to bind_on
};

struct ScenarioBundle {
    std::string id;
    std::string tier; // S1..S5, derived from the id prefix
    std::string storyboard_text;
    std::vector<EssentialOp> essential_ops;
    std::vector<DagEdge> dag;
    json gt_snapshot;
    std::vector<ToolCallRecord> gt_trajectory;
    std::map<std::string, std::vector<std::string>> expected_tracks;
    std::set<std::string> allowed_tools; // empty = every registered tool
};

// Reads storyboard.md, essential_ops.json, dag.json, gt_trajectory.json,
// gt_snapshot.json, expected_tracks.json from <scenario_dir>/<id>/.
// Throws "unknown-scenario" when the directory is missing.
ScenarioBundle load_scenario(const std::string& scenario_dir, const std::string& id);

struct L1Report {
    double tsa = 1.0, pv = 1.0, cc = 1.0, ce = 1.0, dc = 1.0;
    json violations = json::object();
    json to_json() const;
};

// Trajectory metrics. The toolkit must be freshly constructed with the same
// workbook the trajectory ran against; the replay mutates it.
L1Report eval_l1(const std::vector<ToolCallRecord>& trajectory, const ScenarioBundle& bundle,
                 Toolkit& fresh_toolkit);

struct L2Report {
    double tc = 1.0, camc = 1.0, tempc = 1.0;
    json violations = json::object();
    size_t temporal_checks = 0;
    json to_json() const;
};

// Structural metrics over a sequence snapshot document.
L2Report eval_l2(const json& sequence_doc, const ScenarioBundle& bundle, double epsilon,
                 double delta);

// Equal (tool, canonicalized args) calls count as redundant beyond the first;
// integral floats normalize to integers before comparison.
json canonicalize_args(const json& args);

// -- Layer 3 ------------------------------------------------------------
struct L3Report {
    int sf = 0, chc = 0, cq = 0, tmpcoh = 0;
    int total = 0;
    std::map<std::string, std::string> reasoning;
    json to_json() const;
};

// Judge prompt: four 0-25 rubric dimensions, evaluation steps, and the exact
// output schema; the storyboard is embedded and environment fidelity is
// explicitly out of scope for the judge.
std::string build_l3_prompt(const std::string& storyboard_text);

// Locates the first balanced JSON object in possibly prose-wrapped output.
// Throws "unparseable" / "missing-dimension" / "out-of-range".
L3Report parse_l3_response(const std::string& raw);

// Chat-completions request for the judge, temperature pinned to 0.
json build_judge_request(const std::string& prompt, const std::string& model);
// Extracts the assistant text from a chat-completions response body.
std::string extract_judge_text(const json& response_body);

// -- aggregation ---------------------------------------------------------
struct ScenarioScores {
    std::string model;
    std::string scenario_id;
    std::string tier;
    std::map<std::string, double> metrics;
};

// Means per metric overall and per tier, plus S5 - S1 deltas when both tiers
// are present.
json aggregate_reports(const std::vector<ScenarioScores>& scores);
std::string summary_csv(const json& aggregate);      // model,tier,metric,value
std::string summary_markdown(const json& aggregate); // one table per model

} // namespace cutkit
