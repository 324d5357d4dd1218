#include "cutkit/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cutkit/error.hpp"
#include "cutkit/sequence.hpp"

namespace cutkit {

namespace fs = std::filesystem;

namespace {

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("io-failure", "cannot read " + path.string());
    return json::parse(in);
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io-failure", "cannot read " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

} // namespace

ScenarioBundle load_scenario(const std::string& scenario_dir, const std::string& id) {
    const fs::path dir = fs::path(scenario_dir) / id;
    if (!fs::is_directory(dir))
        throw Error("unknown-scenario", "no scenario bundle at " + dir.string());

    ScenarioBundle bundle;
    bundle.id = id;
    const auto underscore = id.find('_');
    bundle.tier = underscore == std::string::npos ? id : id.substr(0, underscore);
    bundle.storyboard_text = read_text_file(dir / "storyboard.md");

    for (const auto& jop : read_json_file(dir / "essential_ops.json")) {
        EssentialOp op;
        op.tool = jop.at("tool").get<std::string>();
        op.match_args = jop.value("match_args", json::object());
        op.multiplicity = jop.value("multiplicity", 1);
        if (op.multiplicity < 1)
            throw Error("malformed-scenario", "essential op multiplicity must be >= 1");
        bundle.essential_ops.push_back(std::move(op));
    }

    for (const auto& je : read_json_file(dir / "dag.json")) {
        DagEdge e;
        e.from_tool = je.at("from_tool").get<std::string>();
        e.to_tool = je.at("to_tool").get<std::string>();
        e.kind = je.at("kind").get<std::string>();
        e.bind_on = je.value("bind_on", "");
        e.from_bind_on = je.value("from_bind_on", e.bind_on);
        if (e.kind != "precedence" && e.kind != "instance")
            throw Error("malformed-scenario", "edge kind must be precedence or instance");
        if (e.kind == "instance" && e.bind_on.empty())
            throw Error("malformed-scenario", "instance edges need bind_on");
        bundle.dag.push_back(std::move(e));
    }

    bundle.gt_snapshot = read_json_file(dir / "gt_snapshot.json");
    bundle.gt_trajectory = trajectory_from_json(read_json_file(dir / "gt_trajectory.json"));

    const json tracks = read_json_file(dir / "expected_tracks.json");
    for (auto it = tracks.begin(); it != tracks.end(); ++it) {
        std::vector<std::string> kinds;
        for (const auto& k : it.value()) kinds.push_back(k.get<std::string>());
        bundle.expected_tracks[it.key()] = std::move(kinds);
    }

    const fs::path allowed = dir / "allowed_tools.json";
    if (fs::exists(allowed))
        for (const auto& t : read_json_file(allowed))
            bundle.allowed_tools.insert(t.get<std::string>());
    return bundle;
}

json canonicalize_args(const json& args) {
    if (args.is_object()) {
        json out = json::object();
        for (auto it = args.begin(); it != args.end(); ++it)
            out[it.key()] = canonicalize_args(it.value());
        return out;
    }
    if (args.is_array()) {
        json out = json::array();
        for (const auto& v : args) out.push_back(canonicalize_args(v));
        return out;
    }
    if (args.is_number_float()) {
        const double v = args.get<double>();
        if (std::floor(v) == v && std::isfinite(v) && std::abs(v) < 9.0e15)
            return json(static_cast<int64_t>(v));
    }
    return args;
}

namespace {

bool values_equal(const json& a, const json& b) {
    return canonicalize_args(a) == canonicalize_args(b);
}

bool args_subset_match(const json& match_args, const json& call_args) {
    if (!call_args.is_object()) return match_args.empty();
    for (auto it = match_args.begin(); it != match_args.end(); ++it) {
        if (!call_args.contains(it.key())) return false;
        if (!values_equal(it.value(), call_args.at(it.key()))) return false;
    }
    return true;
}

} // namespace

json L1Report::to_json() const {
    return {{"tsa", tsa}, {"pv", pv},   {"cc", cc},
            {"ce", ce},   {"dc", dc},   {"violations", violations}};
}

L1Report eval_l1(const std::vector<ToolCallRecord>& trajectory, const ScenarioBundle& bundle,
                 Toolkit& fresh_toolkit) {
    L1Report report;
    const size_t total = trajectory.size();
    json v_tsa = json::array();
    json v_pv = json::array();
    json v_cc = json::array();
    json v_ce = json::array();
    json v_dc = json::array();

    // TSA: registered and scenario-allowed tool names. This is a proxy for the
    // per-call intent labels the benchmark annotation does not carry; the raw
    // unmatched-call list travels with the report for stricter scorers.
    size_t tsa_bad = 0;
    for (const auto& call : trajectory) {
        const bool registered = fresh_toolkit.has_tool(call.tool);
        const bool allowed = bundle.allowed_tools.empty() || bundle.allowed_tools.count(call.tool);
        if (!registered || !allowed) {
            ++tsa_bad;
            v_tsa.push_back({{"index", call.index},
                             {"tool", call.tool},
                             {"reason", registered ? "not-allowed" : "unregistered"}});
        }
    }
    report.tsa = total == 0 ? 1.0 : 1.0 - static_cast<double>(tsa_bad) / total;

    // PV: schema validation replayed against incrementally reconstructed
    // state, so referential checks see prior spawns.
    size_t pv_bad = 0;
    for (const auto& call : trajectory) {
        const json envelope = fresh_toolkit.call(call.tool, call.args);
        if (envelope.at("status").get<std::string>() != "ok") {
            ++pv_bad;
            v_pv.push_back({{"index", call.index},
                            {"tool", call.tool},
                            {"code", envelope.at("data").value("code", "")},
                            {"message", envelope.value("message", "")}});
        }
    }
    report.pv = total == 0 ? 1.0 : 1.0 - static_cast<double>(pv_bad) / total;

    // CC: greedy in-order subset-argument matching honoring multiplicity.
    size_t required_units = 0;
    size_t matched_units = 0;
    std::vector<bool> consumed(trajectory.size(), false);
    for (const auto& op : bundle.essential_ops) {
        required_units += static_cast<size_t>(op.multiplicity);
        int remaining = op.multiplicity;
        for (size_t i = 0; i < trajectory.size() && remaining > 0; ++i) {
            if (consumed[i] || trajectory[i].tool != op.tool) continue;
            if (!args_subset_match(op.match_args, trajectory[i].args)) continue;
            consumed[i] = true;
            --remaining;
            ++matched_units;
        }
        if (remaining > 0)
            v_cc.push_back(
                {{"tool", op.tool}, {"match_args", op.match_args}, {"missing", remaining}});
    }
    report.cc = required_units == 0
                    ? 1.0
                    : static_cast<double>(matched_units) / static_cast<double>(required_units);
    if (total == 0 && required_units > 0) report.cc = 0.0;

    // CE: exact canonicalized duplicates are redundant.
    size_t duplicates = 0;
    std::map<std::string, size_t> seen;
    for (const auto& call : trajectory) {
        const std::string key = call.tool + "\x1f" + canonicalize_args(call.args).dump();
        auto [it, inserted] = seen.emplace(key, call.index);
        if (!inserted) {
            ++duplicates;
            v_ce.push_back({{"index", call.index},
                            {"tool", call.tool},
                            {"duplicate_of", it->second}});
        }
    }
    report.ce = total == 0 ? 1.0 : 1.0 - static_cast<double>(duplicates) / total;

    // DC: one incremental pass. Precedence edges check once per applicable
    // edge (a from-call must precede the first to-call); instance edges check
    // every to-call carrying the bound argument against values seen so far.
    size_t applicable = 0;
    size_t violations = 0;
    std::map<std::string, size_t> first_call_of;
    std::map<std::string, std::set<std::string>> seen_values; // "tool\x1farg" -> canonical dumps
    for (size_t i = 0; i < trajectory.size(); ++i) {
        const auto& call = trajectory[i];
        for (const auto& edge : bundle.dag) {
            if (edge.kind != "instance" || call.tool != edge.to_tool || !call.args.is_object() ||
                !call.args.contains(edge.bind_on))
                continue;
            ++applicable;
            const json& bound = call.args.at(edge.bind_on);
            const auto& values = seen_values[edge.from_tool + "\x1f" + edge.from_bind_on];
            const auto satisfied = [&](const json& v) {
                return values.count(canonicalize_args(v).dump()) > 0;
            };
            bool ok = true;
            if (bound.is_array()) {
                for (const auto& item : bound)
                    if (!satisfied(item)) {
                        ok = false;
                        break;
                    }
            } else {
                ok = satisfied(bound);
            }
            if (!ok) {
                ++violations;
                v_dc.push_back({{"edge", edge.from_tool + " -> " + edge.to_tool},
                                {"kind", "instance"},
                                {"index", i},
                                {"value", bound}});
            }
        }
        first_call_of.emplace(call.tool, i);
        if (call.args.is_object())
            for (const auto& edge : bundle.dag)
                if (edge.kind == "instance" && edge.from_tool == call.tool &&
                    call.args.contains(edge.from_bind_on))
                    seen_values[edge.from_tool + "\x1f" + edge.from_bind_on].insert(
                        canonicalize_args(call.args.at(edge.from_bind_on)).dump());
    }
    for (const auto& edge : bundle.dag) {
        if (edge.kind != "precedence") continue;
        const auto to_it = first_call_of.find(edge.to_tool);
        if (to_it == first_call_of.end()) continue;
        ++applicable;
        const auto from_it = first_call_of.find(edge.from_tool);
        if (from_it == first_call_of.end() || from_it->second >= to_it->second) {
            ++violations;
            v_dc.push_back({{"edge", edge.from_tool + " -> " + edge.to_tool},
                            {"kind", "precedence"},
                            {"index", to_it->second}});
        }
    }
    report.dc =
        applicable == 0 ? 1.0 : 1.0 - static_cast<double>(violations) / static_cast<double>(applicable);

    report.violations = {{"tsa", v_tsa}, {"pv", v_pv}, {"cc_missing", v_cc},
                         {"ce_duplicates", v_ce}, {"dc", v_dc}};
    return report;
}

json L2Report::to_json() const {
    return {{"tc", tc},
            {"camc", camc},
            {"tempc", tempc},
            {"temporal_checks", temporal_checks},
            {"violations", violations}};
}

L2Report eval_l2(const json& sequence_doc, const ScenarioBundle& bundle, double epsilon,
                 double delta) {
    const LevelSequence seq = deserialize_state(sequence_doc);
    L2Report report;
    json v_tc = json::array();
    json v_temp = json::array();

    // TC over the GT-required (character, track) pairs
    size_t pairs = 0, present = 0;
    for (const auto& [character, kinds] : bundle.expected_tracks) {
        const Binding* b = seq.find_binding(character);
        for (const auto& kind_name : kinds) {
            ++pairs;
            bool ok = false;
            if (b && b->is_character()) {
                const auto it = b->tracks.find(track_kind_from_name(kind_name));
                ok = it != b->tracks.end() && !it->second.empty();
            }
            if (ok)
                ++present;
            else
                v_tc.push_back({{"character", character}, {"track", kind_name}});
        }
    }
    report.tc = pairs == 0 ? 1.0 : static_cast<double>(present) / static_cast<double>(pairs);

    // CamC: merged cut coverage of [0, D]
    const double duration = seq.effective_duration();
    if (duration <= 0.0) {
        report.camc = 1.0;
    } else {
        std::vector<TimeRange> cuts;
        for (const auto& c : seq.camera_cuts()) cuts.push_back(c.range);
        const auto [merged, covered] = merge_intervals(cuts, TimeRange(0.0, duration));
        report.camc = std::min(covered / duration, 1.0);
        json gaps = json::array();
        double cursor = 0.0;
        for (const auto& iv : merged) {
            if (iv.start > cursor) gaps.push_back({{"start", cursor}, {"end", iv.start}});
            cursor = std::max(cursor, iv.end);
        }
        if (cursor < duration) gaps.push_back({{"start", cursor}, {"end", duration}});
        report.violations["camera_gaps"] = gaps;
    }

    // TempC: consecutive-pair overlap checks on animation and audio tracks
    // plus one audio-facial alignment check per audio section
    size_t checks = 0, violations = 0;
    for (const auto& b : seq.bindings()) {
        if (!b.is_character()) continue;
        for (const TrackKind kind : {TrackKind::Animation, TrackKind::Audio}) {
            const auto it = b.tracks.find(kind);
            if (it == b.tracks.end()) continue;
            const auto& track = it->second;
            for (size_t i = 0; i + 1 < track.size(); ++i) {
                ++checks;
                if (track[i].range.end > track[i + 1].range.start + epsilon) {
                    ++violations;
                    v_temp.push_back({{"character", b.name},
                                      {"track", track_kind_name(kind)},
                                      {"kind", "overlap"},
                                      {"first_end", track[i].range.end},
                                      {"second_start", track[i + 1].range.start}});
                }
            }
        }
        const auto audio_it = b.tracks.find(TrackKind::Audio);
        if (audio_it == b.tracks.end()) continue;
        const auto facial_it = b.tracks.find(TrackKind::Facial);
        for (const auto& audio : audio_it->second) {
            ++checks;
            bool aligned = false;
            if (facial_it != b.tracks.end())
                for (const auto& facial : facial_it->second)
                    if (std::abs(facial.range.start - audio.range.start) <= delta &&
                        std::abs(facial.range.end - audio.range.end) <= delta) {
                        aligned = true;
                        break;
                    }
            if (!aligned) {
                ++violations;
                v_temp.push_back({{"character", b.name},
                                  {"kind", "audio-facial-misalignment"},
                                  {"audio_start", audio.range.start},
                                  {"audio_end", audio.range.end}});
            }
        }
    }
    report.temporal_checks = checks;
    report.tempc =
        checks == 0 ? 1.0 : 1.0 - static_cast<double>(violations) / static_cast<double>(checks);
    report.violations["tc"] = v_tc;
    report.violations["temporal"] = v_temp;
    return report;
}

json L3Report::to_json() const {
    json r = json::object();
    for (const auto& [k, v] : reasoning) r[k] = v;
    return {{"sf", sf},       {"chc", chc},   {"cq", cq},
            {"tmpcoh", tmpcoh}, {"total", total}, {"reasoning", r}};
}

std::string build_l3_prompt(const std::string& storyboard_text) {
    std::ostringstream p;
    p << "You will be given a rendered cutscene video from a video game, along with the "
         "original storyboard script that was used as input to an AI agent that generated this "
         "cutscene.\n\n";
    p << "Your task is to evaluate the quality of the generated cutscene across four "
         "independent dimensions, each scored from 0 to 25 (total 100 points).\n\n";
    p << "Disregard environmental fidelity (for example test-map geometry versus described "
         "locations); evaluate only agent-controlled elements: character performance, dialogue "
         "delivery, animation selection, and camera work.\n\n";
    p << "EVALUATION DIMENSIONS AND RUBRICS\n\n";
    p << "1. Script Fidelity (SF)\n"
         "Focus: whether dialogue content and character actions specified in the storyboard are "
         "accurately reproduced.\n"
         "  0-5:   No recognizable connection to the script; characters or dialogue entirely "
         "wrong.\n"
         "  6-10:  Major dialogue lines missing or assigned to wrong characters; key actions "
         "absent.\n"
         "  11-15: Most dialogue present but with notable omissions; some actions missing.\n"
         "  16-20: All dialogue present and correctly assigned; minor action inaccuracies.\n"
         "  21-25: Dialogue and actions faithfully and completely match the script.\n\n";
    p << "2. Character Consistency (ChC)\n"
         "Focus: whether characters maintain stable identities, spatial positions, and coherent "
         "behavior throughout.\n"
         "  0-5:   Characters constantly glitch, teleport, or are unrecognizable.\n"
         "  6-10:  Significant issues - characters swap positions, face wrong directions "
         "frequently.\n"
         "  11-15: Generally stable but with noticeable position jumps or animation stiffness.\n"
         "  16-20: Consistent presentation with only minor issues (slight clipping, brief "
         "stiffness).\n"
         "  21-25: Fully consistent; characters behave naturally throughout.\n\n";
    p << "3. Cinematographic Quality (CQ)\n"
         "Focus: whether camera shot types, framing, and cutting patterns serve the narrative "
         "effectively.\n"
         "  0-5:   Camera is broken, static, or completely fails to frame the action.\n"
         "  6-10:  Poor shot selection; characters frequently out of frame or awkwardly "
         "framed.\n"
         "  11-15: Adequate framing but shot types don't match the script; some jarring cuts.\n"
         "  16-20: Good shot selection matching the script; characters well-framed with minor "
         "issues.\n"
         "  21-25: Professional-quality cinematography; shots and cuts enhance the narrative.\n\n";
    p << "4. Temporal Coherence (TmpCoh)\n"
         "Focus: whether timing and synchronization create a natural viewing experience.\n"
         "  0-5:   Completely broken timing; audio and animation fully desynchronized.\n"
         "  6-10:  Significant issues - dialogue stutters/repeats, long dead air, animations "
         "freeze.\n"
         "  11-15: Noticeable timing problems but generally followable; some sync drift.\n"
         "  16-20: Smooth pacing with minor timing imperfections.\n"
         "  21-25: Seamless flow; all elements perfectly synchronized and naturally paced.\n\n";
    p << "EVALUATION STEPS\n"
         "For each dimension independently:\n"
         "  Step 1: Watch the video carefully, focusing ONLY on aspects relevant to that "
         "dimension.\n"
         "  Step 2: Compare observations against the storyboard and the rubric above.\n"
         "  Step 3: Write chain-of-thought reasoning (2-4 sentences).\n"
         "  Step 4: Assign an integer score from 0 to 25.\n\n";
    p << "OUTPUT FORMAT - Respond with ONLY a valid JSON object:\n\n";
    p << "{\"script_fidelity\": {\"reasoning\": \"...\", \"score\": 20},\n"
         " \"character_consistency\": {\"reasoning\": \"...\", \"score\": 22},\n"
         " \"cinematographic_quality\": {\"reasoning\": \"...\", \"score\": 18},\n"
         " \"temporal_coherence\": {\"reasoning\": \"...\", \"score\": 15}}\n\n";
    p << "STORYBOARD\n\n" << storyboard_text << "\n";
    return p.str();
}

namespace {

// First balanced top-level JSON object in the text, string-escape aware.
std::string extract_first_json_object(const std::string& raw) {
    for (size_t start = 0; start < raw.size(); ++start) {
        if (raw[start] != '{') continue;
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (size_t i = start; i < raw.size(); ++i) {
            const char c = raw[i];
            if (in_string) {
                if (escaped)
                    escaped = false;
                else if (c == '\\')
                    escaped = true;
                else if (c == '"')
                    in_string = false;
                continue;
            }
            if (c == '"')
                in_string = true;
            else if (c == '{')
                ++depth;
            else if (c == '}') {
                --depth;
                if (depth == 0) {
                    const std::string candidate = raw.substr(start, i - start + 1);
                    const json parsed = json::parse(candidate, nullptr, false);
                    if (!parsed.is_discarded()) return candidate;
                    break; // unbalanced-in-content; try the next '{'
                }
            }
        }
    }
    throw Error("unparseable", "no balanced JSON object found in judge response");
}

int read_score(const json& dim, const std::string& name) {
    if (!dim.is_object() || !dim.contains("score"))
        throw Error("missing-dimension", "dimension " + name + " carries no score");
    const json& s = dim.at("score");
    double v = 0.0;
    if (s.is_number())
        v = s.get<double>();
    else
        throw Error("out-of-range", "score for " + name + " is not a number");
    if (std::floor(v) != v)
        throw Error("out-of-range", "score for " + name + " is not an integer");
    if (v < 0.0 || v > 25.0)
        throw Error("out-of-range", "score for " + name + " is outside [0, 25]");
    return static_cast<int>(v);
}

} // namespace

L3Report parse_l3_response(const std::string& raw) {
    const json doc = json::parse(extract_first_json_object(raw));
    static const std::vector<std::pair<std::string, int L3Report::*>> dims = {
        {"script_fidelity", &L3Report::sf},
        {"character_consistency", &L3Report::chc},
        {"cinematographic_quality", &L3Report::cq},
        {"temporal_coherence", &L3Report::tmpcoh}};
    L3Report report;
    for (const auto& [key, member] : dims) {
        if (!doc.contains(key))
            throw Error("missing-dimension", "judge response lacks dimension " + key);
        report.*member = read_score(doc.at(key), key);
        if (doc.at(key).contains("reasoning") && doc.at(key).at("reasoning").is_string())
            report.reasoning[key] = doc.at(key).at("reasoning").get<std::string>();
    }
    report.total = report.sf + report.chc + report.cq + report.tmpcoh;
    return report;
}

json build_judge_request(const std::string& prompt, const std::string& model) {
    return {{"model", model},
            {"temperature", 0},
            {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
}

std::string extract_judge_text(const json& response_body) {
    try {
        return response_body.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception& e) {
        throw Error("unparseable", std::string("judge response body: ") + e.what());
    }
}

json aggregate_reports(const std::vector<ScenarioScores>& scores) {
    // model -> tier -> metric -> values
    std::map<std::string, std::map<std::string, std::map<std::string, std::vector<double>>>> acc;
    for (const auto& s : scores)
        for (const auto& [metric, value] : s.metrics) {
            acc[s.model][s.tier][metric].push_back(value);
            acc[s.model]["all"][metric].push_back(value);
        }

    const auto mean = [](const std::vector<double>& v) {
        double sum = 0.0;
        for (double x : v) sum += x;
        return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
    };

    json out = json::object();
    for (const auto& [model, tiers] : acc) {
        json jmodel = json::object();
        for (const auto& [tier, metrics] : tiers) {
            json jtier = json::object();
            for (const auto& [metric, values] : metrics) jtier[metric] = mean(values);
            jmodel[tier] = std::move(jtier);
        }
        if (tiers.count("S1") && tiers.count("S5")) {
            json delta = json::object();
            for (const auto& [metric, values] : tiers.at("S5")) {
                if (!tiers.at("S1").count(metric)) continue;
                delta[metric] = mean(values) - mean(tiers.at("S1").at(metric));
            }
            jmodel["delta_S5_S1"] = std::move(delta);
        }
        out[model] = std::move(jmodel);
    }
    return out;
}

std::string summary_csv(const json& aggregate) {
    std::ostringstream out;
    out << "model,tier,metric,value\n";
    for (auto mit = aggregate.begin(); mit != aggregate.end(); ++mit)
        for (auto tit = mit.value().begin(); tit != mit.value().end(); ++tit)
            for (auto kit = tit.value().begin(); kit != tit.value().end(); ++kit)
                out << mit.key() << "," << tit.key() << "," << kit.key() << ","
                    << format_fixed6(kit.value().get<double>()) << "\n";
    return out.str();
}

std::string summary_markdown(const json& aggregate) {
    std::ostringstream out;
    for (auto mit = aggregate.begin(); mit != aggregate.end(); ++mit) {
        out << "## " << mit.key() << "\n\n";
        std::vector<std::string> metrics;
        for (auto tit = mit.value().begin(); tit != mit.value().end(); ++tit)
            for (auto kit = tit.value().begin(); kit != tit.value().end(); ++kit)
                if (std::find(metrics.begin(), metrics.end(), kit.key()) == metrics.end())
                    metrics.push_back(kit.key());
        std::sort(metrics.begin(), metrics.end());
        out << "| tier |";
        for (const auto& m : metrics) out << " " << m << " |";
        out << "\n|---|";
        for (size_t i = 0; i < metrics.size(); ++i) out << "---|";
        out << "\n";
        for (auto tit = mit.value().begin(); tit != mit.value().end(); ++tit) {
            out << "| " << tit.key() << " |";
            for (const auto& m : metrics) {
                if (tit.value().contains(m))
                    out << " " << format_fixed6(tit.value().at(m).get<double>()) << " |";
                else
                    out << " - |";
            }
            out << "\n";
        }
        out << "\n";
    }
    return out.str();
}

} // namespace cutkit
