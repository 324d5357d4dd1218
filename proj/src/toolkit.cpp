#include "cutkit/toolkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "cutkit/error.hpp"

namespace cutkit {

namespace {

json make_ok(json data, const std::string& message) {
    return {{"status", "ok"}, {"data", std::move(data)}, {"message", message}};
}

json make_error(const std::string& code, const std::string& message) {
    return {{"status", "error"}, {"data", {{"code", code}}}, {"message", message}};
}

Vec3 vec3_from(const json& v) {
    return {v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>()};
}

json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json rot_json(const Rotator& r) {
    return {{"pitch", r.pitch}, {"yaw", r.yaw}, {"roll", r.roll}};
}

size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= b.size(); ++j) {
            const size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

} // namespace

double resolve_orientation(const std::string& descriptor, double current_yaw,
                           const Vec3& own_location, const LevelSequence& seq) {
    if (descriptor == "face_north") return 90.0;
    if (descriptor == "face_south") return -90.0;
    if (descriptor == "face_east") return 0.0;
    if (descriptor == "face_west") return 180.0;
    const std::string face_prefix = "face_character:";
    if (descriptor.rfind(face_prefix, 0) == 0) {
        const std::string target = descriptor.substr(face_prefix.size());
        const Binding* b = seq.find_binding(target);
        if (!b) throw Error("unknown-binding", "orientation target not bound: " + target);
        const Vec3 d = b->location - own_location;
        if (d.length_xy() < 1e-9)
            throw Error("coincident-points", "cannot face a character at the same XY position");
        return rad_to_deg(std::atan2(d.y, d.x));
    }
    for (const auto& [prefix, sign] :
         std::vector<std::pair<std::string, double>>{{"turn_left_", 1.0}, {"turn_right_", -1.0}}) {
        if (descriptor.rfind(prefix, 0) == 0) {
            try {
                size_t pos = 0;
                const double deg = std::stod(descriptor.substr(prefix.size()), &pos);
                if (pos != descriptor.size() - prefix.size()) throw std::invalid_argument("tail");
                return normalize_angle(current_yaw + sign * deg);
            } catch (...) {
                throw Error("invalid-orientation", "bad turn angle in: " + descriptor);
            }
        }
    }
    throw Error("invalid-orientation", "unknown orientation descriptor: " + descriptor);
}

std::vector<unsigned char> synth_placeholder_wav(double duration_seconds) {
    constexpr uint32_t rate = 8000;
    const uint32_t samples = static_cast<uint32_t>(std::llround(duration_seconds * rate));
    const uint32_t data_size = samples * 2;
    std::vector<unsigned char> out;
    out.reserve(44 + data_size);
    const auto push_u32 = [&](uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
    };
    const auto push_u16 = [&](uint16_t v) {
        out.push_back(static_cast<unsigned char>(v & 0xff));
        out.push_back(static_cast<unsigned char>(v >> 8));
    };
    const auto push_tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };
    push_tag("RIFF");
    push_u32(36 + data_size);
    push_tag("WAVE");
    push_tag("fmt ");
    push_u32(16);
    push_u16(1); // PCM
    push_u16(1); // mono
    push_u32(rate);
    push_u32(rate * 2); // byte rate
    push_u16(2);        // block align
    push_u16(16);       // bits per sample
    push_tag("data");
    push_u32(data_size);
    out.resize(44 + data_size, 0);
    return out;
}

double wav_duration_seconds(const std::vector<unsigned char>& bytes) {
    const auto read_u32 = [&](size_t off) -> uint32_t {
        return static_cast<uint32_t>(bytes[off]) | (static_cast<uint32_t>(bytes[off + 1]) << 8) |
               (static_cast<uint32_t>(bytes[off + 2]) << 16) |
               (static_cast<uint32_t>(bytes[off + 3]) << 24);
    };
    if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw Error("decode-failure", "not a RIFF/WAVE payload");
    size_t off = 12;
    uint32_t byte_rate = 0;
    while (off + 8 <= bytes.size()) {
        const uint32_t chunk_size = read_u32(off + 4);
        if (std::memcmp(bytes.data() + off, "fmt ", 4) == 0 && off + 16 <= bytes.size())
            byte_rate = read_u32(off + 16);
        else if (std::memcmp(bytes.data() + off, "data", 4) == 0) {
            if (byte_rate == 0) throw Error("decode-failure", "WAVE data before fmt chunk");
            return static_cast<double>(chunk_size) / byte_rate;
        }
        off += 8 + chunk_size + (chunk_size & 1);
    }
    throw Error("decode-failure", "WAVE payload has no data chunk");
}

json ToolSchema::to_json() const {
    json props = json::object();
    json required = json::array();
    for (const auto& p : params) {
        json jp{{"type", p.type}};
        if (!p.description.empty()) jp["description"] = p.description;
        if (!p.enum_values.empty()) jp["enum"] = p.enum_values;
        if (!p.default_value.is_null()) jp["default"] = p.default_value;
        props[p.name] = std::move(jp);
        if (p.required) required.push_back(p.name);
    }
    return {{"name", name},
            {"description", description},
            {"mutating", mutating},
            {"inputSchema",
             {{"type", "object"}, {"properties", std::move(props)}, {"required", std::move(required)}}}};
}

Toolkit::Toolkit(ToolkitConfig config) : config_(std::move(config)), sequence_(config_.frame_rate) {
    // engine-side hooks; headless build spawns nothing
    registry_.register_loader("metahuman_character", [](const std::string&, const AssetRecord&,
                                                        const json&) {});
    registry_.register_loader("animation", [](const std::string&, const AssetRecord&, const json&) {});
    registry_.register_loader("audio", [](const std::string&, const AssetRecord&, const json&) {});
    registry_.register_loader("facial_animation",
                              [](const std::string&, const AssetRecord&, const json&) {});

    registry_.register_receiver(
        "audio_wav", "audio", "Audio",
        [](const ImportContext& ctx) {
            ReceiverResult r;
            if (!ctx.metadata.contains("duration")) {
                try {
                    r.extra_public["duration"] = wav_duration_seconds(ctx.raw_bytes);
                } catch (const Error& e) {
                    r.success = false;
                    r.message = e.what();
                    return r;
                }
            }
            r.success = true;
            r.asset_path = "/Game/Dynamic/Audio/" + ctx.identifier;
            return r;
        },
        "PCM WAV audio imported as a Sound Wave.", {".wav"});

    registry_.register_receiver(
        "facial_npz", "facial_animation", "FacialAnimation",
        [](const ImportContext& ctx) {
            ReceiverResult r;
            if (!ctx.metadata.contains("duration")) {
                r.success = false;
                r.message = "facial import requires a duration metadata field";
                return r;
            }
            r.success = true;
            r.asset_path = "/Game/Dynamic/Facial/" + ctx.identifier;
            return r;
        },
        "Facial animation curves imported as an Animation Asset.", {".npz"});

    if (!config_.workbook_dir.empty()) registry_.load_static_tables(config_.workbook_dir);

    const auto p = [](std::string name, std::string type, bool required, json def = nullptr,
                      std::vector<std::string> enums = {}, std::string desc = "") {
        return ToolParam{std::move(name), std::move(type), required, std::move(def),
                         std::move(enums), std::move(desc)};
    };

    schemas_ = {
        {"add_character",
         "Spawn a character actor via its registered loader and bind it to the sequence.",
         {p("name", "string", true), p("identifier", "string", true),
          p("location", "vec3", false, json::array({0.0, 0.0, 0.0})),
          p("orientation", "string", false, "",
            {}, "Optional descriptor: face_north/south/east/west, face_character:<name>, "
                "turn_left_<deg>, turn_right_<deg>")},
         true},
        {"orient_character_to_center",
         "Rotate each named character to face the geometric centroid of the group.",
         {p("names", "string_array", true)},
         true},
        {"add_character_animation",
         "Add a skeletal animation section; duration comes from the animation asset.",
         {p("character_name", "string", true), p("identifier", "string", true),
          p("start_time", "number", true)},
         true},
        {"add_character_audio",
         "Add an audio section with optional speech text annotation.",
         {p("character_name", "string", true), p("identifier", "string", true),
          p("start_time", "number", true), p("end_time", "number", true),
          p("speech_text", "string", false, "")},
         true},
        {"add_character_facial_animation",
         "Add a facial animation section; duration comes from the facial asset.",
         {p("character_name", "string", true), p("identifier", "string", true),
          p("start_time", "number", true),
          p("gender", "string", false, "male", {"male", "female"}, "accepted and ignored")},
         true},
        {"add_camera", "Create a camera actor and bind it to the sequence.",
         {p("camera_name", "string", true)}, true},
        {"set_active_camera", "Add a camera cut entry for the given time range.",
         {p("camera_name", "string", true), p("start_time", "number", true),
          p("end_time", "number", true)},
         true},
        {"get_available_camera_templates",
         "Structured schemas of all position and movement templates.", {}, false},
        {"apply_camera_template",
         "Compute a shot from a position template, optionally animate it with a movement "
         "template, and record the shot description as sequence metadata.",
         {p("camera_name", "string", true), p("position_template", "string", true),
          p("position_args", "object", true),
          p("movement_template", "string", false, ""),
          p("movement_args", "object", false, json::object()),
          p("start_time", "number", true), p("duration", "number", true)},
         true},
        {"get_sequence_content", "Serialize the entire sequence as hierarchical JSON.", {}, false},
        {"update_sequence_metadata", "Attach a semantic annotation block to the sequence.",
         {p("new_block", "object", true)}, true},
        {"clear_sequence", "Reset the sequence to its empty state.", {}, true},
        {"set_current_sequence_time", "Move the editor playhead.",
         {p("time", "number", true)}, true},
        {"move_view",
         "Viewport navigation: forward/horizontal in the view's yaw frame on the XY plane, "
         "vertical along world Z, plus yaw/pitch deltas.",
         {p("forward", "number", false, 0.0), p("horizontal", "number", false, 0.0),
          p("vertical", "number", false, 0.0), p("yaw", "number", false, 0.0),
          p("pitch", "number", false, 0.0)},
         true},
        {"undo_move_view", "Revert the most recent move_view (single step).", {}, true},
        {"take_editor_screenshot", "Viewport capture; not supported in the headless build.",
         {p("resolution", "array", false, json::array({1280, 720}))}, false},
        {"take_camera_screenshot", "Camera capture; not supported in the headless build.",
         {p("camera_name", "string", true),
          p("resolution", "array", false, json::array({1280, 720}))},
         false},
        {"get_queryable_asset_types", "All asset types from static and dynamic sources.", {},
         false},
        {"get_query_instruction", "Field schema and filter syntax guide for an asset type.",
         {p("asset_type", "string", true)}, false},
        {"query_assets",
         "Query assets of a type; filters support exact match, /regex/, and numeric comparisons.",
         {p("asset_type", "string", true), p("filters", "object", false, json::object()),
          p("include_generated", "string", false, "auto", {"auto", "only", "never"})},
         false},
        {"get_available_characters", "Convenience query over the character catalog.", {}, false},
        {"get_available_animations", "Convenience query over the animation catalog.",
         {p("gender", "string", false, "male", {"male", "female"})}, false},
        {"get_importable_asset_types", "All registered importable types.", {}, false},
        {"get_import_guide", "Import behavior and metadata guidance for an importable type.",
         {p("data_type", "string", true)}, false},
        {"import_dynamic_asset",
         "Import a runtime-generated asset from base64, a file path, or a url.",
         {p("data_type", "string", true), p("data_source", "string", true),
          p("source_type", "string", true, nullptr, {"base64", "file_path", "url"}),
          p("file_extension", "string", true), p("identifier_hint", "string", false, ""),
          p("metadata", "object", false, json::object())},
         true},
        {"get_available_tone", "Available voice tones.",
         {p("character_name", "string", false, "")}, false},
        {"tts",
         "Synthesize speech for a line of dialogue and register it as a dynamic audio asset.",
         {p("identifier", "string", true), p("text", "string", true),
          p("gender", "string", false, "male", {"male", "female"}),
          p("tone", "string", false, ""), p("emotion", "string", false, "normal")},
         true},
        {"audio_to_face_expression",
         "Derive facial animation from an audio asset and register it as a dynamic asset.",
         {p("identifier", "string", true), p("audio_identifier", "string", true),
          p("emotion", "string", false, "neutral")},
         true},
        {"video_understanding", "Analyze a reference video and describe its cinematography.",
         {p("video_identifier", "string", true), p("task_description", "string", true)}, false},
    };
}

const ToolSchema* Toolkit::find_schema(const std::string& name) const {
    for (const auto& s : schemas_)
        if (s.name == name) return &s;
    return nullptr;
}

bool Toolkit::is_mutating(const std::string& name) const {
    const ToolSchema* s = find_schema(name);
    return s && s->mutating;
}

json Toolkit::schemas_json() const {
    json out = json::array();
    for (const auto& s : schemas_) out.push_back(s.to_json());
    return out;
}

json Toolkit::validate_args(const ToolSchema& schema, const json& args) const {
    if (!args.is_object() && !args.is_null())
        throw Error("schema-violation", schema.name + ": arguments must be an object");
    json merged = json::object();
    for (const auto& p : schema.params)
        if (!p.default_value.is_null()) merged[p.name] = p.default_value;
    if (args.is_object())
        for (auto it = args.begin(); it != args.end(); ++it) {
            const auto match = std::find_if(schema.params.begin(), schema.params.end(),
                                            [&](const ToolParam& p) { return p.name == it.key(); });
            if (match == schema.params.end())
                throw Error("schema-violation",
                            schema.name + ": unknown argument '" + it.key() + "'");
            merged[it.key()] = it.value();
        }
    for (const auto& p : schema.params) {
        if (!merged.contains(p.name)) {
            if (p.required)
                throw Error("schema-violation",
                            schema.name + ": missing required argument '" + p.name + "'");
            continue;
        }
        const json& v = merged.at(p.name);
        const auto fail = [&](const char* expected) {
            throw Error("schema-violation", schema.name + ": argument '" + p.name + "' must be " +
                                                expected);
        };
        if (p.type == "string" && !v.is_string()) fail("a string");
        if (p.type == "number" && !v.is_number()) fail("a number");
        if (p.type == "integer" && !v.is_number_integer()) fail("an integer");
        if (p.type == "boolean" && !v.is_boolean()) fail("a boolean");
        if (p.type == "object" && !v.is_object()) fail("an object");
        if (p.type == "array" && !v.is_array()) fail("an array");
        if (p.type == "vec3" &&
            !(v.is_array() && v.size() == 3 && v[0].is_number() && v[1].is_number() &&
              v[2].is_number()))
            fail("an array of three numbers");
        if (p.type == "string_array") {
            if (!v.is_array()) fail("an array of strings");
            for (const auto& e : v)
                if (!e.is_string()) fail("an array of strings");
        }
        if (!p.enum_values.empty() && v.is_string() &&
            std::find(p.enum_values.begin(), p.enum_values.end(), v.get<std::string>()) ==
                p.enum_values.end())
            throw Error("schema-violation", schema.name + ": argument '" + p.name +
                                                "' must be one of the documented values");
    }
    return merged;
}

json Toolkit::call(const std::string& name, const json& args) {
    const ToolSchema* schema = find_schema(name);
    if (!schema) return make_error("unknown-tool", "no tool named " + name);
    try {
        const json merged = validate_args(*schema, args);
        return dispatch(name, merged);
    } catch (const Error& e) {
        return make_error(e.code(), e.what());
    } catch (const std::exception& e) {
        return make_error("internal-error", e.what());
    }
}

json Toolkit::dispatch(const std::string& name, const json& a) {
    if (name == "add_character") return tool_add_character(a);
    if (name == "orient_character_to_center") return tool_orient_to_center(a);
    if (name == "add_character_animation") return tool_add_animation(a);
    if (name == "add_character_audio") return tool_add_audio(a);
    if (name == "add_character_facial_animation") return tool_add_facial(a);
    if (name == "add_camera") return tool_add_camera(a);
    if (name == "set_active_camera") return tool_set_active_camera(a);
    if (name == "get_available_camera_templates") return tool_camera_templates(a);
    if (name == "apply_camera_template") return tool_apply_camera_template(a);
    if (name == "get_sequence_content") return tool_get_sequence_content(a);
    if (name == "update_sequence_metadata") return tool_update_metadata(a);
    if (name == "clear_sequence") return tool_clear_sequence(a);
    if (name == "set_current_sequence_time") return tool_set_time(a);
    if (name == "move_view") return tool_move_view(a);
    if (name == "undo_move_view") return tool_undo_move_view(a);
    if (name == "take_editor_screenshot") return tool_screenshot(a, false);
    if (name == "take_camera_screenshot") return tool_screenshot(a, true);
    if (name == "get_queryable_asset_types") return tool_queryable_types(a);
    if (name == "get_query_instruction") return tool_query_instruction(a);
    if (name == "query_assets") return tool_query_assets(a);
    if (name == "get_available_characters") return tool_available_characters(a);
    if (name == "get_available_animations") return tool_available_animations(a);
    if (name == "get_importable_asset_types") return tool_importable_types(a);
    if (name == "get_import_guide") return tool_import_guide(a);
    if (name == "import_dynamic_asset") return tool_import_dynamic(a);
    if (name == "get_available_tone") return tool_available_tone(a);
    if (name == "tts") return tool_tts(a);
    if (name == "audio_to_face_expression") return tool_audio_to_face(a);
    if (name == "video_understanding") return tool_video_understanding(a);
    throw Error("unknown-tool", "no tool named " + name);
}

SkeletonProfile Toolkit::skeleton_for(const Binding& binding) const {
    SkeletonProfile profile;
    const AssetRecord* rec = registry_.find(binding.identifier);
    if (rec) {
        const std::string prefix = "bone_height_";
        for (auto it = rec->public_data.begin(); it != rec->public_data.end(); ++it)
            if (it.key().rfind(prefix, 0) == 0 && it.value().is_number())
                profile.set_bone_height(it.key().substr(prefix.size()), it.value().get<double>());
    }
    return profile;
}

const Binding& Toolkit::require_character(const std::string& name) const {
    const Binding* b = sequence_.find_binding(name);
    if (!b || !b->is_character())
        throw Error("unknown-character", "no character binding named " + name);
    return *b;
}

const AssetRecord& Toolkit::require_asset_with_duration(const std::string& identifier,
                                                        const std::string& error_code,
                                                        double& duration_out) const {
    const AssetRecord* rec = registry_.find(identifier);
    if (!rec) throw Error(error_code, "no asset with identifier " + identifier);
    if (!rec->public_data.contains("duration") || !rec->public_data.at("duration").is_number())
        throw Error("missing-duration-field",
                    "asset " + identifier + " has no numeric duration field");
    duration_out = rec->public_data.at("duration").get<double>();
    return *rec;
}

json Toolkit::tool_add_character(const json& a) {
    const std::string name = a.at("name").get<std::string>();
    const std::string identifier = a.at("identifier").get<std::string>();
    const AssetRecord* rec = registry_.find(identifier);
    if (!rec || rec->asset_kind != "Characters") {
        std::vector<std::pair<size_t, std::string>> ranked;
        for (const auto& item : registry_.query_assets("Characters"))
            ranked.emplace_back(levenshtein(identifier, item.at("identifier").get<std::string>()),
                                item.at("identifier").get<std::string>());
        std::sort(ranked.begin(), ranked.end());
        std::string suggestions;
        for (size_t i = 0; i < std::min<size_t>(3, ranked.size()); ++i)
            suggestions += (i ? ", " : "") + ranked[i].second;
        throw Error("unknown-character-identifier",
                    "no character asset '" + identifier +
                        (suggestions.empty() ? "'" : "'; closest identifiers: " + suggestions));
    }

    Vec3 loc = vec3_from(a.at("location"));
    if (loc.z < 0.0) loc.z = 0.0; // ground clamp
    if (std::abs(loc.x) > config_.bound_xy_cm || std::abs(loc.y) > config_.bound_xy_cm ||
        loc.z > config_.bound_z_max_cm)
        throw Error("out-of-bounds", "location outside the scene bounding volume");

    if (sequence_.find_binding(name)) throw Error("duplicate-name", "binding already exists: " + name);

    registry_.invoke_loader(*rec, a);
    sequence_.add_binding(name, BindingKind::Character, identifier, loc);
    Binding* b = sequence_.find_binding(name);
    const std::string orientation = a.value("orientation", "");
    if (!orientation.empty()) {
        const double yaw = resolve_orientation(orientation, b->rotation.yaw, b->location, sequence_);
        b->rotation = Rotator(0.0, yaw, 0.0);
    }
    return make_ok({{"name", name},
                    {"identifier", identifier},
                    {"location", vec3_json(b->location)},
                    {"rotation", rot_json(b->rotation)}},
                   "character " + name + " added");
}

json Toolkit::tool_orient_to_center(const json& a) {
    std::vector<std::string> names;
    for (const auto& n : a.at("names")) names.push_back(n.get<std::string>());
    if (names.size() < 2)
        throw Error("invalid-argument", "orient_character_to_center needs at least two names");
    Vec3 centroid{0, 0, 0};
    for (const auto& n : names) centroid = centroid + require_character(n).location;
    centroid = centroid * (1.0 / static_cast<double>(names.size()));

    json rotations = json::object();
    for (const auto& n : names) {
        Binding* b = sequence_.find_binding(n);
        const Vec3 d = centroid - b->location;
        if (d.length_xy() >= 1e-9)
            b->rotation = Rotator(0.0, rad_to_deg(std::atan2(d.y, d.x)), 0.0);
        rotations[n] = rot_json(b->rotation);
    }
    return make_ok({{"centroid", vec3_json(centroid)}, {"rotations", rotations}},
                   "characters oriented toward the group centroid");
}

json Toolkit::tool_add_animation(const json& a) {
    const std::string character = a.at("character_name").get<std::string>();
    const std::string identifier = a.at("identifier").get<std::string>();
    require_character(character);
    double duration = 0.0;
    require_asset_with_duration(identifier, "unknown-animation", duration);
    const double start = a.at("start_time").get<double>();
    const TimeRange stored = sequence_.add_section(character, TrackKind::Animation, identifier,
                                                   TimeRange(start, start + duration));
    return make_ok({{"start", stored.start}, {"end", stored.end}},
                   "animation section stored at the returned range");
}

json Toolkit::tool_add_audio(const json& a) {
    const std::string character = a.at("character_name").get<std::string>();
    const std::string identifier = a.at("identifier").get<std::string>();
    require_character(character);
    if (!registry_.find(identifier))
        throw Error("unknown-audio", "no asset with identifier " + identifier);
    const TimeRange range(a.at("start_time").get<double>(), a.at("end_time").get<double>());
    const std::string speech = a.value("speech_text", "");
    const TimeRange stored =
        sequence_.add_section(character, TrackKind::Audio, identifier, range,
                              speech.empty() ? std::nullopt : std::optional<std::string>(speech));
    return make_ok({{"start", stored.start}, {"end", stored.end}},
                   "audio section stored at the returned range");
}

json Toolkit::tool_add_facial(const json& a) {
    const std::string character = a.at("character_name").get<std::string>();
    const std::string identifier = a.at("identifier").get<std::string>();
    require_character(character);
    double duration = 0.0;
    require_asset_with_duration(identifier, "unknown-facial", duration);
    const double start = a.at("start_time").get<double>();
    const TimeRange stored = sequence_.add_section(character, TrackKind::Facial, identifier,
                                                   TimeRange(start, start + duration));
    return make_ok({{"start", stored.start}, {"end", stored.end}},
                   "facial animation section stored at the returned range");
}

json Toolkit::tool_add_camera(const json& a) {
    const std::string name = a.at("camera_name").get<std::string>();
    sequence_.add_binding(name, BindingKind::Camera, "CineCameraActor", Vec3{});
    return make_ok({{"name", name}}, "camera " + name + " added");
}

json Toolkit::tool_set_active_camera(const json& a) {
    const std::string name = a.at("camera_name").get<std::string>();
    const TimeRange range(a.at("start_time").get<double>(), a.at("end_time").get<double>());
    sequence_.add_camera_cut(name, range);
    return make_ok({{"camera_name", name}, {"start", range.start}, {"end", range.end}},
                   "camera cut recorded");
}

namespace {

struct TemplateSpec {
    std::string name;
    std::vector<ToolParam> params;
};

const std::vector<TemplateSpec>& position_template_specs() {
    static const std::vector<TemplateSpec> specs = [] {
        const auto p = [](std::string n, std::string t, bool req, json def = nullptr,
                          std::vector<std::string> en = {}) {
            return ToolParam{std::move(n), std::move(t), req, std::move(def), std::move(en), ""};
        };
        std::vector<TemplateSpec> v;
        v.push_back({"OTS",
                     {p("from_actor_name", "string", true), p("to_actor_name", "string", true),
                      p("variant", "string", false, "mid", {"near", "mid", "high"}),
                      p("shoulder_bone_name", "string", false, "head"),
                      p("shoulder_height_offset", "number", false),
                      p("shoulder_side_offset", "number", false),
                      p("distance_back", "number", false)}});
        v.push_back({"POV",
                     {p("from_actor_name", "string", true), p("to_actor_name", "string", true),
                      p("head_bone_name", "string", false, "head"),
                      p("forward_offset", "number", false, -20.0),
                      p("side_offset", "number", false, 50.0)}});
        v.push_back({"OnAxis",
                     {p("from_actor_name", "string", true), p("to_actor_name", "string", true),
                      p("head_bone_name", "string", false, "head")}});
        v.push_back({"SideProfile",
                     {p("actor_name", "string", true),
                      p("side", "string", false, "left", {"left", "right"}),
                      p("side_distance", "number", false, 300.0),
                      p("bone_name", "string", false, "spine_03")}});
        v.push_back({"Establishing",
                     {p("actor1_name", "string", true), p("actor2_name", "string", true),
                      p("side", "string", false, "right", {"left", "right"}),
                      p("distance", "number", false, 300.0),
                      p("height_offset", "number", false, 150.0)}});
        v.push_back({"GenericFocus",
                     {p("actor_name", "string", true), p("distance", "number", false, 300.0),
                      p("pitch", "number", false, 0.0), p("yaw", "number", false, 0.0),
                      p("bone_name", "string", false)}});
        return v;
    }();
    return specs;
}

const std::vector<TemplateSpec>& movement_template_specs() {
    static const std::vector<TemplateSpec> specs = [] {
        const auto p = [](std::string n, std::string t, bool req, json def = nullptr) {
            return ToolParam{std::move(n), std::move(t), req, std::move(def), {}, ""};
        };
        std::vector<TemplateSpec> v;
        v.push_back({"Dolly", {p("ratio", "number", false, 0.8)}});
        v.push_back({"Orbit",
                     {p("angle", "number", false, 45.0), p("clockwise", "boolean", false, true)}});
        return v;
    }();
    return specs;
}

json template_spec_json(const TemplateSpec& spec) {
    json props = json::object();
    json required = json::array();
    for (const auto& p : spec.params) {
        json jp{{"type", p.type}};
        if (!p.enum_values.empty()) jp["enum"] = p.enum_values;
        if (!p.default_value.is_null()) jp["default"] = p.default_value;
        props[p.name] = std::move(jp);
        if (p.required) required.push_back(p.name);
    }
    return {{"name", spec.name},
            {"parameters",
             {{"type", "object"}, {"properties", std::move(props)}, {"required", std::move(required)}}}};
}

json validate_template_args(const TemplateSpec& spec, const json& args) {
    json merged = json::object();
    for (const auto& p : spec.params)
        if (!p.default_value.is_null()) merged[p.name] = p.default_value;
    for (auto it = args.begin(); it != args.end(); ++it) {
        const auto match = std::find_if(spec.params.begin(), spec.params.end(),
                                        [&](const ToolParam& p) { return p.name == it.key(); });
        if (match == spec.params.end())
            throw Error("schema-violation",
                        spec.name + " template: unknown argument '" + it.key() + "'");
        merged[it.key()] = it.value();
    }
    for (const auto& p : spec.params) {
        if (!merged.contains(p.name)) {
            if (p.required)
                throw Error("schema-violation",
                            spec.name + " template: missing required argument '" + p.name + "'");
            continue;
        }
        const json& v = merged.at(p.name);
        if (p.type == "string" && !v.is_string())
            throw Error("schema-violation",
                        spec.name + " template: argument '" + p.name + "' must be a string");
        if (p.type == "number" && !v.is_number())
            throw Error("schema-violation",
                        spec.name + " template: argument '" + p.name + "' must be a number");
        if (p.type == "boolean" && !v.is_boolean())
            throw Error("schema-violation",
                        spec.name + " template: argument '" + p.name + "' must be a boolean");
        if (!p.enum_values.empty() && v.is_string() &&
            std::find(p.enum_values.begin(), p.enum_values.end(), v.get<std::string>()) ==
                p.enum_values.end())
            throw Error("schema-violation", spec.name + " template: argument '" + p.name +
                                                "' must be one of the documented values");
    }
    return merged;
}

} // namespace

json Toolkit::tool_camera_templates(const json&) {
    json pos = json::array();
    for (const auto& s : position_template_specs()) pos.push_back(template_spec_json(s));
    json mov = json::array();
    for (const auto& s : movement_template_specs()) mov.push_back(template_spec_json(s));
    return make_ok({{"position_templates", pos}, {"movement_templates", mov}},
                   "template schemas");
}

json Toolkit::tool_apply_camera_template(const json& a) {
    const std::string camera_name = a.at("camera_name").get<std::string>();
    Binding* camera = sequence_.find_binding(camera_name);
    if (!camera || camera->kind != BindingKind::Camera)
        throw Error("unknown-camera", "no camera binding named " + camera_name);

    const std::string pos_name = a.at("position_template").get<std::string>();
    const auto& pos_specs = position_template_specs();
    const auto pos_spec = std::find_if(pos_specs.begin(), pos_specs.end(),
                                       [&](const TemplateSpec& s) { return s.name == pos_name; });
    if (pos_spec == pos_specs.end())
        throw Error("unknown-template", "no position template named " + pos_name);
    const json pa = validate_template_args(*pos_spec, a.at("position_args"));

    const double start = a.at("start_time").get<double>();
    const double duration = a.at("duration").get<double>();
    if (start < 0.0 || !(duration > 0.0))
        throw Error("invalid-range", "start must be >= 0 and duration > 0");

    const auto actor = [&](const std::string& arg) -> const Binding& {
        const std::string n = pa.at(arg).get<std::string>();
        const Binding* b = sequence_.find_binding(n);
        if (!b || !b->is_character())
            throw Error("unknown-actor", "template references unbound character " + n);
        return *b;
    };
    const auto transform = [](const Binding& b) { return ActorTransform{b.location, b.rotation}; };

    CameraPose pose;
    std::string description;
    if (pos_name == "OTS") {
        const Binding& from = actor("from_actor_name");
        const Binding& to = actor("to_actor_name");
        OtsPreset preset = ots_preset(pa.at("variant").get<std::string>());
        if (pa.contains("shoulder_height_offset"))
            preset.h_off = pa.at("shoulder_height_offset").get<double>();
        if (pa.contains("shoulder_side_offset"))
            preset.d_side = pa.at("shoulder_side_offset").get<double>();
        if (pa.contains("distance_back")) preset.d_back = pa.at("distance_back").get<double>();
        pose = compute_ots(transform(from), transform(to), preset, skeleton_for(from),
                           skeleton_for(to), pa.at("shoulder_bone_name").get<std::string>());
        description = "OTS from " + from.name + " to " + to.name + " (" +
                      pa.at("variant").get<std::string>() + ")";
    } else if (pos_name == "POV") {
        const Binding& from = actor("from_actor_name");
        const Binding& to = actor("to_actor_name");
        pose = compute_pov(transform(from), transform(to), skeleton_for(from), skeleton_for(to),
                           pa.at("head_bone_name").get<std::string>(),
                           pa.at("forward_offset").get<double>(),
                           pa.at("side_offset").get<double>());
        description = "POV from " + from.name + " to " + to.name;
    } else if (pos_name == "OnAxis") {
        const Binding& from = actor("from_actor_name");
        const Binding& to = actor("to_actor_name");
        pose = compute_on_axis(transform(from), transform(to), skeleton_for(from),
                               skeleton_for(to), pa.at("head_bone_name").get<std::string>());
        description = "OnAxis between " + from.name + " and " + to.name;
    } else if (pos_name == "SideProfile") {
        const Binding& subject = actor("actor_name");
        pose = compute_side_profile(transform(subject), skeleton_for(subject),
                                    pa.at("side").get<std::string>(),
                                    pa.at("side_distance").get<double>(),
                                    pa.at("bone_name").get<std::string>());
        description = "SideProfile of " + subject.name + " (" + pa.at("side").get<std::string>() +
                      ")";
    } else if (pos_name == "Establishing") {
        const Binding& a1 = actor("actor1_name");
        const Binding& a2 = actor("actor2_name");
        pose = compute_establishing(transform(a1), transform(a2), pa.at("side").get<std::string>(),
                                    pa.at("distance").get<double>(),
                                    pa.at("height_offset").get<double>());
        description = "Establishing of " + a1.name + " and " + a2.name + " (" +
                      pa.at("side").get<std::string>() + ")";
    } else { // GenericFocus
        const Binding& subject = actor("actor_name");
        std::optional<std::string> bone;
        if (pa.contains("bone_name")) bone = pa.at("bone_name").get<std::string>();
        pose = compute_generic_focus(transform(subject), skeleton_for(subject),
                                     pa.at("distance").get<double>(), pa.at("pitch").get<double>(),
                                     pa.at("yaw").get<double>(), bone);
        description = "GenericFocus on " + subject.name;
    }

    std::vector<MovementKeyframe> keys;
    const std::string mov_name = a.value("movement_template", "");
    if (!mov_name.empty()) {
        const auto& mov_specs = movement_template_specs();
        const auto mov_spec = std::find_if(mov_specs.begin(), mov_specs.end(),
                                           [&](const TemplateSpec& s) { return s.name == mov_name; });
        if (mov_spec == mov_specs.end())
            throw Error("unknown-template", "no movement template named " + mov_name);
        const json ma = validate_template_args(*mov_spec, a.value("movement_args", json::object()));
        if (mov_name == "Dolly") {
            keys = gen_dolly_keyframes(pose, ma.at("ratio").get<double>(), start, duration);
            description += " + Dolly(ratio=" + cell_to_string(ma.at("ratio")) + ")";
        } else {
            keys = gen_orbit_keyframes(pose, ma.at("angle").get<double>(),
                                       ma.at("clockwise").get<bool>(), start, duration,
                                       sequence_.frame_rate());
            description += " + Orbit(angle=" + cell_to_string(ma.at("angle")) +
                           (ma.at("clockwise").get<bool>() ? ", cw)" : ", ccw)");
        }
    }

    camera->location = pose.position;
    camera->rotation = pose.rotation;
    camera->transform_keyframes = keys;
    sequence_.update_metadata(
        {camera_name, "camera", TimeRange(start, start + duration), description});

    json jkeys = json::array();
    for (const auto& k : keys)
        jkeys.push_back({{"time", k.time},
                         {"position", vec3_json(k.position)},
                         {"rotation", rot_json(k.rotation)},
                         {"interp", k.interp == KeyInterp::Linear ? "Linear" : "Constant"}});
    return make_ok({{"camera_name", camera_name},
                    {"position", vec3_json(pose.position)},
                    {"rotation", rot_json(pose.rotation)},
                    {"look_target", vec3_json(pose.look_target)},
                    {"keyframes", jkeys},
                    {"description", description}},
                   description);
}

json Toolkit::tool_get_sequence_content(const json&) {
    return make_ok(serialize_state(sequence_), "current sequence state");
}

json Toolkit::tool_update_metadata(const json& a) {
    const json& block = a.at("new_block");
    for (const char* field : {"binding_name", "track", "start_time", "end_time", "description"})
        if (!block.contains(field))
            throw Error("schema-violation",
                        std::string("update_sequence_metadata: new_block missing field '") +
                            field + "'");
    sequence_.update_metadata({block.at("binding_name").get<std::string>(),
                               block.at("track").get<std::string>(),
                               TimeRange(block.at("start_time").get<double>(),
                                         block.at("end_time").get<double>()),
                               block.at("description").get<std::string>()});
    return make_ok({{"metadata_count", sequence_.metadata().size()}}, "metadata block appended");
}

json Toolkit::tool_clear_sequence(const json&) {
    sequence_.clear();
    return make_ok(json::object(), "sequence cleared");
}

json Toolkit::tool_set_time(const json& a) {
    sequence_.set_current_time(a.at("time").get<double>());
    return make_ok({{"time", sequence_.current_time()}}, "playhead moved");
}

json Toolkit::tool_move_view(const json& a) {
    viewport_undo_ = viewport_;
    const double fwd = a.at("forward").get<double>();
    const double horiz = a.at("horizontal").get<double>();
    const double yaw_rad = deg_to_rad(viewport_.yaw);
    viewport_.position.x += fwd * std::cos(yaw_rad) + horiz * std::sin(yaw_rad);
    viewport_.position.y += fwd * std::sin(yaw_rad) - horiz * std::cos(yaw_rad);
    viewport_.position.z += a.at("vertical").get<double>();
    viewport_.yaw = normalize_angle(viewport_.yaw + a.at("yaw").get<double>());
    viewport_.pitch = normalize_angle(viewport_.pitch + a.at("pitch").get<double>());
    return make_ok({{"position", vec3_json(viewport_.position)},
                    {"yaw", viewport_.yaw},
                    {"pitch", viewport_.pitch}},
                   "viewport moved");
}

json Toolkit::tool_undo_move_view(const json&) {
    if (!viewport_undo_) throw Error("nothing-to-undo", "no prior move_view to revert");
    viewport_ = *viewport_undo_;
    viewport_undo_.reset();
    return make_ok({{"position", vec3_json(viewport_.position)},
                    {"yaw", viewport_.yaw},
                    {"pitch", viewport_.pitch}},
                   "viewport restored");
}

json Toolkit::tool_screenshot(const json& a, bool camera) {
    if (camera) {
        const std::string name = a.at("camera_name").get<std::string>();
        const Binding* b = sequence_.find_binding(name);
        if (!b || b->kind != BindingKind::Camera)
            throw Error("unknown-camera", "no camera binding named " + name);
    }
    return make_ok({{"supported", false}},
                   "screenshot capture is not supported in the headless build");
}

json Toolkit::tool_queryable_types(const json&) {
    return make_ok({{"asset_types", registry_.queryable_asset_types()}}, "queryable asset types");
}

json Toolkit::tool_query_instruction(const json& a) {
    return make_ok({{"instruction",
                     registry_.query_instruction(a.at("asset_type").get<std::string>())}},
                   "query guide");
}

json Toolkit::tool_query_assets(const json& a) {
    std::map<std::string, std::string> filters;
    if (a.contains("filters"))
        for (auto it = a.at("filters").begin(); it != a.at("filters").end(); ++it) {
            if (!it.value().is_string())
                throw Error("schema-violation", "query_assets: filter values must be strings");
            filters[it.key()] = it.value().get<std::string>();
        }
    const auto assets = registry_.query_assets(a.at("asset_type").get<std::string>(), filters,
                                               a.at("include_generated").get<std::string>());
    return make_ok({{"assets", assets}, {"count", assets.size()}}, "query results");
}

json Toolkit::tool_available_characters(const json&) {
    const auto assets = registry_.query_assets("Characters");
    return make_ok({{"assets", assets}, {"count", assets.size()}}, "character catalog");
}

json Toolkit::tool_available_animations(const json& a) {
    const std::string sheet =
        a.at("gender").get<std::string>() == "female" ? "Animation_Female" : "Animation_Male";
    const auto assets = registry_.query_assets(sheet);
    return make_ok({{"assets", assets}, {"count", assets.size()}}, "animation catalog");
}

json Toolkit::tool_importable_types(const json&) {
    json types = json::array();
    for (const auto& t : registry_.importable_asset_types()) types.push_back(t);
    return make_ok({{"types", types}}, "importable types");
}

json Toolkit::tool_import_guide(const json& a) {
    return make_ok({{"guide", registry_.import_guide(a.at("data_type").get<std::string>())}},
                   "import guide");
}

json Toolkit::tool_import_dynamic(const json& a) {
    ImportRequest req;
    req.data_type = a.at("data_type").get<std::string>();
    req.data_source = a.at("data_source").get<std::string>();
    req.source_type = a.at("source_type").get<std::string>();
    req.file_extension = a.at("file_extension").get<std::string>();
    req.identifier_hint = a.value("identifier_hint", "");
    req.metadata = a.value("metadata", json::object());
    const std::string id = registry_.import_dynamic_asset(req);
    return make_ok({{"identifier", id}}, "asset imported as " + id);
}

json Toolkit::tool_available_tone(const json&) {
    return make_ok({{"tones", config_.tone_catalog}}, "available voice tones");
}

json Toolkit::tool_tts(const json& a) {
    const std::string identifier = a.at("identifier").get<std::string>();
    const std::string text = a.at("text").get<std::string>();
    if (text.empty()) throw Error("empty-text", "tts requires non-empty text");

    const double duration = kTtsSecondsPerByte * static_cast<double>(text.size()) + kTtsBaseSeconds;
    ImportRequest req;
    req.data_type = "audio_wav";
    req.data_source = base64_encode(synth_placeholder_wav(duration));
    req.source_type = "base64";
    req.file_extension = ".wav";
    req.identifier_hint = identifier;
    req.metadata = {{"duration", duration},
                    {"text", text},
                    {"gender", a.at("gender").get<std::string>()},
                    {"tone", a.at("tone").get<std::string>()},
                    {"emotion", a.at("emotion").get<std::string>()}};
    // callers chain on the identifier they chose, so the record keeps it
    registry_.register_dynamic_with_identifier(identifier, req);
    return make_ok({{"identifier", identifier}, {"duration", duration}},
                   "speech synthesized (" + format_fixed6(duration) + " s)");
}

json Toolkit::tool_audio_to_face(const json& a) {
    const std::string identifier = a.at("identifier").get<std::string>();
    const std::string audio_id = a.at("audio_identifier").get<std::string>();
    const AssetRecord* audio = registry_.find(audio_id);
    if (!audio) throw Error("unknown-audio", "no audio asset with identifier " + audio_id);
    if (!audio->public_data.contains("duration") ||
        !audio->public_data.at("duration").is_number())
        throw Error("missing-duration-field", "audio asset " + audio_id + " has no duration");
    const double duration = audio->public_data.at("duration").get<double>();

    ImportRequest req;
    req.data_type = "facial_npz";
    const std::string blob = "FACE:" + audio_id;
    req.data_source = base64_encode(std::vector<unsigned char>(blob.begin(), blob.end()));
    req.source_type = "base64";
    req.file_extension = ".npz";
    req.identifier_hint = identifier;
    req.metadata = {{"duration", duration},
                    {"source_audio", audio_id},
                    {"emotion", a.at("emotion").get<std::string>()}};
    registry_.register_dynamic_with_identifier(identifier, req);
    return make_ok({{"identifier", identifier}, {"duration", duration}},
                   "facial animation derived from " + audio_id);
}

json Toolkit::tool_video_understanding(const json& a) {
    const std::string video = a.at("video_identifier").get<std::string>();
    json analysis{{"video_identifier", video},
                  {"shot_types", json::array({"establishing", "over-the-shoulder", "close-up"})},
                  {"cut_rhythm", "regular cuts every 4-7 seconds"},
                  {"camera_movement", "slow push-ins on emotional beats"},
                  {"pacing", "dialogue-driven, medium tempo"}};
    return make_ok({{"analysis", analysis}},
                   "reference analysis for task: " + a.at("task_description").get<std::string>());
}

} // namespace cutkit
