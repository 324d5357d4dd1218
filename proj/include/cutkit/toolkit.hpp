#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cutkit/asset_registry.hpp"
#include "cutkit/camera_templates.hpp"
#include "cutkit/sequence.hpp"

namespace cutkit {

struct ToolParam {
    std::string name;
    // string | number | integer | boolean | object | array | vec3 | string_array
    std::string type;
    bool required = false;
    json default_value; // null when absent
    std::vector<std::string> enum_values;
    std::string description;
};

struct ToolSchema {
    std::string name;
    std::string description;
    std::vector<ToolParam> params;
    bool mutating = false;

    json to_json() const;
};

struct ToolkitConfig {
    std::string workbook_dir;
    double bound_xy_cm = 2000.0;
    double bound_z_max_cm = 500.0;
    int frame_rate = 30;
    std::vector<std::string> tone_catalog = {"male_normal_1.mp3", "male_low_1.mp3",
                                             "female_normal_1.mp3", "female_gentle_1.mp3"};
    std::vector<std::string> project_prompt_fragments;
};

struct ViewportPose {
    Vec3 position{0.0, 0.0, 170.0};
    double yaw = 0.0;
    double pitch = 0.0;
};

// Structured orientation descriptors accepted by add_character:
// face_north/south/east/west, face_character:<name>, turn_left_<deg>,
// turn_right_<deg>. Resolution happens at call time against current bindings.
double resolve_orientation(const std::string& descriptor, double current_yaw,
                           const Vec3& own_location, const LevelSequence& seq);

// The full agent-facing tool surface. Every call returns a uniform envelope
// {status, data, message}; mutating tools echo the authoritative stored values
// so callers can chain from them. Calls are atomic: a validation or domain
// error leaves the sequence untouched.
class Toolkit {
public:
    explicit Toolkit(ToolkitConfig config);

    const std::vector<ToolSchema>& schemas() const { return schemas_; }
    const ToolSchema* find_schema(const std::string& name) const;
    bool has_tool(const std::string& name) const { return find_schema(name) != nullptr; }
    bool is_mutating(const std::string& name) const;
    json schemas_json() const;

    // Never throws; unknown tools and all domain errors come back in the
    // envelope with status = "error" and data.code set.
    json call(const std::string& name, const json& args);

    LevelSequence& sequence() { return sequence_; }
    const LevelSequence& sequence() const { return sequence_; }
    AssetRegistry& registry() { return registry_; }
    const AssetRegistry& registry() const { return registry_; }
    const ToolkitConfig& config() const { return config_; }
    const ViewportPose& viewport() const { return viewport_; }

    // Skeleton for a bound character: defaults plus `bone_height_<bone>`
    // overrides from the asset's public data.
    SkeletonProfile skeleton_for(const Binding& binding) const;

    static constexpr double kTtsSecondsPerByte = 0.0055;
    static constexpr double kTtsBaseSeconds = 0.3;

private:
    json dispatch(const std::string& name, const json& args);
    json validate_args(const ToolSchema& schema, const json& args) const;

    json tool_add_character(const json& a);
    json tool_orient_to_center(const json& a);
    json tool_add_animation(const json& a);
    json tool_add_audio(const json& a);
    json tool_add_facial(const json& a);
    json tool_add_camera(const json& a);
    json tool_set_active_camera(const json& a);
    json tool_camera_templates(const json& a);
    json tool_apply_camera_template(const json& a);
    json tool_get_sequence_content(const json& a);
    json tool_update_metadata(const json& a);
    json tool_clear_sequence(const json& a);
    json tool_set_time(const json& a);
    json tool_move_view(const json& a);
    json tool_undo_move_view(const json& a);
    json tool_screenshot(const json& a, bool camera);
    json tool_queryable_types(const json& a);
    json tool_query_instruction(const json& a);
    json tool_query_assets(const json& a);
    json tool_available_characters(const json& a);
    json tool_available_animations(const json& a);
    json tool_importable_types(const json& a);
    json tool_import_guide(const json& a);
    json tool_import_dynamic(const json& a);
    json tool_available_tone(const json& a);
    json tool_tts(const json& a);
    json tool_audio_to_face(const json& a);
    json tool_video_understanding(const json& a);

    const Binding& require_character(const std::string& name) const;
    const AssetRecord& require_asset_with_duration(const std::string& identifier,
                                                   const std::string& error_code,
                                                   double& duration_out) const;

    ToolkitConfig config_;
    AssetRegistry registry_;
    LevelSequence sequence_;
    ViewportPose viewport_;
    std::optional<ViewportPose> viewport_undo_;
    std::vector<ToolSchema> schemas_;
};

// Deterministic placeholder waveform for the TTS mock: 8 kHz, 16-bit mono PCM.
std::vector<unsigned char> synth_placeholder_wav(double duration_seconds);

// Duration in seconds from a RIFF/WAVE header; throws "decode-failure".
double wav_duration_seconds(const std::vector<unsigned char>& bytes);

} // namespace cutkit
