#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cutkit/canonical_json.hpp"
#include "cutkit/vecmath.hpp"

namespace cutkit {

// Half-open time interval [start, end) in seconds.
struct TimeRange {
    double start = 0.0;
    double end = 0.0;

    TimeRange() = default;
    // Throws Error("invalid-range") unless 0 <= start < end and both finite.
    TimeRange(double start_s, double end_s);

    double length() const { return end - start; }
    bool operator==(const TimeRange& o) const { return start == o.start && end == o.end; }
};

// Merges intervals into a disjoint sorted list clipped to `clip`.
// Returns the merged list and the total covered length.
std::pair<std::vector<TimeRange>, double> merge_intervals(std::vector<TimeRange> intervals,
                                                          const TimeRange& clip);

enum class TrackKind { Animation, Audio, Facial };

const char* track_kind_name(TrackKind kind);
TrackKind track_kind_from_name(const std::string& name);

struct Section {
    std::string asset_id;
    TimeRange range;
    TrackKind kind = TrackKind::Animation;
    std::optional<std::string> speech_text;
};

enum class BindingKind { Character, Camera };

enum class KeyInterp { Linear, Constant };

// One timed camera transform key emitted by the movement templates.
struct MovementKeyframe {
    double time = 0.0;
    Vec3 position;
    Rotator rotation;
    KeyInterp interp = KeyInterp::Linear;
};

struct Binding {
    std::string name;
    BindingKind kind = BindingKind::Character;
    std::string identifier;
    Vec3 location;
    Rotator rotation;
    // Character bindings only; sections kept sorted by start time.
    std::map<TrackKind, std::vector<Section>> tracks;
    // Camera bindings only; set by movement templates.
    std::vector<MovementKeyframe> transform_keyframes;

    bool is_character() const { return kind == BindingKind::Character; }
};

struct CameraCutEntry {
    std::string camera_name;
    TimeRange range;
};

struct MetadataBlock {
    std::string binding_name;
    std::string track;
    TimeRange range;
    std::string description;
};

// In-memory Level Sequence: the single state every tool mutates and every
// evaluator reads. Overlapping sections and camera cuts are recorded as-is;
// judging them is the evaluators' job.
class LevelSequence {
public:
    explicit LevelSequence(int frame_rate = 30) : frame_rate_(frame_rate) {}

    // Appends a binding with zero rotation and empty tracks; returns its name.
    // Throws "duplicate-name" / "empty-identifier".
    const std::string& add_binding(const std::string& name, BindingKind kind,
                                   const std::string& identifier, const Vec3& location);

    // Inserts a section in start order and returns the exact stored range so
    // callers can chain from authoritative values.
    // Throws "unknown-binding" / "binding-is-camera".
    TimeRange add_section(const std::string& binding_name, TrackKind kind,
                          const std::string& asset_id, const TimeRange& range,
                          std::optional<std::string> speech_text = std::nullopt);

    // Throws "unknown-camera".
    void add_camera_cut(const std::string& camera_name, const TimeRange& range);

    void update_metadata(MetadataBlock block);

    // Resets to the empty state; frame_rate is preserved.
    void clear();

    // Max over all section ends and camera-cut ends; 0 when empty.
    double effective_duration() const;

    Binding* find_binding(const std::string& name);
    const Binding* find_binding(const std::string& name) const;

    // Pairs of character bindings whose capsules overlap at `time` (capsule =
    // vertical cylinder, radius 35 cm, at the binding location; positions do
    // not animate, so the time argument only fixes the query point).
    std::vector<std::pair<std::string, std::string>> check_character_overlap(double time) const;

    std::vector<Binding>& bindings() { return bindings_; }
    const std::vector<Binding>& bindings() const { return bindings_; }
    const std::vector<CameraCutEntry>& camera_cuts() const { return camera_cuts_; }
    const std::vector<MetadataBlock>& metadata() const { return metadata_; }

    double current_time() const { return current_time_; }
    void set_current_time(double t);
    int frame_rate() const { return frame_rate_; }

    static constexpr double kCapsuleRadiusCm = 35.0;
    static constexpr double kCapsuleHeightCm = 180.0;

private:
    std::vector<Binding> bindings_;
    std::vector<CameraCutEntry> camera_cuts_;
    std::vector<MetadataBlock> metadata_;
    double current_time_ = 0.0;
    int frame_rate_ = 30;
};

// Hierarchical document form of the whole sequence. Deterministic: sorted
// keys, fixed 6-decimal numbers; round-trips through deserialize_state.
json serialize_state(const LevelSequence& seq);

// Throws Error("malformed-document") on structural problems.
LevelSequence deserialize_state(const json& doc);

// serialize_state rendered with canonical_dump plus a trailing newline; the
// on-disk snapshot format.
std::string snapshot_text(const LevelSequence& seq);

} // namespace cutkit
