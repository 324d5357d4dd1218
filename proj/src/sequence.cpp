#include "cutkit/sequence.hpp"

#include <algorithm>
#include <cmath>

#include "cutkit/error.hpp"

namespace cutkit {

TimeRange::TimeRange(double start_s, double end_s) : start(start_s), end(end_s) {
    if (!std::isfinite(start_s) || !std::isfinite(end_s) || start_s < 0.0 || start_s >= end_s)
        throw Error("invalid-range", "time range must satisfy 0 <= start < end");
}

std::pair<std::vector<TimeRange>, double> merge_intervals(std::vector<TimeRange> intervals,
                                                          const TimeRange& clip) {
    std::vector<TimeRange> clipped;
    for (const auto& iv : intervals) {
        const double s = std::max(iv.start, clip.start);
        const double e = std::min(iv.end, clip.end);
        if (s < e) clipped.push_back(TimeRange(s, e));
    }
    std::sort(clipped.begin(), clipped.end(),
              [](const TimeRange& a, const TimeRange& b) { return a.start < b.start; });

    std::vector<TimeRange> merged;
    for (const auto& iv : clipped) {
        // half-open: an interval starting exactly at the previous end extends it
        if (!merged.empty() && iv.start <= merged.back().end)
            merged.back().end = std::max(merged.back().end, iv.end);
        else
            merged.push_back(iv);
    }
    double total = 0.0;
    for (const auto& iv : merged) total += iv.length();
    return {merged, total};
}

const char* track_kind_name(TrackKind kind) {
    switch (kind) {
        case TrackKind::Animation: return "animation";
        case TrackKind::Audio: return "audio";
        case TrackKind::Facial: return "facial";
    }
    return "animation";
}

TrackKind track_kind_from_name(const std::string& name) {
    if (name == "animation") return TrackKind::Animation;
    if (name == "audio") return TrackKind::Audio;
    if (name == "facial") return TrackKind::Facial;
    throw Error("unknown-track-kind", "unknown track kind: " + name);
}

const std::string& LevelSequence::add_binding(const std::string& name, BindingKind kind,
                                              const std::string& identifier,
                                              const Vec3& location) {
    if (identifier.empty())
        throw Error("empty-identifier", "binding identifier must not be empty");
    if (find_binding(name))
        throw Error("duplicate-name", "binding already exists: " + name);
    Binding b;
    b.name = name;
    b.kind = kind;
    b.identifier = identifier;
    b.location = location;
    bindings_.push_back(std::move(b));
    return bindings_.back().name;
}

TimeRange LevelSequence::add_section(const std::string& binding_name, TrackKind kind,
                                     const std::string& asset_id, const TimeRange& range,
                                     std::optional<std::string> speech_text) {
    if (asset_id.empty())
        throw Error("empty-identifier", "section asset id must not be empty");
    Binding* b = find_binding(binding_name);
    if (!b) throw Error("unknown-binding", "no binding named " + binding_name);
    if (!b->is_character())
        throw Error("binding-is-camera", binding_name + " is a camera; it carries no tracks");

    Section s;
    s.asset_id = asset_id;
    s.range = range;
    s.kind = kind;
    s.speech_text = std::move(speech_text);

    auto& track = b->tracks[kind];
    auto pos = std::upper_bound(track.begin(), track.end(), s,
                                [](const Section& a, const Section& c) {
                                    return a.range.start < c.range.start;
                                });
    track.insert(pos, std::move(s));
    return range;
}

void LevelSequence::add_camera_cut(const std::string& camera_name, const TimeRange& range) {
    const Binding* b = find_binding(camera_name);
    if (!b || b->kind != BindingKind::Camera)
        throw Error("unknown-camera", "no camera binding named " + camera_name);
    camera_cuts_.push_back({camera_name, range});
}

void LevelSequence::update_metadata(MetadataBlock block) {
    metadata_.push_back(std::move(block));
}

void LevelSequence::clear() {
    bindings_.clear();
    camera_cuts_.clear();
    metadata_.clear();
    current_time_ = 0.0;
}

double LevelSequence::effective_duration() const {
    double d = 0.0;
    for (const auto& b : bindings_)
        for (const auto& [kind, track] : b.tracks)
            for (const auto& s : track) d = std::max(d, s.range.end);
    for (const auto& c : camera_cuts_) d = std::max(d, c.range.end);
    return d;
}

Binding* LevelSequence::find_binding(const std::string& name) {
    for (auto& b : bindings_)
        if (b.name == name) return &b;
    return nullptr;
}

const Binding* LevelSequence::find_binding(const std::string& name) const {
    for (const auto& b : bindings_)
        if (b.name == name) return &b;
    return nullptr;
}

std::vector<std::pair<std::string, std::string>> LevelSequence::check_character_overlap(
    double /*time*/) const {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (size_t i = 0; i < bindings_.size(); ++i) {
        if (!bindings_[i].is_character()) continue;
        for (size_t j = i + 1; j < bindings_.size(); ++j) {
            if (!bindings_[j].is_character()) continue;
            const Vec3 d = bindings_[i].location - bindings_[j].location;
            if (d.length_xy() < 2.0 * kCapsuleRadiusCm)
                pairs.emplace_back(bindings_[i].name, bindings_[j].name);
        }
    }
    return pairs;
}

void LevelSequence::set_current_time(double t) {
    if (!std::isfinite(t) || t < 0.0)
        throw Error("invalid-time", "sequence time must be finite and >= 0");
    current_time_ = t;
}

namespace {

json range_to_json(const TimeRange& r) { return {{"start", r.start}, {"end", r.end}}; }

TimeRange range_from_json(const json& j) {
    if (!j.is_object() || !j.contains("start") || !j.contains("end"))
        throw Error("malformed-document", "range must carry start and end");
    return TimeRange(j.at("start").get<double>(), j.at("end").get<double>());
}

json vec_to_json(const Vec3& v) { return {{"x", v.x}, {"y", v.y}, {"z", v.z}}; }

Vec3 vec_from_json(const json& j) {
    return {j.at("x").get<double>(), j.at("y").get<double>(), j.at("z").get<double>()};
}

json rot_to_json(const Rotator& r) {
    return {{"pitch", r.pitch}, {"yaw", r.yaw}, {"roll", r.roll}};
}

Rotator rot_from_json(const json& j) {
    return Rotator(j.at("pitch").get<double>(), j.at("yaw").get<double>(),
                   j.at("roll").get<double>());
}

} // namespace

json serialize_state(const LevelSequence& seq) {
    json doc;
    json bindings = json::array();
    for (const auto& b : seq.bindings()) {
        json jb;
        jb["name"] = b.name;
        jb["kind"] = b.kind == BindingKind::Character ? "character" : "camera";
        jb["identifier"] = b.identifier;
        jb["location"] = vec_to_json(b.location);
        jb["rotation"] = rot_to_json(b.rotation);
        if (b.is_character()) {
            json tracks = json::object();
            for (const auto& [kind, track] : b.tracks) {
                if (track.empty()) continue;
                json sections = json::array();
                for (const auto& s : track) {
                    json js;
                    js["asset_id"] = s.asset_id;
                    js["range"] = range_to_json(s.range);
                    if (s.speech_text) js["speech_text"] = *s.speech_text;
                    sections.push_back(std::move(js));
                }
                tracks[track_kind_name(kind)] = std::move(sections);
            }
            jb["tracks"] = std::move(tracks);
        } else if (!b.transform_keyframes.empty()) {
            json keys = json::array();
            for (const auto& k : b.transform_keyframes) {
                keys.push_back({{"time", k.time},
                                {"position", vec_to_json(k.position)},
                                {"rotation", rot_to_json(k.rotation)},
                                {"interp", k.interp == KeyInterp::Linear ? "Linear" : "Constant"}});
            }
            jb["transform_keyframes"] = std::move(keys);
        }
        bindings.push_back(std::move(jb));
    }
    doc["bindings"] = std::move(bindings);

    json cuts = json::array();
    for (const auto& c : seq.camera_cuts())
        cuts.push_back({{"camera_name", c.camera_name}, {"range", range_to_json(c.range)}});
    doc["camera_cuts"] = std::move(cuts);

    json meta = json::array();
    for (const auto& m : seq.metadata())
        meta.push_back({{"binding_name", m.binding_name},
                        {"track", m.track},
                        {"range", range_to_json(m.range)},
                        {"description", m.description}});
    doc["metadata"] = std::move(meta);

    doc["current_time"] = seq.current_time();
    doc["frame_rate"] = seq.frame_rate();
    return doc;
}

LevelSequence deserialize_state(const json& doc) {
    try {
        if (!doc.is_object() || !doc.contains("bindings"))
            throw Error("malformed-document", "sequence document must carry bindings");
        LevelSequence seq(doc.value("frame_rate", 30));
        for (const auto& jb : doc.at("bindings")) {
            const std::string kind_s = jb.at("kind").get<std::string>();
            const BindingKind kind =
                kind_s == "camera" ? BindingKind::Camera : BindingKind::Character;
            seq.add_binding(jb.at("name").get<std::string>(), kind,
                            jb.at("identifier").get<std::string>(),
                            vec_from_json(jb.at("location")));
            Binding* b = seq.find_binding(jb.at("name").get<std::string>());
            b->rotation = rot_from_json(jb.at("rotation"));
            if (kind == BindingKind::Character && jb.contains("tracks")) {
                for (auto it = jb.at("tracks").begin(); it != jb.at("tracks").end(); ++it) {
                    const TrackKind tk = track_kind_from_name(it.key());
                    for (const auto& js : it.value()) {
                        std::optional<std::string> speech;
                        if (js.contains("speech_text"))
                            speech = js.at("speech_text").get<std::string>();
                        seq.add_section(b->name, tk, js.at("asset_id").get<std::string>(),
                                        range_from_json(js.at("range")), std::move(speech));
                    }
                }
            }
            if (kind == BindingKind::Camera && jb.contains("transform_keyframes")) {
                for (const auto& jk : jb.at("transform_keyframes")) {
                    MovementKeyframe k;
                    k.time = jk.at("time").get<double>();
                    k.position = vec_from_json(jk.at("position"));
                    k.rotation = rot_from_json(jk.at("rotation"));
                    k.interp = jk.at("interp").get<std::string>() == "Constant"
                                   ? KeyInterp::Constant
                                   : KeyInterp::Linear;
                    b->transform_keyframes.push_back(k);
                }
            }
        }
        if (doc.contains("camera_cuts"))
            for (const auto& jc : doc.at("camera_cuts"))
                seq.add_camera_cut(jc.at("camera_name").get<std::string>(),
                                   range_from_json(jc.at("range")));
        if (doc.contains("metadata"))
            for (const auto& jm : doc.at("metadata"))
                seq.update_metadata({jm.at("binding_name").get<std::string>(),
                                     jm.at("track").get<std::string>(),
                                     range_from_json(jm.at("range")),
                                     jm.at("description").get<std::string>()});
        if (doc.contains("current_time")) seq.set_current_time(doc.at("current_time").get<double>());
        return seq;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error("malformed-document", e.what());
    }
}

std::string snapshot_text(const LevelSequence& seq) {
    return canonical_dump(serialize_state(seq)) + "\n";
}

} // namespace cutkit
