#include "cutkit/camera_templates.hpp"

#include <cmath>

#include "cutkit/error.hpp"

namespace cutkit {

SkeletonProfile::SkeletonProfile() {
    heights_["head"] = 160.0;
    heights_["spine_03"] = 120.0;
}

double SkeletonProfile::bone_height(const std::string& bone) const {
    auto it = heights_.find(bone);
    if (it == heights_.end()) throw Error("unknown-bone", "no height for bone: " + bone);
    return it->second;
}

void SkeletonProfile::set_bone_height(const std::string& bone, double height_cm) {
    if (!(height_cm > 0.0)) throw Error("invalid-bone-height", "bone height must be > 0");
    heights_[bone] = height_cm;
}

Vec3 SkeletonProfile::bone_world(const Vec3& root, const std::string& bone) const {
    return root + Vec3{0.0, 0.0, bone_height(bone)};
}

CameraPose CameraPose::aimed(const Vec3& position, const Vec3& look_target) {
    CameraPose p;
    p.position = position;
    p.look_target = look_target;
    p.rotation = look_at_rotation(position, look_target);
    return p;
}

OtsPreset ots_preset(const std::string& variant) {
    if (variant == "near") return {40.0, 100.0, 140.0};
    if (variant == "mid") return {50.0, 230.0, 200.0};
    if (variant == "high") return {120.0, 200.0, 300.0};
    throw Error("unknown-variant", "unknown OTS variant: " + variant);
}

namespace {

// Forward/right basis between two actors; throws when they stack in XY.
void actor_basis(const Vec3& from, const Vec3& to, Vec3& fwd, Vec3& right) {
    Vec3 d = to - from;
    if (d.length_xy() < 1e-9)
        throw Error("coincident-actors", "actors share an XY position");
    fwd = normalized(d);
    right = normalized(cross(kWorldUp, fwd));
}

} // namespace

CameraPose compute_ots(const ActorTransform& from, const ActorTransform& to,
                       const OtsPreset& preset, const SkeletonProfile& from_skeleton,
                       const SkeletonProfile& to_skeleton, const std::string& shoulder_bone) {
    Vec3 fwd, right;
    actor_basis(from.location, to.location, fwd, right);
    const double h_from = from_skeleton.bone_world(from.location, shoulder_bone).z;
    const double h_to = to_skeleton.bone_world(to.location, shoulder_bone).z;

    const Vec3 position = from.location - fwd * preset.d_back + right * preset.d_side +
                          Vec3{0.0, 0.0, h_from + preset.h_off};
    const Vec3 look = (from.location + Vec3{0.0, 0.0, h_from} + to.location +
                       Vec3{0.0, 0.0, h_to}) * 0.5;
    return CameraPose::aimed(position, look);
}

CameraPose compute_pov(const ActorTransform& from, const ActorTransform& to,
                       const SkeletonProfile& from_skeleton, const SkeletonProfile& to_skeleton,
                       const std::string& head_bone, double forward_offset, double side_offset) {
    Vec3 fwd, right;
    actor_basis(from.location, to.location, fwd, right);
    const Vec3 head_from = from_skeleton.bone_world(from.location, head_bone);
    const Vec3 head_to = to_skeleton.bone_world(to.location, head_bone);
    const Vec3 position = head_from + fwd * forward_offset + right * side_offset;
    return CameraPose::aimed(position, head_to);
}

CameraPose compute_on_axis(const ActorTransform& from, const ActorTransform& to,
                           const SkeletonProfile& from_skeleton,
                           const SkeletonProfile& to_skeleton, const std::string& head_bone) {
    const Vec3 head_from = from_skeleton.bone_world(from.location, head_bone);
    const Vec3 head_to = to_skeleton.bone_world(to.location, head_bone);
    if ((head_to - head_from).length() < 1e-9)
        throw Error("coincident-actors", "actor heads coincide");
    const Vec3 position = (head_from + head_to) * 0.5;
    return CameraPose::aimed(position, head_to);
}

CameraPose compute_side_profile(const ActorTransform& actor, const SkeletonProfile& skeleton,
                                const std::string& side, double side_distance,
                                const std::string& bone) {
    if (side != "left" && side != "right")
        throw Error("invalid-side", "side must be left or right");
    const Vec3 local_right = apply_rotation(actor.rotation, Vec3{-1.0, 0.0, 0.0});
    const Vec3 offset_dir = side == "left" ? local_right * -1.0 : local_right;
    const Vec3 bone_pos = skeleton.bone_world(actor.location, bone);
    const Vec3 position = bone_pos + offset_dir * side_distance;
    return CameraPose::aimed(position, bone_pos);
}

CameraPose compute_establishing(const ActorTransform& a1, const ActorTransform& a2,
                                const std::string& side, double distance,
                                double height_offset) {
    if (side != "left" && side != "right")
        throw Error("invalid-side", "side must be left or right");
    Vec3 axis, right;
    actor_basis(a1.location, a2.location, axis, right);
    const Vec3 offset_dir = side == "left" ? right * -1.0 : right;
    const Vec3 mid = (a1.location + a2.location) * 0.5;
    const Vec3 position = mid + offset_dir * distance + Vec3{0.0, 0.0, height_offset};
    const Vec3 look = mid + Vec3{0.0, 0.0, height_offset};
    return CameraPose::aimed(position, look);
}

CameraPose compute_generic_focus(const ActorTransform& actor, const SkeletonProfile& skeleton,
                                 double distance, double pitch, double yaw,
                                 const std::optional<std::string>& bone) {
    const Vec3 target = bone ? skeleton.bone_world(actor.location, *bone) : actor.location;
    const Vec3 base = forward_vector(actor.rotation) * -1.0;
    const Vec3 d1 = rodrigues_rotate(base, yaw, kWorldUp);
    const Vec3 r1 = normalized(cross(kWorldUp, d1));
    const Vec3 d2 = rodrigues_rotate(d1, -pitch, r1);
    const Vec3 position = target + d2 * distance;
    return CameraPose::aimed(position, target);
}

std::vector<MovementKeyframe> gen_dolly_keyframes(const CameraPose& pose, double ratio,
                                                  double start, double duration) {
    if (!(duration > 0.0)) throw Error("invalid-range", "dolly duration must be > 0");
    Vec3 end_pos;
    if (ratio == 1.0)
        end_pos = pose.position; // exact fixed point, no float drift
    else
        end_pos = pose.look_target + (pose.position - pose.look_target) * ratio;

    std::vector<MovementKeyframe> keys;
    keys.push_back({start, pose.position, pose.rotation, KeyInterp::Linear});
    keys.push_back({start + duration, end_pos, look_at_rotation(end_pos, pose.look_target),
                    KeyInterp::Constant});
    return keys;
}

std::vector<MovementKeyframe> gen_orbit_keyframes(const CameraPose& pose, double angle_deg,
                                                  bool clockwise, double start, double duration,
                                                  int fps) {
    if (!(duration > 0.0)) throw Error("invalid-range", "orbit duration must be > 0");
    const int n = static_cast<int>(std::floor(duration * fps));
    if (n < 1) throw Error("invalid-range", "orbit too short for one keyframe step");

    const double theta_total = clockwise ? angle_deg : -angle_deg;
    const Vec3 radius0 = pose.position - pose.look_target;

    std::vector<MovementKeyframe> keys;
    keys.reserve(static_cast<size_t>(n) + 1);
    keys.push_back({start, pose.position, pose.rotation, KeyInterp::Linear});
    for (int i = 1; i <= n; ++i) {
        const double theta = theta_total * static_cast<double>(i) / n;
        const Vec3 r = rodrigues_rotate(radius0, theta, kWorldUp);
        const Vec3 p = pose.look_target + r;
        keys.push_back({start + duration * static_cast<double>(i) / n, p,
                        look_at_rotation(p, pose.look_target),
                        i == n ? KeyInterp::Constant : KeyInterp::Linear});
    }
    return keys;
}

} // namespace cutkit
