#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cutkit/sequence.hpp"
#include "cutkit/vecmath.hpp"

namespace cutkit {

// Headless skeleton stand-in: a bone's world position is the character root
// plus (0, 0, height). Heights can be overridden per character through asset
// public data (`bone_height_<bone>` fields).
class SkeletonProfile {
public:
    SkeletonProfile();

    // Throws Error("unknown-bone") for bones without a configured height.
    double bone_height(const std::string& bone) const;
    void set_bone_height(const std::string& bone, double height_cm);

    Vec3 bone_world(const Vec3& root, const std::string& bone) const;

private:
    std::map<std::string, double> heights_;
};

// A computed shot: rotation is always look_at_rotation(position, look_target),
// enforced by the factory.
struct CameraPose {
    Vec3 position;
    Rotator rotation;
    Vec3 look_target;

    static CameraPose aimed(const Vec3& position, const Vec3& look_target);
};

struct OtsPreset {
    double h_off = 0.0;
    double d_side = 0.0;
    double d_back = 0.0;
};

// Variant table: near(40,100,140), mid(50,230,200), high(120,200,300).
OtsPreset ots_preset(const std::string& variant);

struct ActorTransform {
    Vec3 location;
    Rotator rotation;
};

// Over-the-shoulder: camera behind `from`'s shoulder, aimed at the midpoint of
// the two shoulder positions. Throws "coincident-actors" when the actors share
// an XY position.
CameraPose compute_ots(const ActorTransform& from, const ActorTransform& to,
                       const OtsPreset& preset, const SkeletonProfile& from_skeleton,
                       const SkeletonProfile& to_skeleton,
                       const std::string& shoulder_bone = "head");

// Near-POV: slightly behind the source head, looking at the target head.
CameraPose compute_pov(const ActorTransform& from, const ActorTransform& to,
                       const SkeletonProfile& from_skeleton, const SkeletonProfile& to_skeleton,
                       const std::string& head_bone = "head", double forward_offset = -20.0,
                       double side_offset = 50.0);

// Midpoint of the two heads, facing the target head.
CameraPose compute_on_axis(const ActorTransform& from, const ActorTransform& to,
                           const SkeletonProfile& from_skeleton,
                           const SkeletonProfile& to_skeleton,
                           const std::string& head_bone = "head");

// Perpendicular profile shot. The actor's local right vector is its rotation
// applied to (-1, 0, 0); side=left flips it.
CameraPose compute_side_profile(const ActorTransform& actor, const SkeletonProfile& skeleton,
                                const std::string& side = "left", double side_distance = 300.0,
                                const std::string& bone = "spine_03");

// Wide two-actor shot offset perpendicular to the actor1->actor2 axis.
// side=right offsets along normalize(z_up x axis); side=left negates it.
CameraPose compute_establishing(const ActorTransform& a1, const ActorTransform& a2,
                                const std::string& side = "right", double distance = 300.0,
                                double height_offset = 150.0);

// Spherical framing around a single target: yaw about world up from the
// actor-front direction, then pitch about the resulting right axis.
CameraPose compute_generic_focus(const ActorTransform& actor, const SkeletonProfile& skeleton,
                                 double distance = 300.0, double pitch = 0.0, double yaw = 0.0,
                                 const std::optional<std::string>& bone = std::nullopt);

// Push-in / pull-out along the view axis: exactly two keyframes, the second
// held Constant. ratio == 1 reproduces the start position bit-exactly.
std::vector<MovementKeyframe> gen_dolly_keyframes(const CameraPose& pose, double ratio,
                                                  double start, double duration);

// Horizontal arc about the look target at uniform angular velocity. Emits the
// initial pose at start plus N = floor(duration * fps) keys, the last held
// Constant. clockwise=true sweeps +angle.
std::vector<MovementKeyframe> gen_orbit_keyframes(const CameraPose& pose, double angle_deg,
                                                  bool clockwise, double start, double duration,
                                                  int fps = 30);

} // namespace cutkit
