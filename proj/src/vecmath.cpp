#include "cutkit/vecmath.hpp"

#include "cutkit/error.hpp"

namespace cutkit {

Vec3 normalized(const Vec3& v) {
    const double len = v.length();
    if (len < 1e-12)
        throw Error("zero-length-vector", "cannot normalize a zero-length vector");
    return {v.x / len, v.y / len, v.z / len};
}

double normalize_angle(double degrees) {
    double a = std::fmod(degrees, 360.0);
    if (a <= -180.0) a += 360.0;
    if (a > 180.0) a -= 360.0;
    // fmod can yield -0.0; keep the canonical zero.
    if (a == 0.0) a = 0.0;
    return a;
}

Rotator::Rotator(double pitch_deg, double yaw_deg, double roll_deg)
    : pitch(normalize_angle(pitch_deg)),
      yaw(normalize_angle(yaw_deg)),
      roll(normalize_angle(roll_deg)) {}

Rotator look_at_rotation(const Vec3& origin, const Vec3& target) {
    const Vec3 d = target - origin;
    if (d.length() < 1e-12)
        throw Error("coincident-points", "look-at origin and target coincide");
    const double yaw = rad_to_deg(std::atan2(d.y, d.x));
    const double pitch = rad_to_deg(std::atan2(d.z, d.length_xy()));
    return Rotator(pitch, yaw, 0.0);
}

Vec3 forward_vector(const Rotator& r) {
    const double cp = std::cos(deg_to_rad(r.pitch));
    const double sp = std::sin(deg_to_rad(r.pitch));
    const double cy = std::cos(deg_to_rad(r.yaw));
    const double sy = std::sin(deg_to_rad(r.yaw));
    return {cp * cy, cp * sy, sp};
}

Vec3 apply_rotation(const Rotator& r, const Vec3& v) {
    // roll about +X, then pitch lifting +X toward +Z, then yaw about +Z
    const double cr = std::cos(deg_to_rad(r.roll));
    const double sr = std::sin(deg_to_rad(r.roll));
    Vec3 a{v.x, cr * v.y - sr * v.z, sr * v.y + cr * v.z};

    const double cp = std::cos(deg_to_rad(r.pitch));
    const double sp = std::sin(deg_to_rad(r.pitch));
    Vec3 b{cp * a.x - sp * a.z, a.y, sp * a.x + cp * a.z};

    const double cy = std::cos(deg_to_rad(r.yaw));
    const double sy = std::sin(deg_to_rad(r.yaw));
    return {cy * b.x - sy * b.y, sy * b.x + cy * b.y, b.z};
}

Vec3 rodrigues_rotate(const Vec3& v, double theta_deg, const Vec3& axis) {
    if (std::abs(axis.length() - 1.0) > 1e-9)
        throw Error("non-unit-axis", "rotation axis must be unit length");
    const double t = deg_to_rad(theta_deg);
    const double c = std::cos(t);
    const double s = std::sin(t);
    const Vec3 k_cross_v = cross(axis, v);
    const double k_dot_v = dot(axis, v);
    return v * c + k_cross_v * s + axis * (k_dot_v * (1.0 - c));
}

} // namespace cutkit
