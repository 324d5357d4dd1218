#pragma once

#include <cmath>

namespace cutkit {

// All spatial math runs in a left-handed, Z-up world: +X east, +Y north,
// +Z up, positions in centimeters, angles in degrees.

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }

    double length() const { return std::sqrt(x * x + y * y + z * z); }
    double length_xy() const { return std::sqrt(x * x + y * y); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

// Throws cutkit::Error("zero-length-vector") on a null vector.
Vec3 normalized(const Vec3& v);

constexpr Vec3 kWorldUp{0.0, 0.0, 1.0};

// Euler angles in degrees, normalized to (-180, 180] on construction.
struct Rotator {
    double pitch = 0.0;
    double yaw = 0.0;
    double roll = 0.0;

    Rotator() = default;
    Rotator(double pitch_deg, double yaw_deg, double roll_deg);

    bool operator==(const Rotator& o) const {
        return pitch == o.pitch && yaw == o.yaw && roll == o.roll;
    }
};

// Maps any finite angle into (-180, 180].
double normalize_angle(double degrees);

// Rotation that aims a camera at `origin` toward `target`: yaw = atan2(dy, dx),
// pitch = atan2(dz, horizontal distance), roll always 0.
// Throws Error("coincident-points") when origin == target.
Rotator look_at_rotation(const Vec3& origin, const Vec3& target);

// Unit forward vector of a rotation; inverse of look_at_rotation for roll 0.
Vec3 forward_vector(const Rotator& r);

// Applies yaw, then pitch, then roll to `v` (column-vector convention chosen so
// that apply_rotation(r, (1,0,0)) == forward_vector(r)).
Vec3 apply_rotation(const Rotator& r, const Vec3& v);

// Rodrigues rotation of `v` by `theta_deg` around unit axis `axis`.
// Throws Error("non-unit-axis") unless |axis| == 1 within 1e-9.
Vec3 rodrigues_rotate(const Vec3& v, double theta_deg, const Vec3& axis);

} // namespace cutkit
