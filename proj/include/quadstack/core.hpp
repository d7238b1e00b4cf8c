#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace quadstack {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr int kNumLegs = 4;
inline constexpr int kNumJoints = 12;

// Leg indexing used throughout: 0=front-left, 1=front-right, 2=hind-left,
// 3=hind-right. Joints per leg: abduction, hip, knee.
enum Leg { FL = 0, FR = 1, HL = 2, HR = 3 };

struct CellIndex {
    int row = 0;
    int col = 0;
    friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

// Base pose + twist. Orientation stored as yaw-pitch-roll (Z-Y-X intrinsic).
struct BodyState {
    Vec3 position{0.0, 0.0, 0.0};
    double yaw = 0.0;
    double pitch = 0.0;
    double roll = 0.0;
    Vec3 linear_velocity{0.0, 0.0, 0.0};
    Vec3 angular_velocity{0.0, 0.0, 0.0};
};

struct JointState {
    std::array<double, kNumJoints> q{};
    std::array<double, kNumJoints> dq{};
};

struct ParseError : std::runtime_error {
    int line;
    ParseError(const std::string& msg, int line_)
        : std::runtime_error(msg), line(line_) {}
};

struct BoundsError : std::runtime_error {
    double x, y;
    BoundsError(const std::string& msg, double x_, double y_)
        : std::runtime_error(msg), x(x_), y(y_) {}
};

inline double wrap_angle(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a < 0.0) a += 2.0 * M_PI;
    return a - M_PI;
}

// Smooth time scaling with zero slope at both ends.
inline double smoothstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * (3.0 - 2.0 * u);
}

inline double smoothstep_deriv(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return 6.0 * u * (1.0 - u);
}

inline Mat3 rotation_zyx(double yaw, double pitch, double roll) {
    return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
            Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
            Eigen::AngleAxisd(roll, Vec3::UnitX()))
        .toRotationMatrix();
}

inline Mat3 rotation_of(const BodyState& b) {
    return rotation_zyx(b.yaw, b.pitch, b.roll);
}

// (w, x, y, z) from yaw-pitch-roll.
inline std::array<double, 4> quaternion_from_ypr(double yaw, double pitch, double roll) {
    Eigen::Quaterniond q(Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                         Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                         Eigen::AngleAxisd(roll, Vec3::UnitX()));
    return {q.w(), q.x(), q.y(), q.z()};
}

// Inverse of quaternion_from_ypr for the Z-Y-X convention.
inline std::array<double, 3> ypr_from_quaternion(double w, double x, double y, double z) {
    Eigen::Quaterniond q(w, x, y, z);
    q.normalize();
    Mat3 r = q.toRotationMatrix();
    double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
    double yaw = std::atan2(r(1, 0), r(0, 0));
    double roll = std::atan2(r(2, 1), r(2, 2));
    return {yaw, pitch, roll};
}

}  // namespace quadstack
