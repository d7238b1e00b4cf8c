#pragma once

#include <array>
#include <string>

#include "quadstack/core.hpp"

namespace quadstack {

// Kinematic and actuation parameters of a 12-DoF quadruped. All numbers are
// configuration, loadable from a JSON model file.
struct RobotModel {
    std::array<Vec3, kNumLegs> hip_offset;  // base frame
    double upper_length = 0.2;              // m
    double lower_length = 0.2;              // m
    std::array<double, kNumJoints> q_min;
    std::array<double, kNumJoints> q_max;
    std::array<double, kNumJoints> axis_sign;  // +1 clockwise, -1 counter-clockwise
    double reduction_ratio = 9.0;              // motor revs per joint rev
    double torque_limit = 2.7;                 // N*m
    double velocity_limit = 10.0;              // rad/s reference clamp
    double standing_height = 0.30;             // nominal base height above terrain

    double max_reach() const { return upper_length + lower_length; }

    // Hip/knee angles that put the foot straight under the hip at the
    // standing height (knee folded back).
    std::array<double, 3> nominal_stance_q() const;
};

RobotModel default_robot_model();

RobotModel load_robot_model(const std::string& path);
void save_robot_model(const RobotModel& model, const std::string& path);

}  // namespace quadstack
