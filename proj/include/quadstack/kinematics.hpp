#pragma once

#include "quadstack/robot_model.hpp"

namespace quadstack {

struct IkParams {
    double lambda = 1.0;        // update step factor
    double tolerance = 1e-4;    // m
    int max_iterations = 50;
    double damping_mu = 1e-6;   // regularizer on J^T J
};

struct IkResult {
    std::array<double, 3> q;
    bool converged = false;
    int iterations = 0;
    double final_error = 0.0;  // m
};

// Foot position in the base frame: hip offset, abduction rotation about x,
// then a planar two-link chain in the abducted sagittal plane.
Vec3 forward_kinematics_leg(const RobotModel& model, int leg, const std::array<double, 3>& q_leg);

// d(foot)/d(q_leg), analytic.
Mat3 leg_jacobian(const RobotModel& model, int leg, const std::array<double, 3>& q_leg);

// Damped least-squares velocity solution: (J^T J + mu I) dq = J^T e.
Vec3 ik_velocity(const RobotModel& model, int leg, const std::array<double, 3>& q_leg,
                 const Vec3& error, double damping_mu = 1e-6);

// Iterative damped least-squares IK; iterates are clamped to joint limits.
// Non-convergence is reported, not thrown.
IkResult ik_dls(const RobotModel& model, int leg, const Vec3& target,
                const std::array<double, 3>& q_init, const IkParams& params = {});

}  // namespace quadstack
