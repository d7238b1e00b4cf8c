#include "quadstack/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace quadstack {

Vec3 forward_kinematics_leg(const RobotModel& model, int leg, const std::array<double, 3>& q) {
    double s0 = std::sin(q[0]), c0 = std::cos(q[0]);
    double lu = model.upper_length, ll = model.lower_length;
    double x_sag = lu * std::sin(q[1]) + ll * std::sin(q[1] + q[2]);
    double z_ch = -lu * std::cos(q[1]) - ll * std::cos(q[1] + q[2]);
    return model.hip_offset[leg] + Vec3(x_sag, -s0 * z_ch, c0 * z_ch);
}

Mat3 leg_jacobian(const RobotModel& model, int leg, const std::array<double, 3>& q) {
    (void)leg;
    double s0 = std::sin(q[0]), c0 = std::cos(q[0]);
    double lu = model.upper_length, ll = model.lower_length;
    double s12 = std::sin(q[1] + q[2]), c12 = std::cos(q[1] + q[2]);
    double x_sag = lu * std::sin(q[1]) + ll * s12;
    double z_ch = -lu * std::cos(q[1]) - ll * c12;
    double dx1 = lu * std::cos(q[1]) + ll * c12;  // dx_sag/dq1
    Mat3 J;
    J.col(0) = Vec3(0.0, -c0 * z_ch, -s0 * z_ch);
    J.col(1) = Vec3(dx1, -s0 * x_sag, c0 * x_sag);
    J.col(2) = Vec3(ll * c12, -s0 * ll * s12, c0 * ll * s12);
    return J;
}

Vec3 ik_velocity(const RobotModel& model, int leg, const std::array<double, 3>& q,
                 const Vec3& error, double damping_mu) {
    Mat3 J = leg_jacobian(model, leg, q);
    Mat3 A = J.transpose() * J + damping_mu * Mat3::Identity();
    return A.ldlt().solve(J.transpose() * error);
}

IkResult ik_dls(const RobotModel& model, int leg, const Vec3& target,
                const std::array<double, 3>& q_init, const IkParams& params) {
    IkResult res;
    res.q = q_init;
    Vec3 e = target - forward_kinematics_leg(model, leg, res.q);
    for (int it = 0; it < params.max_iterations; ++it) {
        if (e.norm() < params.tolerance) break;
        Vec3 dq = ik_velocity(model, leg, res.q, e, params.damping_mu);
        for (int j = 0; j < 3; ++j) {
            res.q[j] = std::clamp(res.q[j] + params.lambda * dq[j], model.q_min[leg * 3 + j],
                                  model.q_max[leg * 3 + j]);
        }
        res.iterations = it + 1;
        e = target - forward_kinematics_leg(model, leg, res.q);
    }
    res.final_error = e.norm();
    res.converged = res.final_error < params.tolerance;
    return res;
}

}  // namespace quadstack
