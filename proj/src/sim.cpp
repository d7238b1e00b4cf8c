#include "quadstack/sim.hpp"

#include <algorithm>
#include <cmath>

#include "quadstack/kinematics.hpp"

namespace quadstack {

SimState sim_step(const SimState& state, const CommandPacket& packet, const SimConfig& config,
                  const HeightMap& terrain, const RobotModel& model) {
    SimState next = state;
    const double dt = config.dt;

    // Joint torques.
    std::array<double, kNumJoints> tau;
    if (packet.mode == ControlMode::torque) {
        for (int j = 0; j < kNumJoints; ++j)
            tau[j] = std::clamp(static_cast<double>(packet.torque[j]), -model.torque_limit,
                                model.torque_limit);
    } else {
        JointReference ref;
        for (int j = 0; j < kNumJoints; ++j) {
            ref.q_ref[j] = packet.q_ref[j];
            ref.dq_ref[j] = packet.dq_ref[j];
        }
        tau = pd_torque(config.onboard_gains, ref, state.joints, model.torque_limit);
    }

    // Per-joint double integrator, semi-implicit Euler, hard stops at limits.
    for (int j = 0; j < kNumJoints; ++j) {
        double ddq = (tau[j] - config.joint_damping * state.joints.dq[j]) / config.joint_inertia;
        next.joints.dq[j] = state.joints.dq[j] + ddq * dt;
        next.joints.q[j] = state.joints.q[j] + next.joints.dq[j] * dt;
        if (next.joints.q[j] < model.q_min[j]) {
            next.joints.q[j] = model.q_min[j];
            next.joints.dq[j] = 0.0;
        } else if (next.joints.q[j] > model.q_max[j]) {
            next.joints.q[j] = model.q_max[j];
            next.joints.dq[j] = 0.0;
        }
    }

    // Sticky contact with hysteresis: a swinging foot makes contact when it
    // reaches the ground and is anchored there; contact breaks only when the
    // leg pulls the foot above its anchor. Liftoff and touchdown transients
    // therefore cannot flap the constraint set.
    Mat3 R = rotation_of(state.base);
    std::array<Vec3, kNumLegs> foot_rel;  // base->foot in world axes
    std::array<Vec3, kNumLegs> foot_vel_rel;
    int n_stance = 0;
    for (int leg = 0; leg < kNumLegs; ++leg) {
        std::array<double, 3> q{next.joints.q[leg * 3], next.joints.q[leg * 3 + 1],
                                next.joints.q[leg * 3 + 2]};
        foot_rel[leg] = R * forward_kinematics_leg(model, leg, q);
        Vec3 dq(next.joints.dq[leg * 3], next.joints.dq[leg * 3 + 1],
                next.joints.dq[leg * 3 + 2]);
        foot_vel_rel[leg] = R * (leg_jacobian(model, leg, q) * dq);
        Vec3 foot_w = state.base.position + foot_rel[leg];
        if (state.stance[leg]) {
            bool lifting = foot_vel_rel[leg].z() > config.lift_velocity;
            next.stance[leg] =
                !lifting && foot_w.z() <= state.anchor[leg].z() + config.release_gap;
            next.anchor[leg] = state.anchor[leg];
        } else {
            double ground = height_at_clamped(terrain, foot_w.x(), foot_w.y());
            double vz_est = state.base.linear_velocity.z() +
                            state.base.angular_velocity.cross(foot_rel[leg]).z() +
                            foot_vel_rel[leg].z();
            // Gentle touchdown inside the capture band, or outright
            // penetration (a slamming foot stops at the ground).
            bool touchdown = foot_w.z() <= ground + config.contact_epsilon &&
                             std::abs(vz_est) <= config.touch_velocity;
            bool penetrating = foot_w.z() < ground - config.contact_epsilon;
            next.stance[leg] = touchdown || penetrating;
            if (next.stance[leg]) next.anchor[leg] = Vec3(foot_w.x(), foot_w.y(), ground);
        }
        if (next.stance[leg]) ++n_stance;
    }

    if (n_stance > 0) {
        // Base twist keeping stance feet world-fixed:
        //   v + w x r_i = -R J_i dq_i   for each stance leg i.
        Eigen::MatrixXd A(3 * n_stance, 6);
        Eigen::VectorXd b(3 * n_stance);
        int row = 0;
        for (int leg = 0; leg < kNumLegs; ++leg) {
            if (!next.stance[leg]) continue;
            const Vec3& r = foot_rel[leg];
            Mat3 skew;
            skew << 0, -r.z(), r.y(), r.z(), 0, -r.x(), -r.y(), r.x(), 0;
            A.block<3, 3>(row, 0) = Mat3::Identity();
            A.block<3, 3>(row, 3) = -skew;  // w x r = -skew(r) w
            b.segment<3>(row) = -foot_vel_rel[leg];
            row += 3;
        }
        // Damped least squares, rotation damped harder: under-determined or
        // inconsistent contact sets (two-leg stance, touchdown transients)
        // resolve into translation before attitude.
        Eigen::Matrix<double, 6, 6> H = A.transpose() * A;
        for (int i = 0; i < 3; ++i) H(i, i) += 1e-9;
        for (int i = 3; i < 6; ++i) H(i, i) += config.rotation_damping;
        Eigen::Matrix<double, 6, 1> vw = H.ldlt().solve(A.transpose() * b);
        next.base.linear_velocity = vw.segment<3>(0);
        next.base.angular_velocity = vw.segment<3>(3);
    } else {
        next.base.linear_velocity = state.base.linear_velocity;
        next.base.linear_velocity.z() -= config.gravity * dt;
        next.base.angular_velocity = state.base.angular_velocity;
    }

    next.base.position = state.base.position + next.base.linear_velocity * dt;
    next.base.roll = state.base.roll + next.base.angular_velocity.x() * dt;
    next.base.pitch = state.base.pitch + next.base.angular_velocity.y() * dt;
    next.base.yaw = state.base.yaw + next.base.angular_velocity.z() * dt;

    // Failure latches.
    next.understance_time = n_stance < 2 ? state.understance_time + dt : 0.0;
    if (std::abs(next.base.roll) > config.max_roll || std::abs(next.base.pitch) > config.max_pitch ||
        next.understance_time > config.min_stance_grace)
        next.fallen = true;
    next.fallen = next.fallen || state.fallen;
    double m = config.bounds_margin;
    if (next.base.position.x() < terrain.min_x() + m || next.base.position.x() > terrain.max_x() - m ||
        next.base.position.y() < terrain.min_y() + m || next.base.position.y() > terrain.max_y() - m)
        next.out_of_bounds = true;
    next.out_of_bounds = next.out_of_bounds || state.out_of_bounds;

    next.time = state.time + dt;
    return next;
}

SensorPacket make_sensor_packet(const SimState& state, uint32_t sequence_echo) {
    SensorPacket p;
    p.sequence = sequence_echo;
    for (int j = 0; j < kNumJoints; ++j) {
        p.q[j] = static_cast<float>(state.joints.q[j]);
        p.dq[j] = static_cast<float>(state.joints.dq[j]);
    }
    p.imu_rates[0] = static_cast<float>(state.base.angular_velocity.x());
    p.imu_rates[1] = static_cast<float>(state.base.angular_velocity.y());
    p.imu_rates[2] = static_cast<float>(state.base.angular_velocity.z());
    return p;
}

SimState make_initial_state(const BodyState& base, const std::array<Vec3, kNumLegs>& feet,
                            const RobotModel& model) {
    SimState s;
    s.base = base;
    s.base.linear_velocity.setZero();
    s.base.angular_velocity.setZero();
    Mat3 R = rotation_of(base);
    IkParams params;
    params.max_iterations = 200;
    for (int leg = 0; leg < kNumLegs; ++leg) {
        Vec3 x_des = R.transpose() * (feet[leg] - base.position);
        IkResult ik = ik_dls(model, leg, x_des, model.nominal_stance_q(), params);
        for (int j = 0; j < 3; ++j) s.joints.q[leg * 3 + j] = ik.q[j];
        s.stance[leg] = true;
        s.anchor[leg] = feet[leg];
    }
    return s;
}

}  // namespace quadstack
