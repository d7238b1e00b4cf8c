#include "quadstack/controller.hpp"

#include <algorithm>
#include <cmath>

namespace quadstack {

JointReference node_to_joint_reference(const RobotModel& model, const TrajectoryNode& node,
                                       const JointState& state, const IkParams& params, double dt,
                                       ControlMode mode, const JointReference* previous) {
    JointReference ref;
    ref.mode = mode;
    Mat3 R = rotation_of(node.base);
    for (int leg = 0; leg < kNumLegs; ++leg) {
        Vec3 x_des = R.transpose() * (node.feet[leg] - node.base.position);
        std::array<double, 3> q_cur{state.q[leg * 3], state.q[leg * 3 + 1], state.q[leg * 3 + 2]};
        IkResult ik = ik_dls(model, leg, x_des, q_cur, params);
        if (ik.converged) {
            Vec3 e = x_des - forward_kinematics_leg(model, leg, q_cur);
            Vec3 dq = ik_velocity(model, leg, q_cur, e, params.damping_mu) / dt;
            for (int j = 0; j < 3; ++j) {
                ref.q_ref[leg * 3 + j] = ik.q[j];
                ref.dq_ref[leg * 3 + j] =
                    std::clamp(dq[j], -model.velocity_limit, model.velocity_limit);
            }
        } else {
            ref.degraded = true;
            for (int j = 0; j < 3; ++j) {
                int idx = leg * 3 + j;
                ref.q_ref[idx] = previous ? previous->q_ref[idx] : state.q[idx];
                ref.dq_ref[idx] = 0.0;
            }
        }
    }
    return ref;
}

std::array<double, kNumJoints> pd_torque(const Gains& gains, const JointReference& ref,
                                         const JointState& state, double torque_limit) {
    std::array<double, kNumJoints> tau;
    for (int j = 0; j < kNumJoints; ++j) {
        double t = gains.kp[j] * (ref.q_ref[j] - state.q[j]) +
                   gains.kd[j] * (ref.dq_ref[j] - state.dq[j]);
        tau[j] = std::clamp(t, -torque_limit, torque_limit);
    }
    return tau;
}

Controller::Controller(RobotModel model, Gains gains, IkParams ik_params, ControlMode mode,
                       double tick_dt, double stance_press)
    : model_(std::move(model)), gains_(gains), ik_params_(ik_params), mode_(mode),
      tick_dt_(tick_dt), stance_press_(stance_press) {}

void Controller::set_plan(std::shared_ptr<const GaitPlan> plan, double plan_start_time) {
    plan_ = std::move(plan);
    plan_start_ = plan_start_time;
}

CommandPacket Controller::tick(double sim_time, const JointState& measured) {
    ++ticks_;
    bool exhausted = true;
    if (plan_ && !plan_->nodes.empty()) {
        double t_plan = sim_time - plan_start_;
        if (t_plan <= plan_->end_time() + 1e-9) {
            last_node_ = sample(*plan_, std::clamp(t_plan, 0.0, plan_->end_time()));
            // Command the base frame slightly above the plan: stance legs
            // stay pressed into their contacts while swing arcs still land
            // at the planned terrain height.
            TrajectoryNode target = last_node_;
            target.base.position.z() += stance_press_;
            JointReference ref = node_to_joint_reference(model_, target, measured, ik_params_,
                                                         tick_dt_, mode_,
                                                         have_ref_ ? &last_ref_ : nullptr);
            if (ref.degraded) ++degraded_ticks_;
            last_ref_ = ref;
            have_ref_ = true;
            exhausted = false;
        }
    }
    if (exhausted) {
        // Hold the final reference (or the measured pose before any plan).
        if (!have_ref_) {
            last_ref_.q_ref = measured.q;
            last_ref_.mode = mode_;
            have_ref_ = true;
        }
        last_ref_.dq_ref.fill(0.0);
        last_ref_.degraded = false;
    }

    CommandPacket packet;
    packet.mode = mode_;
    packet.sequence = sequence_++;
    if (mode_ == ControlMode::onboard_pd) {
        for (int j = 0; j < kNumJoints; ++j) {
            packet.q_ref[j] = static_cast<float>(last_ref_.q_ref[j]);
            packet.dq_ref[j] = static_cast<float>(last_ref_.dq_ref[j]);
        }
    } else {
        auto tau = pd_torque(gains_, last_ref_, measured, model_.torque_limit);
        for (int j = 0; j < kNumJoints; ++j) packet.torque[j] = static_cast<float>(tau[j]);
    }
    return packet;
}

}  // namespace quadstack
