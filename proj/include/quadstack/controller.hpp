#pragma once

#include <memory>

#include "quadstack/gait.hpp"
#include "quadstack/kinematics.hpp"
#include "quadstack/packets.hpp"

namespace quadstack {

struct Gains {
    std::array<double, kNumJoints> kp{};
    std::array<double, kNumJoints> kd{};
    static Gains uniform(double kp, double kd) {
        Gains g;
        g.kp.fill(kp);
        g.kd.fill(kd);
        return g;
    }
};

struct JointReference {
    std::array<double, kNumJoints> q_ref{};
    std::array<double, kNumJoints> dq_ref{};
    ControlMode mode = ControlMode::onboard_pd;
    bool degraded = false;  // some leg fell back to its previous reference
};

// IK pass over one trajectory node: node feet are transformed into the base
// frame of the node pose, q_ref comes from damped least squares seeded at the
// measured joints, dq_ref from the velocity solution of the per-tick
// displacement error. A leg whose IK does not converge holds its previous
// reference and sets the degraded flag.
JointReference node_to_joint_reference(const RobotModel& model, const TrajectoryNode& node,
                                       const JointState& state, const IkParams& params, double dt,
                                       ControlMode mode,
                                       const JointReference* previous = nullptr);

// tau = kp (q_ref - q) + kd (dq_ref - dq), clamped to the model torque limit.
std::array<double, kNumJoints> pd_torque(const Gains& gains, const JointReference& ref,
                                         const JointState& state, double torque_limit);

// 1 kHz reference pipeline: samples the active plan, runs IK, and emits one
// command packet per tick. After the plan ends the last position reference is
// held with zero velocity.
class Controller {
public:
    Controller(RobotModel model, Gains gains, IkParams ik_params, ControlMode mode,
               double tick_dt = 0.001, double stance_press = 0.006);

    // Plan handoff; only legal at full-contact times (contract shared with
    // the global planner's stitcher).
    void set_plan(std::shared_ptr<const GaitPlan> plan, double plan_start_time);
    const std::shared_ptr<const GaitPlan>& plan() const { return plan_; }
    double plan_start_time() const { return plan_start_; }

    CommandPacket tick(double sim_time, const JointState& measured);

    const JointReference& last_reference() const { return last_ref_; }
    const TrajectoryNode& last_node() const { return last_node_; }
    long ticks() const { return ticks_; }
    long degraded_ticks() const { return degraded_ticks_; }
    const Gains& gains() const { return gains_; }
    double stance_press() const { return stance_press_; }

private:
    RobotModel model_;
    Gains gains_;
    IkParams ik_params_;
    ControlMode mode_;
    double tick_dt_;
    double stance_press_;  // m pressed below terrain on stance feet
    std::shared_ptr<const GaitPlan> plan_;
    double plan_start_ = 0.0;
    JointReference last_ref_;
    TrajectoryNode last_node_;
    bool have_ref_ = false;
    long ticks_ = 0;
    long degraded_ticks_ = 0;
    uint32_t sequence_ = 0;
};

}  // namespace quadstack
