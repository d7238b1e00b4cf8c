#pragma once

#include "quadstack/controller.hpp"
#include "quadstack/heightmap.hpp"
#include "quadstack/packets.hpp"
#include "quadstack/robot_model.hpp"

namespace quadstack {

struct SimConfig {
    double dt = 0.001;                 // s
    double joint_inertia = 0.004;      // kg m^2 reflected at the joint
    double joint_damping = 0.06;       // N m s / rad
    double max_roll = 0.6;             // rad before the topple latch
    double max_pitch = 0.6;
    double bounds_margin = 0.0;        // m shaved off the map extent
    double contact_epsilon = 0.012;    // m foot-to-terrain band that can make contact
    double touch_velocity = 0.02;      // m/s max vertical rate at contact formation
    double lift_velocity = 0.05;       // m/s commanded upward rate that breaks contact
    double release_gap = 3e-3;         // m rise above the anchor that breaks contact
    double rotation_damping = 1e-2;    // regularizer on base rotation in the stance solve
    double min_stance_grace = 0.5;     // s allowed with < 2 stance feet
    double gravity = 9.81;
    uint64_t seed = 0;
    Gains onboard_gains = Gains::uniform(3.0, 0.05);  // used in onboard_pd mode
};

struct SimState {
    double time = 0.0;
    BodyState base;
    JointState joints;
    bool fallen = false;          // latched
    bool out_of_bounds = false;   // latched
    double understance_time = 0.0;
    std::array<bool, kNumLegs> stance{};   // sticky contact state
    std::array<Vec3, kNumLegs> anchor{};   // world contact points while in stance
};

// One fixed step of the deterministic plant: joint torques (from the packet
// or the onboard PD law), per-joint double integrator with viscous damping
// (semi-implicit Euler), then a base twist that keeps stance feet fixed in
// the world (least squares over stance-leg Jacobians). With no stance feet
// the base is ballistic under gravity. Failure flags latch.
SimState sim_step(const SimState& state, const CommandPacket& packet, const SimConfig& config,
                  const HeightMap& terrain, const RobotModel& model);

// Plant-side helper: measured state as the wire would report it.
SensorPacket make_sensor_packet(const SimState& state, uint32_t sequence_echo);

// Initial state: base at the given pose, joints solving the given world-frame
// feet (stance start).
SimState make_initial_state(const BodyState& base, const std::array<Vec3, kNumLegs>& feet,
                            const RobotModel& model);

}  // namespace quadstack
