#include "quadstack/global_planner.hpp"

#include <algorithm>
#include <cmath>

namespace quadstack {

SegmentGoal next_segment_goal(const GlobalPath& path, const BodyState& current,
                              const StitchSchedule& schedule, const HeightMap& map,
                              double standing_height) {
    SegmentGoal out;
    out.start = current;
    double s_cur = path.project(current.position.x(), current.position.y());
    out.s_goal = std::min(s_cur + schedule.step_size, path.total_length);
    out.at_end = out.s_goal >= path.total_length - 1e-9;
    Vec2 p = path.point_at(out.s_goal);
    out.goal.position =
        Vec3(p.x(), p.y(), height_at_clamped(map, p.x(), p.y()) + standing_height);
    out.goal.yaw = path.heading_at(out.s_goal);
    return out;
}

GaitPlan stitch(const GaitPlan& current, const GaitPlan& next, double at, double tolerance) {
    if (current.nodes.empty() || next.nodes.empty())
        throw std::invalid_argument("stitch: empty plan");
    if (std::abs(current.dt - next.dt) > 1e-12)
        throw std::invalid_argument("stitch: node spacing mismatch");

    size_t k = static_cast<size_t>(std::lround(at / current.dt));
    if (k >= current.nodes.size() || std::abs(current.nodes[k].t - at) > 1e-9)
        throw std::invalid_argument("stitch: 'at' is not on the node grid");
    const TrajectoryNode& seam = current.nodes[k];
    for (int leg = 0; leg < kNumLegs; ++leg)
        if (!seam.contact[leg])
            throw std::invalid_argument("stitch: 'at' is not a full-contact time");

    const TrajectoryNode& head = next.nodes.front();
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
        d = std::max(d, std::abs(seam.base.position[i] - head.base.position[i]));
    d = std::max(d, std::abs(wrap_angle(seam.base.yaw - head.base.yaw)));
    for (int leg = 0; leg < kNumLegs; ++leg)
        for (int i = 0; i < 3; ++i)
            d = std::max(d, std::abs(seam.feet[leg][i] - head.feet[leg][i]));
    if (d > tolerance)
        throw StitchError("stitch: seam mismatch " + std::to_string(d) + " exceeds tolerance " +
                              std::to_string(tolerance),
                          d);

    GaitPlan out;
    out.dt = next.dt;
    out.pattern = next.pattern;
    out.terrain = next.terrain ? next.terrain : current.terrain;
    out.nodes.assign(current.nodes.begin(), current.nodes.begin() + k + 1);
    for (size_t i = 1; i < next.nodes.size(); ++i) {
        TrajectoryNode node = next.nodes[i];
        node.t = at + i * out.dt;
        out.nodes.push_back(node);
    }
    return out;
}

ReplanDecision replan_trigger(const BodyState& current, const GaitPlan& plan, double t,
                              double deviation_threshold, const HeightMap& map,
                              double standing_height) {
    ReplanDecision out;
    TrajectoryNode ref = sample(plan, std::clamp(t, 0.0, plan.end_time()));
    double deviation = (current.position - ref.base.position).norm();
    if (deviation <= deviation_threshold) return out;
    out.replan = true;
    out.start = current;
    out.start.linear_velocity.setZero();
    out.start.angular_velocity.setZero();
    out.start.pitch = 0.0;
    out.start.roll = 0.0;
    out.start.position.z() =
        height_at_clamped(map, current.position.x(), current.position.y()) + standing_height;
    return out;
}

}  // namespace quadstack
