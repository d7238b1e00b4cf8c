#include "quadstack/gait.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace quadstack {

namespace {

void append_number(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

Vec2 hip_projection(const BodyState& base, const RobotModel& model, int leg) {
    double c = std::cos(base.yaw), s = std::sin(base.yaw);
    const Vec3& h = model.hip_offset[leg];
    return Vec2(base.position.x() + c * h.x() - s * h.y(),
                base.position.y() + s * h.x() + c * h.y());
}

}  // namespace

bool GaitPattern::valid() const {
    if (cycle_duration <= 0.0 || duty_factor <= 0.0 || duty_factor > 1.0) return false;
    if (full_stance_fraction < 0.0 || full_stance_fraction >= 1.0) return false;
    if (step_height < 0.0) return false;
    for (int leg = 0; leg < kNumLegs; ++leg) {
        if (phase_offset[leg] < 0.0 || phase_offset[leg] >= 1.0) return false;
        if (swing_start(leg) + swing_fraction() > 1.0 + 1e-12) return false;
    }
    return true;
}

GaitPlan plan_gait(const BodyState& start, const BodyState& goal,
                   std::shared_ptr<const HeightMap> terrain, const GaitPattern& pattern,
                   const RobotModel& model, const PlannerParams& params,
                   const std::optional<std::array<Vec3, kNumLegs>>& initial_feet) {
    if (!terrain) throw std::invalid_argument("plan_gait: terrain is required");
    if (!pattern.valid()) throw std::invalid_argument("plan_gait: invalid gait pattern");
    if (!terrain->contains(start.position.x(), start.position.y()))
        throw BoundsError("plan_gait: start out of terrain bounds", start.position.x(),
                          start.position.y());
    if (!terrain->contains(goal.position.x(), goal.position.y()))
        throw BoundsError("plan_gait: goal out of terrain bounds", goal.position.x(),
                          goal.position.y());

    const HeightMap& map = *terrain;
    const Vec2 start_xy(start.position.x(), start.position.y());
    const Vec2 goal_xy(goal.position.x(), goal.position.y());
    const Vec2 delta_xy = goal_xy - start_xy;
    const double dist = delta_xy.norm();
    const double dyaw = wrap_angle(goal.yaw - start.yaw);
    const bool stationary = dist < 1e-9 && std::abs(dyaw) < 1e-9;

    int n_cycles = 1;
    if (!stationary) {
        double needed = std::max(dist / params.nominal_stride,
                                 std::abs(dyaw) / params.nominal_yaw_rate);
        n_cycles = std::max(1, static_cast<int>(std::ceil(needed - 1e-9)));
    }
    const double T = pattern.cycle_duration;
    const int npc = std::max(2, static_cast<int>(std::lround(T / params.node_dt)));
    const double dt = T / npc;
    const int n_nodes = n_cycles * npc + 1;
    const double duration = n_cycles * T;

    auto base_at = [&](double t) {
        BodyState b;
        double u = duration > 0.0 ? t / duration : 0.0;
        double sigma = smoothstep(u);
        Vec2 xy = start_xy + sigma * delta_xy;
        b.position.x() = xy.x();
        b.position.y() = xy.y();
        b.position.z() = height_at_clamped(map, xy.x(), xy.y()) + model.standing_height;
        b.yaw = start.yaw + sigma * dyaw;
        double dsigma = smoothstep_deriv(u) / duration;
        b.linear_velocity = Vec3(dsigma * delta_xy.x(), dsigma * delta_xy.y(), 0.0);
        b.angular_velocity = Vec3(0.0, 0.0, dsigma * dyaw);
        return b;
    };

    // Initial footholds: carried in from a seam when stitching, hip
    // projections of the start pose otherwise. z always comes from terrain.
    std::array<Vec3, kNumLegs> foothold;
    for (int leg = 0; leg < kNumLegs; ++leg) {
        Vec2 xy = initial_feet ? Vec2((*initial_feet)[leg].x(), (*initial_feet)[leg].y())
                               : hip_projection(start, model, leg);
        foothold[leg] = Vec3(xy.x(), xy.y(), height_at_clamped(map, xy.x(), xy.y()));
    }

    // Swing windows in node-index space; window edges land on stance nodes.
    struct Swing {
        double k0, k1;  // node-index window (exclusive at edges)
        Vec3 target;
    };
    std::array<std::vector<Swing>, kNumLegs> swings;
    const double stance_half = 0.5 * pattern.duty_factor * T;
    if (!stationary) {
        for (int leg = 0; leg < kNumLegs; ++leg) {
            for (int c = 0; c < n_cycles; ++c) {
                Swing s;
                s.k0 = (c + pattern.swing_start(leg)) * npc;
                s.k1 = s.k0 + pattern.swing_fraction() * npc;
                double t_touch = (s.k1 / npc) * T;
                BodyState ahead = base_at(std::min(t_touch + stance_half, duration));
                Vec2 xy = hip_projection(ahead, model, leg);
                s.target = Vec3(xy.x(), xy.y(), height_at_clamped(map, xy.x(), xy.y()));
                swings[leg].push_back(s);
            }
        }
    }

    GaitPlan plan;
    plan.dt = dt;
    plan.pattern = pattern;
    plan.terrain = terrain;
    plan.nodes.resize(n_nodes);

    std::array<size_t, kNumLegs> next_swing{};
    for (int k = 0; k < n_nodes; ++k) {
        TrajectoryNode& node = plan.nodes[k];
        node.t = k * dt;
        node.base = base_at(node.t);
        for (int leg = 0; leg < kNumLegs; ++leg) {
            // Advance past completed swings, committing their targets.
            while (next_swing[leg] < swings[leg].size() &&
                   k >= swings[leg][next_swing[leg]].k1 - 1e-6) {
                foothold[leg] = swings[leg][next_swing[leg]].target;
                ++next_swing[leg];
            }
            bool in_swing = next_swing[leg] < swings[leg].size() &&
                            k > swings[leg][next_swing[leg]].k0 + 1e-6 &&
                            k < swings[leg][next_swing[leg]].k1 - 1e-6;
            if (in_swing) {
                const Swing& s = swings[leg][next_swing[leg]];
                double u = std::clamp((k - s.k0) / (s.k1 - s.k0), 0.0, 1.0);
                double sigma = smoothstep(u);
                Vec3 p = foothold[leg] + sigma * (s.target - foothold[leg]);
                // sin^2 arc: zero vertical velocity at liftoff and touchdown.
                double arc = std::sin(M_PI * u);
                p.z() += pattern.step_height * arc * arc;
                node.feet[leg] = p;
                node.contact[leg] = false;
            } else {
                node.feet[leg] = foothold[leg];
                node.contact[leg] = true;
            }
        }
    }

    // Vertical base rate from the sampled terrain-following profile.
    for (int k = 0; k < n_nodes; ++k) {
        int ka = std::max(0, k - 1), kb = std::min(n_nodes - 1, k + 1);
        double dz = plan.nodes[kb].base.position.z() - plan.nodes[ka].base.position.z();
        plan.nodes[k].base.linear_velocity.z() = dz / ((kb - ka) * dt);
    }
    return plan;
}

FeasibilityVerdict check_feasibility(const GaitPlan& plan, const RobotModel& model,
                                     const HeightMap& terrain, const PlannerParams& params) {
    FeasibilityVerdict v;
    auto fail = [&](const std::string& reason, const std::string& detail) {
        v.feasible = false;
        if (std::find(v.reasons.begin(), v.reasons.end(), reason) == v.reasons.end())
            v.reasons.push_back(reason);
        if (v.detail.empty()) v.detail = detail;
    };

    std::array<double, kNumLegs> last_stance_z{};
    std::array<bool, kNumLegs> last_contact{};
    std::array<bool, kNumLegs> seen_contact{};

    for (const TrajectoryNode& node : plan.nodes) {
        Mat3 R = rotation_of(node.base);
        double ground_base =
            height_at_clamped(terrain, node.base.position.x(), node.base.position.y());
        if (node.base.position.z() - params.undercarriage_clearance < ground_base - 1e-9)
            fail("undercarriage collision",
                 "base z " + std::to_string(node.base.position.z()) + " over terrain " +
                     std::to_string(ground_base) + " at t=" + std::to_string(node.t));
        for (int leg = 0; leg < kNumLegs; ++leg) {
            const Vec3& foot = node.feet[leg];
            Vec3 hip_w = node.base.position + R * model.hip_offset[leg];
            double reach = (foot - hip_w).norm();
            if (reach > model.max_reach() - params.reach_margin)
                fail("reach exceeded", "leg " + std::to_string(leg) + " reach " +
                                           std::to_string(reach) + " at t=" + std::to_string(node.t));
            double ground = height_at_clamped(terrain, foot.x(), foot.y());
            if (node.contact[leg]) {
                if (std::abs(foot.z() - ground) > 1e-6)
                    fail("contact height mismatch",
                         "leg " + std::to_string(leg) + " foot z " + std::to_string(foot.z()) +
                             " vs terrain " + std::to_string(ground));
                // Footholds on cells with large neighbor deviation sit on
                // interpolation skirts where small slips change the support
                // height drastically.
                if (terrain.contains(foot.x(), foot.y()) &&
                    height_deviation(terrain, world_to_cell(terrain, foot.x(), foot.y())) >
                        params.max_step_height)
                    fail("foothold slope exceeded",
                         "leg " + std::to_string(leg) + " at (" + std::to_string(foot.x()) + ", " +
                             std::to_string(foot.y()) + ") t=" + std::to_string(node.t));
                if (seen_contact[leg] && !last_contact[leg]) {
                    // Touchdown: foothold-to-foothold height change.
                    if (std::abs(foot.z() - last_stance_z[leg]) > params.max_step_height)
                        fail("step height exceeded",
                             "leg " + std::to_string(leg) + " step " +
                                 std::to_string(std::abs(foot.z() - last_stance_z[leg])) +
                                 " at t=" + std::to_string(node.t));
                }
                last_stance_z[leg] = foot.z();
                seen_contact[leg] = true;
            } else {
                if (foot.z() < ground + params.swing_clearance - 1e-6)
                    fail("swing collision", "leg " + std::to_string(leg) + " foot z " +
                                                std::to_string(foot.z()) + " under terrain " +
                                                std::to_string(ground) +
                                                " at t=" + std::to_string(node.t));
            }
            last_contact[leg] = node.contact[leg];
        }
    }
    return v;
}

TrajectoryNode sample(const GaitPlan& plan, double t) {
    if (plan.nodes.empty()) throw std::out_of_range("sample: empty plan");
    double end = plan.end_time();
    if (t < -1e-9 || t > end + 1e-9)
        throw std::out_of_range("sample: t=" + std::to_string(t) + " outside [0, " +
                                std::to_string(end) + "]");
    t = std::clamp(t, 0.0, end);
    size_t k = std::min(static_cast<size_t>(t / plan.dt),
                        plan.nodes.size() >= 2 ? plan.nodes.size() - 2 : size_t{0});
    const TrajectoryNode& a = plan.nodes[k];
    const TrajectoryNode& b = plan.nodes[std::min(k + 1, plan.nodes.size() - 1)];
    double u = (b.t > a.t) ? std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0) : 0.0;

    TrajectoryNode out;
    out.t = t;
    out.base.position = a.base.position + u * (b.base.position - a.base.position);
    out.base.yaw = a.base.yaw + u * wrap_angle(b.base.yaw - a.base.yaw);
    out.base.pitch = a.base.pitch + u * (b.base.pitch - a.base.pitch);
    out.base.roll = a.base.roll + u * (b.base.roll - a.base.roll);
    out.base.linear_velocity =
        a.base.linear_velocity + u * (b.base.linear_velocity - a.base.linear_velocity);
    out.base.angular_velocity =
        a.base.angular_velocity + u * (b.base.angular_velocity - a.base.angular_velocity);
    for (int leg = 0; leg < kNumLegs; ++leg) {
        out.feet[leg] = a.feet[leg] + u * (b.feet[leg] - a.feet[leg]);
        out.contact[leg] = a.contact[leg];
    }
    return out;
}

std::vector<double> full_contact_nodes(const GaitPlan& plan) {
    std::vector<double> times;
    for (const auto& node : plan.nodes) {
        if (node.contact[0] && node.contact[1] && node.contact[2] && node.contact[3])
            times.push_back(node.t);
    }
    return times;
}

std::string gait_plan_to_csv(const GaitPlan& plan) {
    std::string out =
        "t,px,py,pz,qw,qx,qy,qz,vx,vy,vz,wx,wy,wz,"
        "f0x,f0y,f0z,f1x,f1y,f1z,f2x,f2y,f2z,f3x,f3y,f3z,c0,c1,c2,c3\n";
    for (const auto& node : plan.nodes) {
        append_number(out, node.t);
        auto quat = quaternion_from_ypr(node.base.yaw, node.base.pitch, node.base.roll);
        const double pose[7] = {node.base.position.x(), node.base.position.y(),
                                node.base.position.z(), quat[0], quat[1], quat[2], quat[3]};
        for (double v : pose) {
            out += ',';
            append_number(out, v);
        }
        const Vec3& lv = node.base.linear_velocity;
        const Vec3& av = node.base.angular_velocity;
        const double twist[6] = {lv.x(), lv.y(), lv.z(), av.x(), av.y(), av.z()};
        for (double v : twist) {
            out += ',';
            append_number(out, v);
        }
        for (int leg = 0; leg < kNumLegs; ++leg)
            for (int i = 0; i < 3; ++i) {
                out += ',';
                append_number(out, node.feet[leg][i]);
            }
        for (int leg = 0; leg < kNumLegs; ++leg) out += node.contact[leg] ? ",1" : ",0";
        out += '\n';
    }
    return out;
}

GaitPlan gait_plan_from_csv(std::istream& in) {
    GaitPlan plan;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty gait plan CSV", 1);
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> vals;
        size_t pos = 0;
        while (pos <= line.size()) {
            size_t comma = line.find(',', pos);
            std::string tok = line.substr(pos, comma == std::string::npos ? comma : comma - pos);
            double v;
            auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc{})
                throw ParseError("bad number in gait CSV at line " + std::to_string(line_no),
                                 line_no);
            vals.push_back(v);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (vals.size() != 30)
            throw ParseError("expected 30 columns at line " + std::to_string(line_no), line_no);
        TrajectoryNode node;
        node.t = vals[0];
        node.base.position = Vec3(vals[1], vals[2], vals[3]);
        auto ypr = ypr_from_quaternion(vals[4], vals[5], vals[6], vals[7]);
        node.base.yaw = ypr[0];
        node.base.pitch = ypr[1];
        node.base.roll = ypr[2];
        node.base.linear_velocity = Vec3(vals[8], vals[9], vals[10]);
        node.base.angular_velocity = Vec3(vals[11], vals[12], vals[13]);
        for (int leg = 0; leg < kNumLegs; ++leg) {
            node.feet[leg] = Vec3(vals[14 + leg * 3], vals[15 + leg * 3], vals[16 + leg * 3]);
            node.contact[leg] = vals[26 + leg] != 0.0;
        }
        plan.nodes.push_back(node);
    }
    if (plan.nodes.size() >= 2) plan.dt = plan.nodes[1].t - plan.nodes[0].t;
    return plan;
}

}  // namespace quadstack
