#include "quadstack/episode.hpp"

#include <charconv>
#include <cmath>
#include <json.hpp>

namespace quadstack {

namespace {

void append_number(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

void append_pose(std::string& out, const BodyState& b) {
    const double vals[6] = {b.position.x(), b.position.y(), b.position.z(),
                            b.yaw,          b.pitch,        b.roll};
    for (double v : vals) {
        out += ',';
        append_number(out, v);
    }
}

}  // namespace

const char* to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::success: return "success";
        case Outcome::fell: return "fell";
        case Outcome::out_of_bounds: return "out_of_bounds";
        case Outcome::timeout: return "timeout";
    }
    return "?";
}

std::string runlog_to_csv(const RunLog& log) {
    std::string out = "t";
    for (const char* p : {"ref", "act"})
        for (const char* c : {"x", "y", "z", "yaw", "pitch", "roll"})
            out += std::string(",") + p + "_" + c;
    for (int j = 0; j < kNumJoints; ++j) out += ",qr" + std::to_string(j);
    for (int j = 0; j < kNumJoints; ++j) out += ",q" + std::to_string(j);
    for (int leg = 0; leg < kNumLegs; ++leg) out += ",c" + std::to_string(leg);
    out += '\n';
    for (const auto& rec : log.records) {
        append_number(out, rec.t);
        append_pose(out, rec.ref_base);
        append_pose(out, rec.actual_base);
        for (double v : rec.q_ref) {
            out += ',';
            append_number(out, v);
        }
        for (double v : rec.q) {
            out += ',';
            append_number(out, v);
        }
        for (bool c : rec.contact) out += c ? ",1" : ",0";
        out += '\n';
    }
    return out;
}

std::string runlog_summary_json(const RunLog& log) {
    nlohmann::json j;
    j["outcome"] = to_string(log.outcome);
    j["fell"] = log.fell;
    j["out_of_bounds"] = log.out_of_bounds;
    j["distance_traveled"] = log.distance_traveled;
    j["duration"] = log.duration;
    j["controller_ticks"] = log.controller_ticks;
    j["plant_steps"] = log.plant_steps;
    j["global_decisions"] = log.global_decisions;
    j["local_solves"] = log.local_solves;
    j["stitches"] = log.stitches;
    j["replans"] = log.replans;
    j["plant"] = log.plant;
    j["task"] = log.task;
    j["seed"] = log.seed;
    double max_seam = 0.0;
    bool seams_full_contact = true;
    for (const auto& s : log.seams) {
        max_seam = std::max(max_seam, s.discrepancy);
        seams_full_contact = seams_full_contact && s.full_contact;
    }
    j["seam_count"] = log.seams.size();
    j["max_seam_discrepancy"] = max_seam;
    j["seams_full_contact"] = seams_full_contact;
    return j.dump(2);
}

Pipeline::Pipeline(PipelineConfig config, std::shared_ptr<const HeightMap> env, Vec2 start_xy,
                   Vec2 goal_xy)
    : config_(std::move(config)), env_(std::move(env)), start_xy_(start_xy), goal_xy_(goal_xy),
      controller_(config_.model, config_.gains, config_.ik, config_.mode) {
    if (!env_) throw std::invalid_argument("Pipeline: terrain required");

    ProbeParams probe;
    probe.probe_length = config_.probe_length;
    probe.n_threads = config_.fss_threads;
    probe.standing_height = config_.model.standing_height;
    ProbeOracle oracle = make_gait_oracle(env_, config_.pattern, config_.model, config_.planner);
    fmap_ = build_feasibility_map(*env_, config_.fss_threshold, oracle, probe);

    CellIndex start_cell = world_to_cell(*env_, start_xy.x(), start_xy.y());
    CellIndex goal_cell = world_to_cell(*env_, goal_xy.x(), goal_xy.y());
    auto result = astar(fmap_, start_cell, goal_cell);
    if (!result) throw std::runtime_error("Pipeline: goal unreachable in feasibility map");
    path_ = fit_spline(result->path, *env_);
    schedule_.step_size = config_.step_size;

    // First segment, solved up front so the controller has a plan at t = 0.
    BodyState start;
    start.position = Vec3(start_xy.x(), start_xy.y(),
                          height_at_clamped(*env_, start_xy.x(), start_xy.y()) +
                              config_.model.standing_height);
    start.yaw = path_.heading_at(path_.project(start_xy.x(), start_xy.y()));
    SegmentGoal seg =
        next_segment_goal(path_, start, schedule_, *env_, config_.model.standing_height);
    path_exhausted_ = seg.at_end;
    plan_ = std::make_shared<GaitPlan>(plan_gait(seg.start, seg.goal, env_, config_.pattern,
                                                 config_.model, config_.planner));
    ++local_solves;
    ++schedule_.solved_segments;
    plan_start_ = 0.0;
    controller_.set_plan(plan_, plan_start_);
}

const SimState Pipeline::initial_state() const {
    // Start already settled at the controller's commanded base height so the
    // first ticks carry no step transient.
    BodyState base = plan_->nodes.front().base;
    base.position.z() += controller_.stance_press();
    return make_initial_state(base, plan_->nodes.front().feet, config_.model);
}

void Pipeline::request_next_segment() {
    if (path_exhausted_ || pending_) return;
    const TrajectoryNode& tail = plan_->nodes.back();
    SegmentGoal seg =
        next_segment_goal(path_, tail.base, schedule_, *env_, config_.model.standing_height);
    SolveRequest req;
    req.start = tail.base;
    req.start.linear_velocity.setZero();
    req.start.angular_velocity.setZero();
    req.goal = seg.goal;
    req.initial_feet = tail.feet;
    req.seam_time = plan_start_ + tail.t;
    req.swap = false;
    if (seg.at_end) path_exhausted_ = true;
    pending_ = req;
    ++schedule_.current_segment;
}

void Pipeline::global_decision(double t, const SimState& sim) {
    ++global_decisions;

    // Disturbance reaction: restart the segmentation from the tracked state
    // when the base has drifted too far from the reference.
    double t_plan = std::clamp(t - plan_start_, 0.0, plan_->end_time());
    ReplanDecision rd = replan_trigger(sim.base, *plan_, t_plan, config_.replan_deviation, *env_,
                                       config_.model.standing_height);
    if (rd.replan) {
        SegmentGoal seg =
            next_segment_goal(path_, rd.start, schedule_, *env_, config_.model.standing_height);
        SolveRequest req;
        req.start = rd.start;
        req.goal = seg.goal;
        Mat3 R = rotation_of(sim.base);
        for (int leg = 0; leg < kNumLegs; ++leg) {
            std::array<double, 3> q{sim.joints.q[leg * 3], sim.joints.q[leg * 3 + 1],
                                    sim.joints.q[leg * 3 + 2]};
            Vec3 foot = sim.base.position + R * forward_kinematics_leg(config_.model, leg, q);
            req.initial_feet[leg] = foot;
        }
        req.swap = true;
        pending_ = req;
        path_exhausted_ = false;
        ++replans;
        return;
    }

    // Keep at least two cycles of plan ahead of the clock.
    if (plan_start_ + plan_->end_time() - t <= 2.0 * config_.pattern.cycle_duration + 1e-9)
        request_next_segment();
}

void Pipeline::local_update(double t) {
    if (!pending_) return;
    SolveRequest req = *pending_;
    pending_.reset();
    GaitPlan segment = plan_gait(req.start, req.goal, env_, config_.pattern, config_.model,
                                 config_.planner, req.initial_feet);
    ++local_solves;
    ++schedule_.solved_segments;
    if (req.swap) {
        plan_ = std::make_shared<GaitPlan>(std::move(segment));
        plan_start_ = t;
        controller_.set_plan(plan_, plan_start_);
        return;
    }
    double at = req.seam_time - plan_start_;
    const TrajectoryNode seam = sample(*plan_, std::min(at, plan_->end_time()));
    double discrepancy = 0.0;
    for (int i = 0; i < 3; ++i)
        discrepancy = std::max(
            discrepancy, std::abs(seam.base.position[i] - segment.nodes.front().base.position[i]));
    for (int leg = 0; leg < kNumLegs; ++leg)
        for (int i = 0; i < 3; ++i)
            discrepancy = std::max(
                discrepancy, std::abs(seam.feet[leg][i] - segment.nodes.front().feet[leg][i]));
    bool full = seam.contact[0] && seam.contact[1] && seam.contact[2] && seam.contact[3];
    seams.push_back({req.seam_time, discrepancy, full});

    plan_ = std::make_shared<GaitPlan>(stitch(*plan_, segment, at));
    ++stitches_done;
    controller_.set_plan(plan_, plan_start_);
}

RunLog run_episode(Pipeline& pipeline, const SimConfig& sim_config, double time_limit) {
    RunLog log;
    log.dt = sim_config.dt;
    const PipelineConfig& cfg = pipeline.config();

    SimState sim = pipeline.initial_state();
    Vec2 start_xy(sim.base.position.x(), sim.base.position.y());
    SensorPacket sensor = make_sensor_packet(sim, 0);

    const long global_every = std::lround(cfg.global_cadence / sim_config.dt);
    const long local_every = std::lround(cfg.local_cadence / sim_config.dt);
    const long max_ticks = std::lround(time_limit / sim_config.dt);
    log.records.reserve(static_cast<size_t>(max_ticks));

    log.outcome = Outcome::timeout;
    for (long k = 0; k < max_ticks; ++k) {
        double t = static_cast<double>(k) * sim_config.dt;
        if (k % global_every == 0) pipeline.global_decision(t, sim);
        if (k % local_every == 0) pipeline.local_update(t);

        // Controller consumes the measured state exactly as the wire frames
        // would deliver it.
        JointState measured;
        for (int j = 0; j < kNumJoints; ++j) {
            measured.q[j] = sensor.q[j];
            measured.dq[j] = sensor.dq[j];
        }
        CommandPacket cmd = pipeline.controller().tick(t, measured);
        std::vector<uint8_t> frame = encode_command(cmd);
        CommandPacket delivered = decode_command(frame);

        sim = sim_step(sim, delivered, sim_config, *pipeline.plan().terrain, cfg.model);
        ++log.plant_steps;
        std::vector<uint8_t> sensor_frame =
            encode_sensor(make_sensor_packet(sim, delivered.sequence));
        sensor = decode_sensor(sensor_frame);

        RunRecord rec;
        rec.t = t;
        rec.ref_base = pipeline.controller().last_node().base;
        rec.actual_base = sim.base;
        rec.q_ref = pipeline.controller().last_reference().q_ref;
        rec.q = sim.joints.q;
        rec.contact = pipeline.controller().last_node().contact;
        log.records.push_back(rec);

        if (sim.fallen) {
            log.outcome = Outcome::fell;
            break;
        }
        if (sim.out_of_bounds) {
            log.outcome = Outcome::out_of_bounds;
            break;
        }
        Vec2 xy(sim.base.position.x(), sim.base.position.y());
        if ((xy - pipeline.goal_xy()).norm() <= cfg.goal_radius) {
            log.outcome = Outcome::success;
            break;
        }
    }

    log.controller_ticks = pipeline.controller().ticks();
    log.fell = sim.fallen;
    log.out_of_bounds = sim.out_of_bounds;
    log.duration = log.records.empty() ? 0.0 : log.records.back().t + sim_config.dt;
    Vec2 final_xy(sim.base.position.x(), sim.base.position.y());
    log.distance_traveled = (final_xy - start_xy).norm();
    log.global_decisions = pipeline.global_decisions;
    log.local_solves = pipeline.local_solves;
    log.stitches = pipeline.stitches_done;
    log.replans = pipeline.replans;
    log.seams = pipeline.seams;
    return log;
}

RunLog run_task_episode(Task task, uint64_t seed, const PipelineConfig& config,
                        const SimConfig& sim_config, double time_limit) {
    auto env = std::make_shared<HeightMap>(generate_task_env(task, seed));
    Course course = task_course();
    Pipeline pipeline(config, env, Vec2(course.start_x, course.start_y),
                      Vec2(course.goal_x, course.goal_y));
    RunLog log = run_episode(pipeline, sim_config, time_limit);
    log.task = to_string(task);
    log.seed = seed;
    return log;
}

}  // namespace quadstack
