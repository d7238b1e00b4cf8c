#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "quadstack/astar.hpp"
#include "quadstack/controller.hpp"
#include "quadstack/feasibility.hpp"
#include "quadstack/global_planner.hpp"
#include "quadstack/sim.hpp"
#include "quadstack/task_env.hpp"

namespace quadstack {

enum class Outcome { success, fell, out_of_bounds, timeout };
const char* to_string(Outcome outcome);

struct RunRecord {
    double t = 0.0;
    BodyState ref_base;
    BodyState actual_base;
    std::array<double, kNumJoints> q_ref{};
    std::array<double, kNumJoints> q{};
    std::array<bool, kNumLegs> contact{};  // reference contact flags
};

struct SeamRecord {
    double t = 0.0;
    double discrepancy = 0.0;  // max base/foot mismatch reported by stitch
    bool full_contact = false;
};

struct RunLog {
    double dt = 0.001;
    std::vector<RunRecord> records;
    Outcome outcome = Outcome::timeout;
    bool fell = false;
    bool out_of_bounds = false;
    double distance_traveled = 0.0;  // net base displacement, m
    double duration = 0.0;
    long controller_ticks = 0;
    long plant_steps = 0;
    long global_decisions = 0;
    long local_solves = 0;
    long stitches = 0;
    long replans = 0;
    std::vector<SeamRecord> seams;
    std::string plant = "kinematic";
    std::string task;
    uint64_t seed = 0;
};

// CSV: t, reference base pose (x y z yaw pitch roll), actual base pose,
// 12 q_ref, 12 q, 4 contact flags.
std::string runlog_to_csv(const RunLog& log);
std::string runlog_summary_json(const RunLog& log);

// Everything needed to wire the stack for one episode.
struct PipelineConfig {
    RobotModel model = default_robot_model();
    GaitPattern pattern;
    PlannerParams planner;
    IkParams ik;
    Gains gains = Gains::uniform(3.0, 0.05);
    ControlMode mode = ControlMode::onboard_pd;
    double fss_threshold = 0.1;    // m height-deviation parameter
    double probe_length = 0.15;    // m micro-trajectory magnitude
    int fss_threads = 1;
    double step_size = 0.3;        // m look-ahead per segment
    double replan_deviation = 0.1; // m
    double goal_radius = 0.15;     // m
    double global_cadence = 2.0;   // s between global planner decisions (0.5 Hz)
    double local_cadence = 0.5;    // s between local solver slots (2 Hz)
};

// Planner + controller closure driven by run_episode in simulated time. The
// next segment is solved in a background slot (cooperatively scheduled at the
// local cadence) and handed over only through stitch at full-contact times.
class Pipeline {
public:
    Pipeline(PipelineConfig config, std::shared_ptr<const HeightMap> env, Vec2 start_xy,
             Vec2 goal_xy);

    // Phase hooks called by run_episode.
    void global_decision(double t, const SimState& sim);
    void local_update(double t);
    Controller& controller() { return controller_; }
    const GaitPlan& plan() const { return *plan_; }
    const GlobalPath& path() const { return path_; }
    const FeasibilityMap& feasibility() const { return fmap_; }
    const SimState initial_state() const;

    Vec2 goal_xy() const { return goal_xy_; }
    const PipelineConfig& config() const { return config_; }

    long global_decisions = 0;
    long local_solves = 0;
    long stitches_done = 0;
    long replans = 0;
    std::vector<SeamRecord> seams;

private:
    struct SolveRequest {
        BodyState start;
        BodyState goal;
        std::array<Vec3, kNumLegs> initial_feet;
        double seam_time = 0.0;  // sim time of the stitch point
        bool swap = false;       // replace the plan instead of stitching
    };

    void request_next_segment();

    PipelineConfig config_;
    std::shared_ptr<const HeightMap> env_;
    Vec2 start_xy_, goal_xy_;
    FeasibilityMap fmap_;
    GlobalPath path_;
    StitchSchedule schedule_;
    Controller controller_;
    std::shared_ptr<GaitPlan> plan_;
    double plan_start_ = 0.0;
    std::optional<SolveRequest> pending_;
    bool path_exhausted_ = false;
};

// Tick the full stack in simulated time: plant and controller at 1 kHz,
// local solve slots at 2 Hz, global decisions at 0.5 Hz, until the goal
// radius is reached, a failure latches, or the time limit expires.
RunLog run_episode(Pipeline& pipeline, const SimConfig& sim_config, double time_limit);

// Convenience wrapper: generate the task environment for (task, seed), build
// the pipeline on the canonical course, run one episode.
RunLog run_task_episode(Task task, uint64_t seed, const PipelineConfig& config,
                        const SimConfig& sim_config, double time_limit);

}  // namespace quadstack
