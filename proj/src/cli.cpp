#include "quadstack/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <json.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "quadstack/config.hpp"
#include "quadstack/metrics.hpp"
#include "quadstack/robot_interface.hpp"

namespace quadstack {

namespace {

namespace fs = std::filesystem;

std::string default_out_dir() {
    const char* env = std::getenv("QUADSTACK_OUT_DIR");
    return env && *env ? env : ".";
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out.good()) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Options mirroring every RunConfig key, with flag > file > default
// precedence resolved after parsing.
struct RunOpts {
    RunConfig flags;
    std::string config_path;
    std::vector<double> start_xy, goal_xy;
    CLI::App* app = nullptr;

    void attach(CLI::App* cmd) {
        app = cmd;
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--map", flags.map_path, "terrain map file");
        cmd->add_option("--task", flags.task, "walking|avoidance|climbing");
        cmd->add_option("--seed", flags.seed, "environment seed");
        cmd->add_option("--start", start_xy, "start x y")->expected(2);
        cmd->add_option("--goal", goal_xy, "goal x y")->expected(2);
        cmd->add_option("--time-limit", flags.time_limit, "simulated seconds");
        cmd->add_option("--out", flags.out_dir, "output directory");
        cmd->add_option("--mode", flags.mode, "onboard_pd|torque");
        cmd->add_option("--cycle-duration", flags.cycle_duration, "gait cycle, s");
        cmd->add_option("--duty-factor", flags.duty_factor, "stance fraction");
        cmd->add_option("--full-stance-fraction", flags.full_stance_fraction, "");
        cmd->add_option("--step-height", flags.step_height, "swing apex, m");
        cmd->add_option("--kp", flags.kp, "proportional gain");
        cmd->add_option("--kd", flags.kd, "derivative gain");
        cmd->add_option("--ik-lambda", flags.ik_lambda, "");
        cmd->add_option("--ik-tolerance", flags.ik_tolerance, "");
        cmd->add_option("--ik-max-iterations", flags.ik_max_iterations, "");
        cmd->add_option("--ik-damping", flags.ik_damping, "");
        cmd->add_option("--fss-threshold", flags.fss_threshold, "height deviation, m");
        cmd->add_option("--probe-length", flags.probe_length, "micro-trajectory length, m");
        cmd->add_option("--fss-threads", flags.fss_threads, "probe parallelism");
        cmd->add_option("--step-size", flags.step_size, "look-ahead distance, m");
        cmd->add_option("--replan-deviation", flags.replan_deviation, "m");
        cmd->add_option("--goal-radius", flags.goal_radius, "m");
        cmd->add_option("--robot-model", flags.robot_model_path, "robot model JSON");
    }

    RunConfig resolve() const {
        RunConfig base;
        base.out_dir = default_out_dir();
        if (!config_path.empty()) {
            base = load_config(config_path);
            if (base.out_dir == ".") base.out_dir = default_out_dir();
        }
        auto passed = [&](const std::string& name) { return app->count(name) > 0; };
        RunConfig r = base;
        if (passed("--map")) r.map_path = flags.map_path;
        if (passed("--task")) r.task = flags.task;
        if (passed("--seed")) r.seed = flags.seed;
        if (passed("--start")) r.start = std::array<double, 2>{start_xy[0], start_xy[1]};
        if (passed("--goal")) r.goal = std::array<double, 2>{goal_xy[0], goal_xy[1]};
        if (passed("--time-limit")) r.time_limit = flags.time_limit;
        if (passed("--out")) r.out_dir = flags.out_dir;
        if (passed("--mode")) r.mode = flags.mode;
        if (passed("--cycle-duration")) r.cycle_duration = flags.cycle_duration;
        if (passed("--duty-factor")) r.duty_factor = flags.duty_factor;
        if (passed("--full-stance-fraction")) r.full_stance_fraction = flags.full_stance_fraction;
        if (passed("--step-height")) r.step_height = flags.step_height;
        if (passed("--kp")) r.kp = flags.kp;
        if (passed("--kd")) r.kd = flags.kd;
        if (passed("--ik-lambda")) r.ik_lambda = flags.ik_lambda;
        if (passed("--ik-tolerance")) r.ik_tolerance = flags.ik_tolerance;
        if (passed("--ik-max-iterations")) r.ik_max_iterations = flags.ik_max_iterations;
        if (passed("--ik-damping")) r.ik_damping = flags.ik_damping;
        if (passed("--fss-threshold")) r.fss_threshold = flags.fss_threshold;
        if (passed("--probe-length")) r.probe_length = flags.probe_length;
        if (passed("--fss-threads")) r.fss_threads = flags.fss_threads;
        if (passed("--step-size")) r.step_size = flags.step_size;
        if (passed("--replan-deviation")) r.replan_deviation = flags.replan_deviation;
        if (passed("--goal-radius")) r.goal_radius = flags.goal_radius;
        if (passed("--robot-model")) r.robot_model_path = flags.robot_model_path;
        return r;
    }
};

struct RunEnvironment {
    std::shared_ptr<HeightMap> map;
    Vec2 start, goal;
    std::string task_name;
};

RunEnvironment load_environment(const RunConfig& config) {
    RunEnvironment env;
    if (!config.map_path.empty()) {
        env.map = std::make_shared<HeightMap>(parse_heightmap(read_file(config.map_path)));
        env.task_name = "custom";
        double mid_x = env.map->origin_x + 0.5 * (env.map->n_cols - 1) * env.map->resolution;
        double mid_y = env.map->origin_y + 0.5 * (env.map->n_rows - 1) * env.map->resolution;
        env.start = Vec2(env.map->origin_x + 0.5, mid_y);
        env.goal = Vec2(mid_x, mid_y);
    } else {
        Task task = task_from_string(config.task);
        env.map = std::make_shared<HeightMap>(generate_task_env(task, config.seed));
        env.task_name = config.task;
        Course course = task_course();
        env.start = Vec2(course.start_x, course.start_y);
        env.goal = Vec2(course.goal_x, course.goal_y);
    }
    if (config.start) env.start = Vec2((*config.start)[0], (*config.start)[1]);
    if (config.goal) env.goal = Vec2((*config.goal)[0], (*config.goal)[1]);
    return env;
}

int cmd_terrain_gen(const std::string& task, uint64_t seed, const std::string& out,
                    const TaskEnvParams& params) {
    HeightMap map = generate_task_env(task_from_string(task), seed, params);
    write_file(out, serialize_heightmap(map));
    std::cout << "wrote " << map.n_rows << "x" << map.n_cols << " map to " << out << "\n";
    return 0;
}

int cmd_terrain_validate(const std::string& path) {
    HeightMap map = parse_heightmap(read_file(path));
    double lo = map.heights[0], hi = map.heights[0];
    for (double h : map.heights) {
        lo = std::min(lo, h);
        hi = std::max(hi, h);
    }
    std::cout << path << ": " << map.n_rows << "x" << map.n_cols << " grid, resolution "
              << map.resolution << " m, heights [" << lo << ", " << hi << "] m\n";
    return 0;
}

int cmd_plan_global(const RunOpts& opts) {
    RunConfig config = opts.resolve();
    config.validate_for_run();
    RunEnvironment env = load_environment(config);
    PipelineConfig pc = config.to_pipeline_config();

    ProbeParams probe{pc.probe_length, pc.fss_threads, pc.model.standing_height};
    ProbeOracle oracle = make_gait_oracle(env.map, pc.pattern, pc.model, pc.planner);
    FeasibilityMap fmap = build_feasibility_map(*env.map, pc.fss_threshold, oracle, probe);

    auto result = astar(fmap, world_to_cell(*env.map, env.start.x(), env.start.y()),
                        world_to_cell(*env.map, env.goal.x(), env.goal.y()));
    fs::path dir(config.out_dir);
    write_file(dir / "feasibility.json", fmap.to_json());
    if (!result) {
        std::cerr << "goal unreachable; feasibility map written to " << dir << "\n";
        return 1;
    }
    GlobalPath path = fit_spline(result->path, *env.map);
    write_file(dir / "global_path.json", path.to_json());
    std::cout << "path cost " << result->cost << ", spline length " << path.total_length
              << " m, wrote " << (dir / "global_path.json") << "\n";
    return 0;
}

int cmd_plan_local(const RunOpts& opts, const std::string& out_file) {
    RunConfig config = opts.resolve();
    config.validate_for_run();
    RunEnvironment env = load_environment(config);
    PipelineConfig pc = config.to_pipeline_config();

    BodyState start, goal;
    start.position = Vec3(env.start.x(), env.start.y(),
                          height_at_clamped(*env.map, env.start.x(), env.start.y()) +
                              pc.model.standing_height);
    goal.position = Vec3(env.goal.x(), env.goal.y(),
                         height_at_clamped(*env.map, env.goal.x(), env.goal.y()) +
                             pc.model.standing_height);
    double heading = std::atan2(env.goal.y() - env.start.y(), env.goal.x() - env.start.x());
    start.yaw = goal.yaw = heading;

    GaitPlan plan = plan_gait(start, goal, env.map, pc.pattern, pc.model, pc.planner);
    FeasibilityVerdict verdict = check_feasibility(plan, pc.model, *env.map, pc.planner);
    write_file(out_file, gait_plan_to_csv(plan));
    std::cout << "plan: " << plan.nodes.size() << " nodes over " << plan.end_time() << " s, "
              << (verdict.feasible ? "feasible" : "infeasible") << "\n";
    if (!verdict.feasible) {
        for (const auto& r : verdict.reasons) std::cout << "  reason: " << r << "\n";
        return 1;
    }
    return 0;
}

int cmd_simulate(const RunOpts& opts) {
    RunConfig config = opts.resolve();
    config.validate_for_run();
    RunEnvironment env = load_environment(config);
    PipelineConfig pc = config.to_pipeline_config();
    SimConfig sc;
    sc.seed = config.seed;
    sc.onboard_gains = pc.gains;

    Pipeline pipeline(pc, env.map, env.start, env.goal);
    RunLog log = run_episode(pipeline, sc, config.time_limit);
    log.task = env.task_name;
    log.seed = config.seed;

    RunSummary summary = summarize(log);
    fs::path dir(config.out_dir);
    std::string prefix = env.task_name + "_" + std::to_string(config.seed);
    write_file(dir / (prefix + "_run.csv"), runlog_to_csv(log));

    nlohmann::json j = nlohmann::json::parse(runlog_summary_json(log));
    j["tracking_error_rate"] = summary.tracking_error_rate;
    write_file(dir / (prefix + "_summary.json"), j.dump(2));

    std::cout << "outcome: " << to_string(log.outcome) << ", distance "
              << log.distance_traveled << " m, duration " << log.duration
              << " s, tracking error rate " << summary.tracking_error_rate << " m/s\n"
              << "wrote " << (dir / (prefix + "_run.csv")) << "\n";
    return 0;
}

int cmd_bench(const RunOpts& opts, int runs, uint64_t seed_base) {
    RunConfig config = opts.resolve();
    if (config.task.empty()) throw std::invalid_argument("bench requires --task");
    PipelineConfig pc = config.to_pipeline_config();
    SimConfig sc;
    sc.onboard_gains = pc.gains;

    BenchmarkResult result =
        benchmark(task_from_string(config.task), runs, seed_base, pc, sc, config.time_limit);
    fs::path dir(config.out_dir);
    write_file(dir / (config.task + "_bench.csv"), summaries_to_csv(result.runs));
    write_file(dir / (config.task + "_bench.json"),
               aggregate_to_json(result.totals, result.runs));
    std::cout << config.task << ": " << result.totals.success_pct << "% success over "
              << result.totals.n_runs << " runs, mean distance " << result.totals.mean_distance
              << " m, mean tracking error rate " << result.totals.mean_tracking_error_rate
              << " m/s\n"
              << "wrote " << (dir / (config.task + "_bench.csv")) << "\n";
    return 0;
}

int cmd_calibrate(uint64_t seed, const std::vector<int>& offsets, double max_offset) {
    EncoderModel enc = random_encoder_scenario(seed, max_offset);
    RobotModel model = default_robot_model();
    CalibrationResult res = soft_calibrate(enc, model);
    if (!offsets.empty()) {
        if (offsets.size() != kNumJoints)
            throw std::invalid_argument("--offsets needs exactly 12 integers");
        std::array<int, kNumJoints> o{};
        std::copy(offsets.begin(), offsets.end(), o.begin());
        res = apply_index_offsets(enc, res, o);
    }
    std::cout << "joint  true_zero  found_zero  pulse_err  sweep_s\n";
    for (int j = 0; j < kNumJoints; ++j) {
        char line[96];
        std::snprintf(line, sizeof(line), "%5d  %9.5f  %10.5f  %9d  %7.3f\n", j, enc.true_zero[j],
                      res.found_zero[j], res.pulse_error[j], res.sweep_duration[j]);
        std::cout << line;
    }
    bool ok = res.status == CalibrationResult::Status::ok;
    std::cout << "status: " << (ok ? "ok" : "misaligned") << "\n";
    if (!ok) {
        std::cout << "misaligned joints:";
        for (int j : res.misaligned_joints) std::cout << " " << j;
        std::cout << "\nretry with --offsets to shift zeros by whole index spacings\n";
    }
    return ok ? 0 : 2;
}

int cmd_report(const std::string& logs_dir, const std::string& out_dir) {
    std::vector<RunSummary> summaries;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(logs_dir))
        if (entry.path().filename().string().ends_with("_summary.json"))
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        nlohmann::json j = nlohmann::json::parse(read_file(file));
        RunSummary s;
        s.task = j.value("task", "?");
        s.seed = j.value("seed", 0ULL);
        std::string oc = j.value("outcome", "timeout");
        s.outcome = oc == "success"         ? Outcome::success
                    : oc == "fell"          ? Outcome::fell
                    : oc == "out_of_bounds" ? Outcome::out_of_bounds
                                            : Outcome::timeout;
        s.distance = j.value("distance_traveled", 0.0);
        s.tracking_error_rate = j.value("tracking_error_rate", 0.0);
        s.duration = j.value("duration", 0.0);
        summaries.push_back(s);
    }
    if (summaries.empty()) {
        std::cerr << "no *_summary.json files under " << logs_dir << "\n";
        return 1;
    }
    fs::path dir(out_dir);
    write_file(dir / "report.csv", summaries_to_csv(summaries));
    write_file(dir / "report.json", aggregate_to_json(aggregate(summaries), summaries));
    std::cout << "aggregated " << summaries.size() << " runs into " << (dir / "report.csv")
              << "\n";
    return 0;
}

int cmd_console(uint64_t seed, bool auto_go, const std::string& mode_name) {
    RobotModel model = default_robot_model();
    InterfaceState state;
    TimingMonitor monitor;
    auto wait_go = [&](const char* prompt) {
        if (auto_go) {
            std::cout << prompt << " [auto]\n";
            state = state_machine_step(state, InterfaceEvent::auto_go);
            return true;
        }
        std::string line;
        while (true) {
            std::cout << prompt << " (go/quit)> " << std::flush;
            if (!std::getline(std::cin, line) || line == "quit") return false;
            if (line == "go") {
                state = state_machine_step(state, InterfaceEvent::user_go);
                return true;
            }
            std::cout << "unknown command '" << line << "'\n";
        }
    };

    std::cout << "[Sweep] calibrating simulated encoders (seed " << seed << ")\n";
    EncoderModel enc = random_encoder_scenario(seed, M_PI / 9.0 * 0.999);
    CalibrationResult cal = soft_calibrate(enc, model);
    state = state_machine_step(state, InterfaceEvent::sweep_done);
    std::cout << "[Sweep] complete, status "
              << (cal.status == CalibrationResult::Status::ok ? "ok" : "misaligned") << "\n";
    if (!wait_go("[Sweep] proceed to Hold")) return 0;

    std::cout << "[" << to_string(state.phase) << "] tracking the initial stance\n";
    PipelineConfig pc;
    pc.mode = mode_name == "torque" ? ControlMode::torque : ControlMode::onboard_pd;
    SimConfig sc;
    auto env = std::make_shared<HeightMap>(generate_task_env(Task::walking, seed));
    Course course = task_course();
    Pipeline pipeline(pc, env, Vec2(course.start_x, course.start_y),
                      Vec2(course.goal_x, course.goal_y));
    SimState sim = pipeline.initial_state();
    SensorPacket sensor = make_sensor_packet(sim, 0);

    auto run_frames = [&](double seconds, bool advance_plan) {
        long frames = std::lround(seconds / sc.dt);
        double plan_hold = pipeline.controller().plan_start_time();
        for (long k = 0; k < frames; ++k) {
            auto t0 = std::chrono::steady_clock::now();
            double t = sim.time;
            if (advance_plan) {
                long tick = std::lround(t / sc.dt);
                if (tick % std::lround(pc.global_cadence / sc.dt) == 0)
                    pipeline.global_decision(t, sim);
                if (tick % std::lround(pc.local_cadence / sc.dt) == 0) pipeline.local_update(t);
            } else {
                // Hold: keep sampling the plan head.
                pipeline.controller().set_plan(pipeline.controller().plan(), plan_hold + sc.dt);
                plan_hold += sc.dt;
            }
            JointState measured;
            for (int j = 0; j < kNumJoints; ++j) {
                measured.q[j] = sensor.q[j];
                measured.dq[j] = sensor.dq[j];
            }
            CommandPacket cmd = pipeline.controller().tick(t, measured);
            CommandPacket delivered = decode_command(encode_command(cmd));
            sim = sim_step(sim, delivered, sc, *env, pc.model);
            sensor = decode_sensor(encode_sensor(make_sensor_packet(sim, delivered.sequence)));
            double us = std::chrono::duration<double, std::micro>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
            monitor.record(us);
            if ((k + 1) % 1000 == 0) {
                TimingStats ts = monitor.stats();
                std::printf("[%s] t=%5.1fs frames=%ld mean=%.1fus max=%.1fus p99=%.1fus missed=%ld\n",
                            to_string(state.phase), sim.time, ts.frames, ts.mean_us, ts.max_us,
                            ts.p99_us, ts.missed_deadlines);
            }
        }
    };

    run_frames(2.0, false);
    if (!wait_go("[Hold] proceed to Run")) return 0;
    std::cout << "[" << to_string(state.phase) << "] executing the trajectory plan\n";
    run_frames(8.0, true);
    TimingStats ts = monitor.stats();
    std::printf("done: %ld frames, %.1f us mean, %ld missed deadlines\n", ts.frames, ts.mean_us,
                ts.missed_deadlines);
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"quadruped trajectory stack"};
    app.require_subcommand(1);

    // terrain gen | validate
    auto* terrain = app.add_subcommand("terrain", "terrain map tools");
    terrain->require_subcommand(1);
    auto* tgen = terrain->add_subcommand("gen", "generate a task environment");
    std::string tgen_task = "walking", tgen_out = "terrain.map";
    uint64_t tgen_seed = 0;
    TaskEnvParams tparams;
    tgen->add_option("--task", tgen_task, "walking|avoidance|climbing")->required();
    tgen->add_option("--seed", tgen_seed, "seed");
    tgen->add_option("--out", tgen_out, "output map file")->required();
    tgen->add_option("--n", tparams.n, "grid size");
    tgen->add_option("--resolution", tparams.resolution, "m per cell");
    tgen->add_option("--wall-height", tparams.wall_height, "m");
    tgen->add_option("--plateau-height", tparams.plateau_max_height, "m");

    auto* tval = terrain->add_subcommand("validate", "parse and describe a map file");
    std::string tval_path;
    tval->add_option("file", tval_path, "map file")->required();

    // plan global | local
    auto* plan = app.add_subcommand("plan", "planning tools");
    plan->require_subcommand(1);
    auto* pglobal = plan->add_subcommand("global", "feasibility map + A* + spline");
    RunOpts pglobal_opts;
    pglobal_opts.attach(pglobal);
    auto* plocal = plan->add_subcommand("local", "single gait segment");
    RunOpts plocal_opts;
    plocal_opts.attach(plocal);
    std::string plocal_out = "plan.csv";
    plocal->add_option("--plan-out", plocal_out, "gait plan CSV path");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run one full-stack episode");
    RunOpts sim_opts;
    sim_opts.attach(sim);

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "seeded benchmark over n runs");
    RunOpts bench_opts;
    bench_opts.attach(bench_cmd);
    int bench_runs = 20;
    uint64_t bench_seed_base = 0;
    bench_cmd->add_option("--runs", bench_runs, "number of runs");
    bench_cmd->add_option("--seed-base", bench_seed_base, "first seed");

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "simulated encoder calibration");
    uint64_t cal_seed = 0;
    std::vector<int> cal_offsets;
    double cal_max_offset = M_PI / 9.0 * 0.999;
    cal->add_option("--seed", cal_seed, "scenario seed");
    cal->add_option("--offsets", cal_offsets, "12 index pulse offsets")->delimiter(',');
    cal->add_option("--max-offset", cal_max_offset, "power-on offset range, rad");

    // report
    auto* report = app.add_subcommand("report", "aggregate run summaries");
    std::string report_logs, report_out = default_out_dir();
    report->add_option("--logs", report_logs, "directory of *_summary.json")->required();
    report->add_option("--out", report_out, "output directory");

    // console
    auto* console = app.add_subcommand("console", "interactive Sweep/Hold/Run console");
    uint64_t console_seed = 0;
    bool console_auto = false;
    std::string console_mode = "onboard_pd";
    console->add_option("--seed", console_seed, "seed");
    console->add_flag("--auto", console_auto, "fire go events automatically");
    console->add_option("--mode", console_mode, "onboard_pd|torque");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (tgen->parsed()) return cmd_terrain_gen(tgen_task, tgen_seed, tgen_out, tparams);
        if (tval->parsed()) return cmd_terrain_validate(tval_path);
        if (pglobal->parsed()) return cmd_plan_global(pglobal_opts);
        if (plocal->parsed()) return cmd_plan_local(plocal_opts, plocal_out);
        if (sim->parsed()) return cmd_simulate(sim_opts);
        if (bench_cmd->parsed()) return cmd_bench(bench_opts, bench_runs, bench_seed_base);
        if (cal->parsed()) return cmd_calibrate(cal_seed, cal_offsets, cal_max_offset);
        if (report->parsed()) return cmd_report(report_logs, report_out);
        if (console->parsed()) return cmd_console(console_seed, console_auto, console_mode);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace quadstack
