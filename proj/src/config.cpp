#include "quadstack/config.hpp"

#include <fstream>
#include <json.hpp>

#include "quadstack/robot_model.hpp"

namespace quadstack {

PipelineConfig RunConfig::to_pipeline_config() const {
    PipelineConfig pc;
    if (!robot_model_path.empty()) pc.model = load_robot_model(robot_model_path);
    pc.pattern.cycle_duration = cycle_duration;
    pc.pattern.duty_factor = duty_factor;
    pc.pattern.full_stance_fraction = full_stance_fraction;
    pc.pattern.step_height = step_height;
    pc.gains = Gains::uniform(kp, kd);
    pc.ik.lambda = ik_lambda;
    pc.ik.tolerance = ik_tolerance;
    pc.ik.max_iterations = ik_max_iterations;
    pc.ik.damping_mu = ik_damping;
    pc.mode = mode == "torque" ? ControlMode::torque : ControlMode::onboard_pd;
    pc.fss_threshold = fss_threshold;
    pc.probe_length = probe_length;
    pc.fss_threads = fss_threads;
    pc.step_size = step_size;
    pc.replan_deviation = replan_deviation;
    pc.goal_radius = goal_radius;
    return pc;
}

void RunConfig::validate_for_run() const {
    bool have_map = !map_path.empty();
    bool have_task = !task.empty();
    if (have_map == have_task)
        throw std::invalid_argument(
            "exactly one of --map or --task must be provided (config keys map/task)");
    if (mode != "onboard_pd" && mode != "torque")
        throw std::invalid_argument("mode must be onboard_pd or torque, got '" + mode + "'");
}

RunConfig apply_config_json(RunConfig c, const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    if (j.is_null()) return c;
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");

    for (const auto& [key, value] : j.items()) {
        if (key == "map") c.map_path = value.get<std::string>();
        else if (key == "task") c.task = value.get<std::string>();
        else if (key == "seed") c.seed = value.get<uint64_t>();
        else if (key == "start") c.start = std::array<double, 2>{value.at(0), value.at(1)};
        else if (key == "goal") c.goal = std::array<double, 2>{value.at(0), value.at(1)};
        else if (key == "time_limit") c.time_limit = value.get<double>();
        else if (key == "out_dir") c.out_dir = value.get<std::string>();
        else if (key == "mode") c.mode = value.get<std::string>();
        else if (key == "cycle_duration") c.cycle_duration = value.get<double>();
        else if (key == "duty_factor") c.duty_factor = value.get<double>();
        else if (key == "full_stance_fraction") c.full_stance_fraction = value.get<double>();
        else if (key == "step_height") c.step_height = value.get<double>();
        else if (key == "kp") c.kp = value.get<double>();
        else if (key == "kd") c.kd = value.get<double>();
        else if (key == "ik_lambda") c.ik_lambda = value.get<double>();
        else if (key == "ik_tolerance") c.ik_tolerance = value.get<double>();
        else if (key == "ik_max_iterations") c.ik_max_iterations = value.get<int>();
        else if (key == "ik_damping") c.ik_damping = value.get<double>();
        else if (key == "fss_threshold") c.fss_threshold = value.get<double>();
        else if (key == "probe_length") c.probe_length = value.get<double>();
        else if (key == "fss_threads") c.fss_threads = value.get<int>();
        else if (key == "step_size") c.step_size = value.get<double>();
        else if (key == "replan_deviation") c.replan_deviation = value.get<double>();
        else if (key == "goal_radius") c.goal_radius = value.get<double>();
        else if (key == "robot_model") c.robot_model_path = value.get<std::string>();
        else
            throw std::invalid_argument("unknown config key '" + key + "'");
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return RunConfig{};
    return apply_config_json(RunConfig{}, text);
}

}  // namespace quadstack
