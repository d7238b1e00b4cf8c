#include "quadstack/robot_model.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

namespace quadstack {

std::array<double, 3> RobotModel::nominal_stance_q() const {
    // Two-link geometry with equal-ish links: hip angle t, knee -2t keeps the
    // foot on the hip vertical when upper == lower.
    double h = std::min(standing_height, max_reach() - 1e-6);
    double t = std::acos(std::clamp(h / max_reach(), -1.0, 1.0));
    return {0.0, t, -2.0 * t};
}

RobotModel default_robot_model() {
    RobotModel m;
    m.hip_offset[FL] = Vec3(0.19, 0.105, 0.0);
    m.hip_offset[FR] = Vec3(0.19, -0.105, 0.0);
    m.hip_offset[HL] = Vec3(-0.19, 0.105, 0.0);
    m.hip_offset[HR] = Vec3(-0.19, -0.105, 0.0);
    for (int leg = 0; leg < kNumLegs; ++leg) {
        m.q_min[leg * 3 + 0] = -0.8;
        m.q_max[leg * 3 + 0] = 0.8;
        m.q_min[leg * 3 + 1] = -1.8;
        m.q_max[leg * 3 + 1] = 1.8;
        m.q_min[leg * 3 + 2] = -2.6;
        m.q_max[leg * 3 + 2] = 2.6;
    }
    m.axis_sign.fill(1.0);
    for (int leg = 0; leg < kNumLegs; ++leg) m.axis_sign[leg * 3 + 0] = (leg % 2 == 0) ? 1.0 : -1.0;
    return m;
}

namespace {

using nlohmann::json;

void check(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error("robot model config: " + what);
}

}  // namespace

RobotModel load_robot_model(const std::string& path) {
    std::ifstream in(path);
    check(in.good(), "cannot open '" + path + "'");
    json j = json::parse(in);
    RobotModel m = default_robot_model();
    if (j.contains("hip_offsets")) {
        auto& arr = j["hip_offsets"];
        check(arr.size() == 4, "hip_offsets must list 4 legs");
        for (int i = 0; i < 4; ++i) {
            check(arr[i].size() == 3, "hip offset must be [x,y,z]");
            m.hip_offset[i] = Vec3(arr[i][0], arr[i][1], arr[i][2]);
        }
    }
    if (j.contains("upper_length")) m.upper_length = j["upper_length"];
    if (j.contains("lower_length")) m.lower_length = j["lower_length"];
    if (j.contains("q_min")) {
        check(j["q_min"].size() == kNumJoints, "q_min must have 12 entries");
        for (int i = 0; i < kNumJoints; ++i) m.q_min[i] = j["q_min"][i];
    }
    if (j.contains("q_max")) {
        check(j["q_max"].size() == kNumJoints, "q_max must have 12 entries");
        for (int i = 0; i < kNumJoints; ++i) m.q_max[i] = j["q_max"][i];
    }
    if (j.contains("axis_sign")) {
        check(j["axis_sign"].size() == kNumJoints, "axis_sign must have 12 entries");
        for (int i = 0; i < kNumJoints; ++i) {
            double s = j["axis_sign"][i];
            check(s == 1.0 || s == -1.0, "axis_sign entries must be +1 or -1");
            m.axis_sign[i] = s;
        }
    }
    if (j.contains("reduction_ratio")) m.reduction_ratio = j["reduction_ratio"];
    if (j.contains("torque_limit")) m.torque_limit = j["torque_limit"];
    if (j.contains("velocity_limit")) m.velocity_limit = j["velocity_limit"];
    if (j.contains("standing_height")) m.standing_height = j["standing_height"];

    check(m.upper_length > 0 && m.lower_length > 0, "link lengths must be positive");
    for (int i = 0; i < kNumJoints; ++i)
        check(m.q_min[i] < m.q_max[i], "q_min must be below q_max for joint " + std::to_string(i));
    return m;
}

void save_robot_model(const RobotModel& m, const std::string& path) {
    json j;
    for (int i = 0; i < 4; ++i)
        j["hip_offsets"].push_back({m.hip_offset[i].x(), m.hip_offset[i].y(), m.hip_offset[i].z()});
    j["upper_length"] = m.upper_length;
    j["lower_length"] = m.lower_length;
    j["q_min"] = m.q_min;
    j["q_max"] = m.q_max;
    j["axis_sign"] = m.axis_sign;
    j["reduction_ratio"] = m.reduction_ratio;
    j["torque_limit"] = m.torque_limit;
    j["velocity_limit"] = m.velocity_limit;
    j["standing_height"] = m.standing_height;
    std::ofstream out(path);
    check(out.good(), "cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

}  // namespace quadstack
