#pragma once

#include <mutex>
#include <vector>

#include "quadstack/core.hpp"
#include "quadstack/packets.hpp"
#include "quadstack/robot_model.hpp"

namespace quadstack {

// --- Encoder / calibration -------------------------------------------------

// Simulated incremental encoders. Index pulses sit every 2*pi/9 of joint
// rotation (9:1 reduction, one pulse per motor revolution); the true zero and
// the power-on pose are hidden from the calibration procedure and used only
// to generate pulse events and to grade results.
struct EncoderModel {
    static constexpr double index_spacing = 2.0 * M_PI / 9.0;
    std::array<double, kNumJoints> true_zero{};        // absolute joint frame
    std::array<double, kNumJoints> power_on_angle{};   // absolute joint frame
    double counts_per_radian = 45000.0 / (2.0 * M_PI);  // 5000 cpr motor x 9:1

    double resolution() const { return 1.0 / counts_per_radian; }
};

// Scenario fixture: true zeros anywhere, power-on offsets uniform within
// +-max_offset of the zero.
EncoderModel random_encoder_scenario(uint64_t seed, double max_offset);

struct SweepParams {
    double amplitude = 0.1;      // A in the sweep reference
    double max_time = 5.0;       // s per joint before declaring a timeout
    double dt = 0.001;           // sweep sampling step
    double min_seed_angle = 0.01;  // substitute when the power-on reading is smaller
};

struct CalibrationResult {
    enum class Status { ok, misaligned };
    Status status = Status::ok;
    std::array<double, kNumJoints> found_zero{};   // absolute joint frame
    std::array<int, kNumJoints> pulse_error{};     // found - true, in index spacings
    std::array<int, kNumJoints> applied_offset{};
    std::vector<int> misaligned_joints;
    std::array<double, kNumJoints> sweep_duration{};  // s until the pulse was seen
};

struct CalibrationTimeout : std::runtime_error {
    int joint;
    CalibrationTimeout(const std::string& msg, int joint_)
        : std::runtime_error(msg), joint(joint_) {}
};

// Sinusoidal sweep reference: 9 q [A - A cos(2 pi t)] * axis_sign. Period
// 1 s, zero at t = 0.
double sweep_reference(double q, double amplitude, double t, double axis_sign);

// Per-power-on recovery of the joint zeros: sweep each joint (alternating
// direction each period) until an index pulse is crossed, then snap the zero
// to the pulse-lattice point nearest the power-on pose. Joints whose
// power-on offset exceeds +-pi/9 land on a neighboring pulse and are
// reported misaligned by a whole number of spacings.
CalibrationResult soft_calibrate(const EncoderModel& encoders, const RobotModel& model,
                                 const SweepParams& params = {});

// Manual correction of misaligned joints: shifts each zero by a whole number
// of index spacings and regrades the result.
CalibrationResult apply_index_offsets(const EncoderModel& encoders, CalibrationResult result,
                                      const std::array<int, kNumJoints>& offsets);

// --- Setup state machine (Sweep -> Hold -> Run) -----------------------------

enum class InterfacePhase { Sweep, Hold, Run };
enum class InterfaceEvent { sweep_done, user_go, auto_go };

struct InterfaceState {
    InterfacePhase phase = InterfacePhase::Sweep;
    bool sweep_complete = false;
    double entered_at = 0.0;
};

struct IllegalTransition : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const char* to_string(InterfacePhase phase);
const char* to_string(InterfaceEvent event);

// Legal edges: Sweep -> Hold (sweep complete + go) and Hold -> Run (go).
// sweep_done marks completion without leaving Sweep. Anything else throws
// IllegalTransition naming the (state, event) pair.
InterfaceState state_machine_step(const InterfaceState& state, InterfaceEvent event,
                                  double now = 0.0);

// --- Frame timing ------------------------------------------------------------

struct TimingStats {
    double mean_us = 0.0;
    double max_us = 0.0;
    double p99_us = 0.0;
    long missed_deadlines = 0;  // frames strictly over 1000 us
    long frames = 0;
};

// Statistics over all recorded 1 ms frames. The deadline test is inclusive:
// exactly 1000 us is on time. Thread-safe so a console view can read while
// the control task records.
class TimingMonitor {
public:
    TimingStats record(double duration_us);
    TimingStats stats() const;
    void reset();

private:
    TimingStats compute_locked() const;
    mutable std::mutex mutex_;
    std::vector<double> samples_us_;
    double sum_us_ = 0.0;
    double max_us_ = 0.0;
    long missed_ = 0;
};

}  // namespace quadstack
