#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "quadstack/core.hpp"

namespace quadstack {

enum class ControlMode : uint8_t { onboard_pd = 1, torque = 2 };

// Wire layout (all little-endian, CRC-32 over every preceding byte):
//   command, onboard_pd: [mode u8][12 x (q_ref f32, dq_ref f32)][seq u32][crc u32] = 105 B
//   command, torque:     [mode u8][12 x tau f32][seq u32][crc u32]                 =  57 B
//   sensor:              [seq u32][12 x (q f32, dq f32)][imu 3 x f32][crc u32]     = 116 B
struct CommandPacket {
    ControlMode mode = ControlMode::onboard_pd;
    std::array<float, kNumJoints> q_ref{};
    std::array<float, kNumJoints> dq_ref{};
    std::array<float, kNumJoints> torque{};
    uint32_t sequence = 0;
};

struct SensorPacket {
    uint32_t sequence = 0;  // echo of the last command
    std::array<float, kNumJoints> q{};
    std::array<float, kNumJoints> dq{};
    std::array<float, 3> imu_rates{};  // roll, pitch, yaw rates
};

struct CodecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reflected CRC-32, polynomial 0x04C11DB7 (0xEDB88320 reflected).
uint32_t crc32(std::span<const uint8_t> data);

std::vector<uint8_t> encode_command(const CommandPacket& packet);
CommandPacket decode_command(std::span<const uint8_t> bytes);

std::vector<uint8_t> encode_sensor(const SensorPacket& packet);
SensorPacket decode_sensor(std::span<const uint8_t> bytes);

}  // namespace quadstack
