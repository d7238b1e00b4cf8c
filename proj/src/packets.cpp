#include "quadstack/packets.hpp"

#include <cstring>

namespace quadstack {

namespace {

constexpr size_t kPdPayload = 1 + 12 * 8 + 4;       // mode + 12*(q,dq) + seq
constexpr size_t kTorquePayload = 1 + 12 * 4 + 4;   // mode + 12*tau + seq
constexpr size_t kSensorPayload = 4 + 12 * 8 + 12;  // seq + 12*(q,dq) + imu

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 24));
}

void put_f32(std::vector<uint8_t>& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

uint32_t get_u32(std::span<const uint8_t> b, size_t off) {
    return static_cast<uint32_t>(b[off]) | (static_cast<uint32_t>(b[off + 1]) << 8) |
           (static_cast<uint32_t>(b[off + 2]) << 16) | (static_cast<uint32_t>(b[off + 3]) << 24);
}

float get_f32(std::span<const uint8_t> b, size_t off) {
    uint32_t bits = get_u32(b, off);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

void check_crc(std::span<const uint8_t> bytes) {
    uint32_t stored = get_u32(bytes, bytes.size() - 4);
    uint32_t computed = crc32(bytes.subspan(0, bytes.size() - 4));
    if (stored != computed) throw CodecError("packet CRC mismatch");
}

}  // namespace

uint32_t crc32(std::span<const uint8_t> data) {
    static const auto table = [] {
        std::array<uint32_t, 256> t{};
        for (uint32_t i = 0; i < 256; ++i) {
            uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    uint32_t crc = 0xFFFFFFFFu;
    for (uint8_t b : data) crc = table[(crc ^ b) & 0xFF] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

std::vector<uint8_t> encode_command(const CommandPacket& p) {
    std::vector<uint8_t> out;
    bool pd = p.mode == ControlMode::onboard_pd;
    out.reserve((pd ? kPdPayload : kTorquePayload) + 4);
    out.push_back(static_cast<uint8_t>(p.mode));
    if (pd) {
        for (int j = 0; j < kNumJoints; ++j) {
            put_f32(out, p.q_ref[j]);
            put_f32(out, p.dq_ref[j]);
        }
    } else {
        for (int j = 0; j < kNumJoints; ++j) put_f32(out, p.torque[j]);
    }
    put_u32(out, p.sequence);
    put_u32(out, crc32(out));
    return out;
}

CommandPacket decode_command(std::span<const uint8_t> bytes) {
    if (bytes.size() < 5) throw CodecError("command frame truncated");
    uint8_t mode = bytes[0];
    size_t expect;
    if (mode == static_cast<uint8_t>(ControlMode::onboard_pd))
        expect = kPdPayload + 4;
    else if (mode == static_cast<uint8_t>(ControlMode::torque))
        expect = kTorquePayload + 4;
    else
        throw CodecError("unknown command mode tag " + std::to_string(mode));
    if (bytes.size() != expect)
        throw CodecError("command frame length " + std::to_string(bytes.size()) + ", expected " +
                         std::to_string(expect));
    check_crc(bytes);

    CommandPacket p;
    p.mode = static_cast<ControlMode>(mode);
    size_t off = 1;
    if (p.mode == ControlMode::onboard_pd) {
        for (int j = 0; j < kNumJoints; ++j) {
            p.q_ref[j] = get_f32(bytes, off);
            p.dq_ref[j] = get_f32(bytes, off + 4);
            off += 8;
        }
    } else {
        for (int j = 0; j < kNumJoints; ++j) {
            p.torque[j] = get_f32(bytes, off);
            off += 4;
        }
    }
    p.sequence = get_u32(bytes, off);
    return p;
}

std::vector<uint8_t> encode_sensor(const SensorPacket& p) {
    std::vector<uint8_t> out;
    out.reserve(kSensorPayload + 4);
    put_u32(out, p.sequence);
    for (int j = 0; j < kNumJoints; ++j) {
        put_f32(out, p.q[j]);
        put_f32(out, p.dq[j]);
    }
    for (float v : p.imu_rates) put_f32(out, v);
    put_u32(out, crc32(out));
    return out;
}

SensorPacket decode_sensor(std::span<const uint8_t> bytes) {
    if (bytes.size() != kSensorPayload + 4)
        throw CodecError("sensor frame length " + std::to_string(bytes.size()) + ", expected " +
                         std::to_string(kSensorPayload + 4));
    check_crc(bytes);
    SensorPacket p;
    p.sequence = get_u32(bytes, 0);
    size_t off = 4;
    for (int j = 0; j < kNumJoints; ++j) {
        p.q[j] = get_f32(bytes, off);
        p.dq[j] = get_f32(bytes, off + 4);
        off += 8;
    }
    for (int i = 0; i < 3; ++i) {
        p.imu_rates[i] = get_f32(bytes, off);
        off += 4;
    }
    return p;
}

}  // namespace quadstack
