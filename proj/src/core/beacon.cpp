#include "beacon.hpp"

#include <cmath>
#include <stdexcept>

namespace skypuck::wire {

namespace {

constexpr uint8_t kMagic0 = 'U';
constexpr uint8_t kMagic1 = 'B';
constexpr uint8_t kVersion = 0x01;

int32_t quantize_dm(double meters) {
    return static_cast<int32_t>(std::llround(meters * 10.0));
}

void put_u32(SsidFrame& f, size_t at, uint32_t v) {
    f[at] = static_cast<uint8_t>(v >> 24);
    f[at + 1] = static_cast<uint8_t>(v >> 16);
    f[at + 2] = static_cast<uint8_t>(v >> 8);
    f[at + 3] = static_cast<uint8_t>(v);
}

uint32_t get_u32(std::span<const uint8_t> f, size_t at) {
    return (static_cast<uint32_t>(f[at]) << 24) | (static_cast<uint32_t>(f[at + 1]) << 16) |
           (static_cast<uint32_t>(f[at + 2]) << 8) | static_cast<uint32_t>(f[at + 3]);
}

}  // namespace

const char* to_string(SsidError err) {
    switch (err) {
        case SsidError::ok: return "ok";
        case SsidError::bad_length: return "bad_length";
        case SsidError::bad_checksum: return "bad_checksum";
        case SsidError::bad_magic: return "bad_magic";
    }
    return "unknown";
}

uint16_t crc16_ccitt_false(std::span<const uint8_t> data) {
    uint16_t crc = 0xFFFF;
    for (uint8_t byte : data) {
        crc ^= static_cast<uint16_t>(byte) << 8;
        for (int i = 0; i < 8; ++i) {
            crc = (crc & 0x8000) ? static_cast<uint16_t>((crc << 1) ^ 0x1021)
                                 : static_cast<uint16_t>(crc << 1);
        }
    }
    return crc;
}

SsidFrame encode_ssid(const PositionBeacon& beacon) {
    const auto& p = beacon.position;
    if (std::abs(p.east) > kMaxBeaconCoordinate || std::abs(p.north) > kMaxBeaconCoordinate ||
        std::abs(p.up) > kMaxBeaconCoordinate) {
        throw std::out_of_range("encode_ssid: coordinate exceeds +-200 km");
    }
    SsidFrame f{};
    f[0] = kMagic0;
    f[1] = kMagic1;
    f[2] = kVersion;
    put_u32(f, 3, beacon.drone_id);
    put_u32(f, 7, static_cast<uint32_t>(quantize_dm(p.east)));
    put_u32(f, 11, static_cast<uint32_t>(quantize_dm(p.north)));
    const uint32_t up = static_cast<uint32_t>(quantize_dm(p.up)) & 0xFFFFFF;
    f[15] = static_cast<uint8_t>(up >> 16);
    f[16] = static_cast<uint8_t>(up >> 8);
    f[17] = static_cast<uint8_t>(up);
    f[18] = static_cast<uint8_t>(beacon.sequence >> 8);
    f[19] = static_cast<uint8_t>(beacon.sequence);
    const uint32_t ts =
        static_cast<uint32_t>(static_cast<uint64_t>(std::llround(beacon.timestamp * 100.0)));
    put_u32(f, 20, ts);
    const uint16_t crc = crc16_ccitt_false(std::span(f).first(24));
    f[24] = static_cast<uint8_t>(crc >> 8);
    f[25] = static_cast<uint8_t>(crc);
    f[26] = 0x00;
    return f;
}

SsidError decode_ssid(std::span<const uint8_t> frame, PositionBeacon& out) {
    if (frame.size() != kSsidFrameSize) {
        return SsidError::bad_length;
    }
    const uint16_t stored = static_cast<uint16_t>((frame[24] << 8) | frame[25]);
    if (crc16_ccitt_false(frame.first(24)) != stored) {
        return SsidError::bad_checksum;
    }
    if (frame[0] != kMagic0 || frame[1] != kMagic1 || frame[2] != kVersion) {
        return SsidError::bad_magic;
    }
    out.drone_id = get_u32(frame, 3);
    const auto east_dm = static_cast<int32_t>(get_u32(frame, 7));
    const auto north_dm = static_cast<int32_t>(get_u32(frame, 11));
    // sign-extend the 24-bit altitude
    uint32_t up_raw = (static_cast<uint32_t>(frame[15]) << 16) |
                      (static_cast<uint32_t>(frame[16]) << 8) | frame[17];
    if (up_raw & 0x800000) up_raw |= 0xFF000000;
    const auto up_dm = static_cast<int32_t>(up_raw);
    out.position = {east_dm / 10.0, north_dm / 10.0, up_dm / 10.0};
    out.sequence = static_cast<uint16_t>((frame[18] << 8) | frame[19]);
    out.timestamp = get_u32(frame, 20) / 100.0;
    return SsidError::ok;
}

geom::EnuPosition quantize_position(const geom::EnuPosition& p) {
    return {quantize_dm(p.east) / 10.0, quantize_dm(p.north) / 10.0, quantize_dm(p.up) / 10.0};
}

}  // namespace skypuck::wire
