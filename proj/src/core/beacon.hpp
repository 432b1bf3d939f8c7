#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "geometry.hpp"

namespace skypuck::wire {

/// Broadcast position payload. Coordinates ride the wire as 0.1 m signed
/// fixed-point, the timestamp as 0.01 s wrapping fixed-point.
struct PositionBeacon {
    uint32_t drone_id = 0;
    geom::EnuPosition position;
    uint16_t sequence = 0;
    double timestamp = 0.0;  // sender clock, seconds
};

/// SSID wire format, 27 of the 32 octets an SSID may carry:
///   0   magic "UB"            2 octets
///   2   version (0x01)        1
///   3   drone_id              4  (u32 BE)
///   7   east   0.1 m          4  (i32 BE)
///   11  north  0.1 m          4  (i32 BE)
///   15  up     0.1 m          3  (i24 BE)
///   18  sequence              2  (u16 BE)
///   20  timestamp 0.01 s      4  (u32 BE, wrapping)
///   24  checksum              2  (CRC-16/CCITT-FALSE over octets 0..23)
///   26  reserved (0x00)       1
inline constexpr size_t kSsidFrameSize = 27;
inline constexpr double kMaxBeaconCoordinate = 200000.0;  // meters

using SsidFrame = std::array<uint8_t, kSsidFrameSize>;

enum class SsidError {
    ok,
    bad_length,
    bad_checksum,
    bad_magic,
};

const char* to_string(SsidError err);

uint16_t crc16_ccitt_false(std::span<const uint8_t> data);

/// Throws std::out_of_range when a coordinate exceeds +-200 km.
SsidFrame encode_ssid(const PositionBeacon& beacon);

/// Inverse of encode_ssid. The checksum is verified before the header, so
/// random non-beacon SSIDs are rejected as bad_checksum with probability
/// ~ 1 - 2^-16.
SsidError decode_ssid(std::span<const uint8_t> frame, PositionBeacon& out);

/// Round to the 0.1 m wire grid (what a receiver will reconstruct).
geom::EnuPosition quantize_position(const geom::EnuPosition& p);

}  // namespace skypuck::wire
