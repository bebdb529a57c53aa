#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crackdet {

/// Point lies at or behind the camera plane (z_C <= 0).
struct BehindCameraError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Pixel ray does not intersect the ground plane in front of the vehicle.
struct NoGroundIntersectionError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Invalid configuration (box larger than image, non-square crop, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Message stream violated the protocol contract.
struct ProtocolViolationError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Wire decode failure; offset points at the offending byte.
struct DecodeError : std::runtime_error {
    DecodeError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
          byte_offset(offset) {}
    std::size_t byte_offset;
};

}  // namespace crackdet
