#pragma once

#include <stdexcept>
#include <string>

namespace uwmimo {

/// A single-path channel has a deterministic envelope; the envelope density
/// is undefined for it.
class DegenerateChannelError : public std::domain_error {
 public:
  explicit DegenerateChannelError(const std::string& what) : std::domain_error(what) {}
};

/// No chirp correlation peak cleared the detection threshold.
class NoPacketDetected : public std::runtime_error {
 public:
  explicit NoPacketDetected(const std::string& what) : std::runtime_error(what) {}
};

/// A received frame cannot be processed (zero pilot, short buffer, ...).
class InvalidFrame : public std::runtime_error {
 public:
  explicit InvalidFrame(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or out-of-range scenario configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace detail
}  // namespace uwmimo
