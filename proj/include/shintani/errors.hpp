#pragma once

#include <stdexcept>
#include <string>

namespace shintani {

// Input or internal-consistency check failed (bad generators, non-homomorphic
// automorphism data, broken precondition).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configured size bound was exceeded (group order, field degree,
// cyclotomic order, m_max).
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration or group spec.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace shintani
