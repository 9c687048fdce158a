#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shintani/checks.hpp"
#include "shintani/group.hpp"
#include "shintani/shintani.hpp"

namespace shintani::cli {

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kConfigError = 2, kCapExceeded = 3 };

struct SessionConfig {
  std::string spec_path;
  int field_cap = 32;
  std::size_t order_cap = 200000;
  std::int64_t m_max = 48;
  int cyclotomic_cap = 2520;
  std::string cache_dir;  // empty: no cache
  std::string format = "csv";
  bool tiebreak_override = false;
};

// A parsed group spec: either a finite group with an automorphism, or a
// connected unitriangular group over the closure of F_p.
struct ParsedSpec {
  std::string content;  // raw file bytes
  ModelSource source;
  std::string field_modulus;  // coefficients c_0..c_D of the tower modulus, when a field is involved
  std::vector<std::string> warnings;
};

// Throws ConfigError (with line or field path) on malformed input and
// ValidationError from group construction.
ParsedSpec parse_spec_text(const std::string& text);
ParsedSpec parse_spec(const std::string& path);

std::unique_ptr<DescentModel> make_model(const ParsedSpec& spec, const ModelOptions& opts);

struct CommandRequest {
  std::string command;  // classes, irreps, shintani, theta, scan, csheaf, verify
  std::map<std::string, std::string> params;
};

// Computes (or fetches from the cache) the command output; writes the
// artifact to `out` and diagnostics to `err`; returns an ExitCode.
int run_command(const SessionConfig& cfg, const CommandRequest& req, std::ostream& out, std::ostream& err);

// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(const std::string& bytes);

}  // namespace shintani::cli
