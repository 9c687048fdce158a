#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shintani/csheaf.hpp"
#include "shintani/shintani.hpp"

namespace shintani {

// What a model is built from: a finite group with an automorphism, or the
// connected group U_n over the closure of F_p with Frobenius x -> x^(p^f).
struct ModelSource {
  GroupPtr group;
  std::optional<GroupMap> frobenius;
  int n = 0;
  int p = 0;
  int f = 0;

  static ModelSource finite(GroupPtr g, GroupMap frob);
  static ModelSource connected(int n, int p, int f);
  bool is_connected() const { return n > 0; }
  std::unique_ptr<DescentModel> build(const ModelOptions& opts = {}) const;
};

struct CheckResult {
  bool ok = false;
  std::string detail;
};

struct VerifyOptions {
  std::int64_t m_max = 48;
  int trials = 100;
  std::uint32_t seed = 1;
};

// Named exact checks run against one model. Expensive intermediate data
// (the model, its scan, the double simples) is shared between suites.
//
// Suites: orthonormality, sh1, ipf, theta, stabilization, eigen, matching,
// integrality, trace, algebra, lang, tiebreak, determinism. Suites that do
// not apply to the model kind are left out of applicable().
class Verifier {
 public:
  Verifier(ModelSource src, VerifyOptions opts = {});

  static const std::vector<std::string>& all_suites();
  std::vector<std::string> applicable() const;
  // throws ConfigError for an unknown or inapplicable name; CapExceeded and
  // ValidationError propagate
  CheckResult run(const std::string& suite);

  const DescentModel& model();
  const ScanResult& scan();

 private:
  CheckResult orthonormality();
  CheckResult sh1();
  CheckResult ipf();
  CheckResult theta();
  CheckResult stabilization();
  CheckResult eigen();
  CheckResult matching();
  CheckResult integrality();
  CheckResult trace();
  CheckResult algebra();
  CheckResult lang();
  CheckResult tiebreak();
  CheckResult determinism();

  std::vector<std::int64_t> levels() const;
  const FiniteModel& finite();
  const DoubleSimples& simples();

  ModelSource src_;
  VerifyOptions opts_;
  std::unique_ptr<DescentModel> model_;
  std::optional<ScanResult> scan_;
  std::optional<DoubleSimples> simples_;
};

// Solves F^m(z) = z g for `trials` random g in U_n(F_q), q = p^f, and checks
// each solution by direct substitution.
CheckResult check_lang_random(int n, int p, int f, std::int64_t m, int trials, std::uint32_t seed);

}  // namespace shintani
