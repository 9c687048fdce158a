#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shintani/chartab.hpp"
#include "shintani/shintani.hpp"
#include "shintani/twist.hpp"

namespace shintani {

// Simple module (a, rho) of the Drinfeld double: a a class representative,
// rho an irreducible character of its centralizer.
struct DoubleSimple {
  Index a = 0;
  std::size_t class_index = 0;
  std::shared_ptr<const Subgroup> centralizer;
  std::shared_ptr<const CharacterTable> table;
  std::size_t row = 0;
  std::int64_t dim = 0;  // |class(a)| rho(1)
  Cyclotomic theta;      // rho(a) / rho(1)
};

struct DoubleSimples {
  GroupPtr group;
  ConjugacyClasses classes;
  std::vector<DoubleSimple> simples;  // class order, then table row order
};

DoubleSimples double_simples(const GroupPtr& g);

struct SigmaAction {
  std::vector<int> perm;                // simple i -> simple perm[i]
  std::vector<int> fixed;               // ascending
  std::vector<std::optional<Index>> witness;  // u with u sigma(a) u^{-1} = a, for fixed simples
};

SigmaAction sigma_action(const DoubleSimples& ds, const GroupMap& sigma);

// Extension data of a sigma-fixed simple: C_a x| <s>, s x s^{-1} = u sigma(x) u^{-1},
// s^n = u sigma(u) ... sigma^{n-1}(u), n the order of sigma.
struct CsTrace {
  const DoubleSimples* ds = nullptr;
  std::size_t simple = 0;
  GroupMap sigma;
  Index u = 0;
  CyclicExtension ext;
  std::shared_ptr<const CharacterTable> ext_table;
  int ext_row = 0;
};

CsTrace cs_trace_data(const DoubleSimples& ds, std::size_t simple, const GroupMap& sigma, Index u,
                      const ModelOptions& opts = {});
// Value at (g,h) in R_{id,sigma} computed with a chosen x, g = x a x^{-1}.
Cyclotomic cs_trace_value(const CsTrace& t, Index g, Index h, Index x);
// T_C on `space` = R_{id,sigma}; 0 off the class of a.
ClassFunctionFamily cs_trace_function(const CsTrace& t, const SpacePtr& space);

struct TheoremIIIReport {
  bool ok = false;
  std::size_t fixed_simples = 0;
  std::size_t almost_characters = 0;
  std::vector<int> partner;         // fixed simple k -> almost character index
  std::vector<Cyclotomic> ratio;    // T_C = ratio * almost[partner]
  std::vector<bool> eigen_ok;       // Theta T_C = theta_C^{-1} T_C
  std::vector<int> unmatched;       // fixed simples without a partner
  std::string summary() const;
};

TheoremIIIReport verify_theorem_iii(const FiniteModel& model, const std::vector<ClassFunctionFamily>& almost,
                                    const ModelOptions& opts = {});

struct IntegralityReport {
  bool dims_integral = true;
  bool sum_matches = false;
  bool twists_roots_of_unity = true;
  std::int64_t sum_dim_squared = 0;
  std::int64_t expected = 0;
  std::string witness;  // first failing simple, if any
  bool ok() const { return dims_integral && sum_matches && twists_roots_of_unity; }
};

IntegralityReport integrality_report(const DoubleSimples& ds);

}  // namespace shintani
