#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shintani/chartab.hpp"
#include "shintani/cyclotomic.hpp"
#include "shintani/gf.hpp"
#include "shintani/group.hpp"

namespace shintani {

// Orbits of x: g -> x g phi(x)^{-1} on the whole group.
struct TwistedClasses {
  std::vector<Index> reps;  // least index in each orbit
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stabilizer_orders;
  std::vector<std::uint32_t> class_of;
  std::vector<Index> transporter;  // y -> x with x y phi(x)^{-1} = rep
  std::size_t size() const { return reps.size(); }
};

TwistedClasses twisted_classes(const FinGroup& g, const GroupMap& phi);

struct InnerForm {
  Index rep;        // h
  Subgroup fixed;   // G^{hF}: fixed points of x -> h F(x) h^{-1}
};

class InnerFormFamily {
 public:
  InnerFormFamily(GroupPtr g, GroupMap f);

  const GroupPtr& group() const { return group_; }
  const GroupMap& frobenius() const { return frob_; }
  const TwistedClasses& classes() const { return classes_; }
  std::size_t size() const { return forms_.size(); }
  const InnerForm& form(std::size_t i) const { return forms_[i]; }
  // computed on first use
  const CharacterTable& table(std::size_t i) const;

 private:
  GroupPtr group_;
  GroupMap frob_;
  TwistedClasses classes_;
  std::vector<InnerForm> forms_;
  mutable std::vector<std::unique_ptr<CharacterTable>> tables_;
};

InnerFormFamily inner_forms(GroupPtr g, const GroupMap& f);

enum class SpaceMode { finite_model, connected_unipotent };

// G \ R_{g1,g2}, R = {(g,h) : h g2(g) g1(h)^{-1} = g}, acted on by
// x.(g,h) = (x g g1(x)^{-1}, x h g2(x)^{-1}).
//
// In connected mode the space is R_{id,F} of a connected group, whose orbits
// are the classes of the finite group G^F; `group` is then G^F, the
// representatives are (x, 1) and both maps are the identity of G^F.
class TwistedOrbitSpace {
 public:
  static constexpr std::uint32_t npos = 0xffffffffu;

  TwistedOrbitSpace(GroupPtr g, GroupMap g1, GroupMap g2, SpaceMode m)
      : group(std::move(g)), gamma1(std::move(g1)), gamma2(std::move(g2)), mode(m) {}

  GroupPtr group;
  GroupMap gamma1;
  GroupMap gamma2;
  SpaceMode mode = SpaceMode::finite_model;
  std::vector<std::pair<Index, Index>> reps;  // least pair index g|G|+h
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stabilizers;

  std::size_t size() const { return reps.size(); }
  bool contains(Index g, Index h) const;
  // orbit of (g,h); throws ValidationError if the pair is outside R
  std::uint32_t locate(Index g, Index h) const;
  std::string json() const;

 private:
  std::vector<std::uint32_t> orbit_of_;  // finite: g|G|+h; connected: g

  friend std::shared_ptr<const TwistedOrbitSpace> r_space(GroupPtr, const GroupMap&, const GroupMap&);
  friend std::shared_ptr<const TwistedOrbitSpace> connected_space(GroupPtr);
};

using SpacePtr = std::shared_ptr<const TwistedOrbitSpace>;

SpacePtr r_space(GroupPtr g, const GroupMap& gamma1, const GroupMap& gamma2);
// R_{id,F} of a connected group from the classes of its finite fixed group.
SpacePtr connected_space(GroupPtr fixed_group);

// The spaces R_{F^a,F^b} of one (G,F), built once per (a mod n, b mod n).
class SpaceCache {
 public:
  SpaceCache(GroupPtr g, GroupMap f);
  const GroupPtr& group() const { return group_; }
  const GroupMap& frobenius() const { return frob_; }
  std::size_t frobenius_order() const { return n_; }
  const GroupMap& power(std::int64_t a) const;
  SpacePtr get(std::int64_t a, std::int64_t b) const;

 private:
  GroupPtr group_;
  GroupMap frob_;
  std::size_t n_;
  std::vector<GroupMap> powers_;
  mutable std::map<std::pair<std::size_t, std::size_t>, SpacePtr> spaces_;
};

struct ClassFunctionFamily {
  SpacePtr space;
  std::vector<Cyclotomic> values;

  ClassFunctionFamily() = default;
  explicit ClassFunctionFamily(SpacePtr s) : space(std::move(s)), values(space->size()) {}
  ClassFunctionFamily(SpacePtr s, std::vector<Cyclotomic> v);

  const Cyclotomic& at(Index g, Index h) const { return values[space->locate(g, h)]; }
  // value at an arbitrary group pair; 0 outside R
  Cyclotomic at_or_zero(Index g, Index h) const;
  bool is_zero() const;
};

ClassFunctionFamily operator*(const Cyclotomic& c, const ClassFunctionFamily& f);
ClassFunctionFamily operator+(const ClassFunctionFamily& a, const ClassFunctionFamily& b);

// Bijection of orbit sets; image[i] = orbit of target hit by source orbit i.
struct OrbitBijection {
  SpacePtr source;
  SpacePtr target;
  std::vector<std::uint32_t> image;
};

// Orbitwise application of a pair map, checked to be a bijection preserving
// stabilizer orders.
OrbitBijection orbit_map(SpacePtr source, SpacePtr target,
                         const std::function<std::pair<Index, Index>(Index, Index)>& f);
OrbitBijection compose(const OrbitBijection& first, const OrbitBijection& second);
// f on target -> f o map on source
ClassFunctionFamily pullback(const ClassFunctionFamily& f, const OrbitBijection& map);

// tau(g,h) = (h,g) onto R_{g2,g1}
OrbitBijection map_tau(const SpacePtr& s);
// t1(g,h) = (h g2(g), h) onto R_{g1 g2, g2}
OrbitBijection map_t1(const SpacePtr& s);
// t2(g,h) = (g, h g2(g)) onto R_{g1, g1 g2}
OrbitBijection map_t2(const SpacePtr& s);
// Same maps with the target taken from a cache of R_{F^a,F^b} spaces; the
// source must be cache.get(a, b).
OrbitBijection map_t1(const SpaceCache& cache, std::int64_t a, std::int64_t b);
OrbitBijection map_t2(const SpaceCache& cache, std::int64_t a, std::int64_t b);

// (g,h) -> (g h F(h) ... F^{m-1}(h), h), R_{id,F} -> R_{F^m,F}
OrbitBijection inverse_norm(const SpaceCache& cache, std::int64_t m);

// Solution of F^m(z) = z g in upper unitriangular matrices, F the q-power
// map, with z in the smallest tower level admitting one (least codes,
// entries solved along superdiagonals). Verified by substitution.
struct LangSolution {
  int level;
  std::vector<FieldTower::Elem> entries;
};
LangSolution lang_solve(const UnitriangularLaw& law, std::uint64_t q, std::int64_t m,
                        std::span<const FieldTower::Elem> g);
// Group-element form; throws ValidationError unless g is unitriangular.
LangSolution lang_solve(const FinGroup& g, std::uint64_t q, std::int64_t m, Index x);

// sum over orbits of f1 conj(f2) / |Stab|
Cyclotomic hermitian(const ClassFunctionFamily& f1, const ClassFunctionFamily& f2);

// f1 on R_{g1,F}, f2 on R_{g2,F}; result on `target` = R_{g1 g2,F}:
// (f1*f2)(g,h) = sum over g1 g1(g2) = g of f1(g1,h) f2(g2,h).
ClassFunctionFamily convolve(const ClassFunctionFamily& f1, const ClassFunctionFamily& f2, SpacePtr target);
// indicator of the orbits (1,h) in R_{id,F}: the convolution unit
ClassFunctionFamily unit_function(const SpacePtr& s);

// sum over H^1(F) forms h of d_h/|G^{hF}| against
// sum over H^1(F^2) forms t of (sum over h in G with h F(h) = t of d_[h]) / |G^{tF^2}|
bool trace_identity_check(const FinGroup& g, const GroupMap& f, std::span<const std::int64_t> dims);

}  // namespace shintani
