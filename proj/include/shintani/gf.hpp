#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace shintani {

// Largest ambient degree D a FieldTower may have (default 32).
int field_degree_cap();
void set_field_degree_cap(int cap);

// F_{p^D} with elements encoded as integers sum c_i p^i over the polynomial
// basis 1, x, ..., x^{D-1} modulo a fixed monic irreducible of degree D.
// Subfields ("levels") are the F_{p^d} for d | D.
class FieldTower {
 public:
  using Elem = std::uint64_t;

  // Ambient degree D = lcm(degrees); modulus is the lexicographically smallest
  // monic irreducible of degree D (coefficients compared from x^{D-1} down).
  static FieldTower build(int p, std::span<const int> degrees);

  int characteristic() const { return p_; }
  int degree() const { return d_; }
  std::uint64_t size() const { return size_; }
  // c_0 .. c_D, monic
  std::span<const int> modulus() const { return modulus_; }
  // requested degrees together with 1 and D, ascending
  std::span<const int> levels() const { return levels_; }
  bool has_level(int d) const;

  Elem add(Elem a, Elem b) const;
  Elem sub(Elem a, Elem b) const;
  Elem neg(Elem a) const;
  Elem mul(Elem a, Elem b) const;
  Elem inv(Elem a) const;
  Elem pow(Elem a, std::uint64_t e) const;

  // x -> x^{q^j}; q must be a power of p; j may be negative.
  Elem frobenius_power(Elem x, std::uint64_t q, std::int64_t j) const;
  bool in_level(Elem x, int d) const;
  // all elements of the level-d subfield, ascending by code
  std::vector<Elem> level_elements(int d) const;

  // All x in the level-d subfield with sum_i coeffs[i] * x^{q^i} = c,
  // ascending by code. Empty when there is none.
  std::vector<Elem> solve_linearized(std::span<const Elem> coeffs, std::uint64_t q, Elem c, int level) const;

  std::vector<int> coordinates(Elem x) const;
  Elem from_coordinates(std::span<const int> coords) const;
  // Ring embedding of `small` into this tower sending the generator x of
  // `small` to the least root of small.modulus(); indexed by small's codes.
  std::vector<Elem> embed_from(const FieldTower& small) const;
  // "[c0,c1,...]"
  std::string str(Elem x) const;
  // exponent f with q = p^f, or throws
  int log_p(std::uint64_t q) const;

 private:
  int p_ = 2;
  int d_ = 1;
  std::uint64_t size_ = 2;
  std::vector<int> modulus_;
  std::vector<int> levels_;
  std::vector<std::uint32_t> exp_;
  std::vector<std::uint32_t> log_;
  std::vector<Elem> pow_p_;  // p^i for i <= D

  Elem mul_generic(Elem a, Elem b) const;
  Elem pow_generic(Elem a, std::uint64_t e) const;
  Elem frobenius_exp(Elem x, int e) const;  // x^{p^e}, 0 <= e < D
  std::vector<std::vector<int>> level_basis(int d) const;
};

}  // namespace shintani
