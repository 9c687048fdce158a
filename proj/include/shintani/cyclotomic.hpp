#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shintani/rational.hpp"

namespace shintani {

// Largest N for which Q(zeta_N) arithmetic is permitted. Exceeding it throws
// CapExceeded.
int cyclotomic_order_cap();
void set_cyclotomic_order_cap(int cap);

struct RootOfUnity {
  int k = 0;
  int n = 1;  // value is zeta_n^k with gcd(k, n) = 1 (k = 0 iff n = 1)
  friend bool operator==(const RootOfUnity&, const RootOfUnity&) = default;
};

// Exact element of Q(zeta_N), stored in the Zumbroich basis of the smallest
// cyclotomic field containing it. Canonical: equal values have identical
// representations.
class Cyclotomic {
 public:
  struct Term {
    int exp;
    std::int64_t num;  // coefficient is num / den()
    friend bool operator==(const Term&, const Term&) = default;
  };

  Cyclotomic() = default;
  Cyclotomic(std::int64_t v);   // NOLINT(google-explicit-constructor)
  Cyclotomic(const Rational& r);  // NOLINT(google-explicit-constructor)

  // zeta_n^k
  static Cyclotomic root_of_unity(int n, std::int64_t k);
  // sum of coeff * zeta_n^exp over arbitrary exponents (reduced on construction)
  static Cyclotomic from_terms(int n, std::span<const std::pair<std::int64_t, Rational>> terms);
  // sum of coeffs[k] * zeta_n^k, coeffs.size() == n
  static Cyclotomic from_integer_coefficients(int n, std::span<const std::int64_t> coeffs);

  int order() const { return n_; }
  std::span<const Term> terms() const { return terms_; }
  std::int64_t den() const { return den_; }
  // coefficients over the canonical basis of Q(zeta_order()), exponent -> rational
  std::vector<std::pair<int, Rational>> coefficients() const;

  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const { return n_ == 1; }
  std::optional<Rational> as_rational() const;

  Cyclotomic operator-() const;
  friend Cyclotomic operator+(const Cyclotomic& a, const Cyclotomic& b);
  friend Cyclotomic operator-(const Cyclotomic& a, const Cyclotomic& b);
  friend Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& b);
  friend Cyclotomic operator/(const Cyclotomic& a, const Cyclotomic& b);
  Cyclotomic& operator+=(const Cyclotomic& o) { return *this = *this + o; }
  Cyclotomic& operator-=(const Cyclotomic& o) { return *this = *this - o; }
  Cyclotomic& operator*=(const Cyclotomic& o) { return *this = *this * o; }
  Cyclotomic& operator/=(const Cyclotomic& o) { return *this = *this / o; }

  Cyclotomic conjugate() const;
  // Galois automorphism zeta_N -> zeta_N^t, t coprime to the order
  Cyclotomic galois(std::int64_t t) const;
  Cyclotomic inverse() const;
  Cyclotomic pow(std::int64_t e) const;

  std::optional<RootOfUnity> as_root_of_unity() const;

  // Coefficient vector in Q(zeta_n) for a multiple n of order(); used to test
  // that re-embedding is lossless.
  std::vector<std::pair<int, Rational>> embedded_coefficients(int n) const;

  friend bool operator==(const Cyclotomic&, const Cyclotomic&) = default;
  // Deterministic total order (field order, then basis coefficients).
  friend std::strong_ordering operator<=>(const Cyclotomic& a, const Cyclotomic& b);

  // "c0 + c1*z(N)^1 + ..." ; "0" for zero.
  std::string str() const;
  static Cyclotomic parse(std::string_view s);

  std::size_t hash() const;

 private:
  int n_ = 1;
  std::vector<Term> terms_;
  std::int64_t den_ = 1;

  friend class CyclotomicBuilder;
};

// Returns zeta with f = zeta * g entrywise, zeta a root of unity; absent if
// lengths differ, supports differ, or no such root exists. All-zero pairs give 1.
std::optional<Cyclotomic> vector_ratio_root(std::span<const Cyclotomic> f, std::span<const Cyclotomic> g);

}  // namespace shintani

template <>
struct std::hash<shintani::Cyclotomic> {
  std::size_t operator()(const shintani::Cyclotomic& c) const noexcept { return c.hash(); }
};
