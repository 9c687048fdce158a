#pragma once

// Independent model of Q(zeta_N): polynomials over Q reduced modulo the
// cyclotomic polynomial Phi_N. Used only as a test oracle.

#include <vector>

#include "shintani/cyclotomic.hpp"
#include "shintani/rational.hpp"

namespace oracle {

using shintani::Rational;

inline std::vector<long long> cyclotomic_polynomial(int n) {
  // x^n - 1 divided by Phi_d for every proper divisor d
  std::vector<long long> num(n + 1, 0);
  num[0] = -1;
  num[n] = 1;
  for (int d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    auto phi = cyclotomic_polynomial(d);
    std::vector<long long> q(num.size() - phi.size() + 1, 0);
    for (int i = static_cast<int>(num.size()) - 1; i >= static_cast<int>(phi.size()) - 1; --i) {
      long long c = num[i];
      int shift = i - (static_cast<int>(phi.size()) - 1);
      q[shift] = c;
      for (std::size_t j = 0; j < phi.size(); ++j) num[shift + j] -= c * phi[j];
    }
    num = q;
  }
  return num;
}

struct PolyField {
  int n;
  std::vector<long long> phi;
  explicit PolyField(int n_) : n(n_), phi(cyclotomic_polynomial(n_)) {}

  std::vector<Rational> reduce(std::vector<Rational> p) const {
    const int deg = static_cast<int>(phi.size()) - 1;
    for (int i = static_cast<int>(p.size()) - 1; i >= deg; --i) {
      Rational c = p[i];
      if (c.is_zero()) continue;
      for (int j = 0; j <= deg; ++j) p[i - deg + j] -= c * Rational(phi[j]);
    }
    p.resize(deg);
    return p;
  }

  std::vector<Rational> embed(const shintani::Cyclotomic& c) const {
    std::vector<Rational> p(n, Rational(0));
    const int s = n / c.order();
    for (const auto& [k, r] : c.coefficients()) p[k * s] += r;
    return reduce(p);
  }

  std::vector<Rational> mul(const std::vector<Rational>& a, const std::vector<Rational>& b) const {
    std::vector<Rational> p(a.size() + b.size(), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) p[i + j] += a[i] * b[j];
    return reduce(p);
  }

  std::vector<Rational> add(const std::vector<Rational>& a, const std::vector<Rational>& b) const {
    std::vector<Rational> p = a;
    for (std::size_t i = 0; i < b.size(); ++i) p[i] += b[i];
    return p;
  }
};

}  // namespace oracle
