#include <random>
#include <set>

#include "doctest.h"
#include "shintani/errors.hpp"
#include "shintani/gf.hpp"

using shintani::FieldTower;
using Elem = FieldTower::Elem;

namespace {

// Schoolbook product of coordinate vectors reduced by the recorded modulus.
Elem naive_mul(const FieldTower& f, Elem a, Elem b) {
  const int p = f.characteristic(), d = f.degree();
  auto ca = f.coordinates(a), cb = f.coordinates(b);
  std::vector<long> r(2 * d, 0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) r[i + j] = (r[i + j] + static_cast<long>(ca[i]) * cb[j]) % p;
  const auto m = f.modulus();
  for (int i = 2 * d - 1; i >= d; --i) {
    long c = r[i];
    for (int j = 0; j <= d; ++j) r[i - d + j] = ((r[i - d + j] - c * m[j]) % p + p) % p;
  }
  std::vector<int> out(r.begin(), r.begin() + d);
  return f.from_coordinates(out);
}

Elem naive_pow(const FieldTower& f, Elem a, std::uint64_t e) {
  Elem r = 1;
  for (std::uint64_t i = 0; i < e; ++i) r = naive_mul(f, r, a);
  return r;
}

FieldTower tower(int p, std::initializer_list<int> degs) {
  std::vector<int> v(degs);
  return FieldTower::build(p, v);
}

}  // namespace

TEST_SUITE("gf") {
  TEST_CASE("build_tower examples") {
    auto f4 = tower(2, {1, 2});
    CHECK(f4.degree() == 2);
    CHECK(f4.size() == 4);
    CHECK(f4.level_elements(1) == std::vector<Elem>{0, 1});

    auto f16 = tower(2, {1, 2, 4});
    int count = 0;
    for (Elem x = 0; x < 16; ++x)
      if (naive_pow(f16, x, 4) == x) ++count;
    CHECK(count == 4);
    CHECK(f16.level_elements(2).size() == 4);
    for (Elem x : f16.level_elements(2)) CHECK(naive_pow(f16, x, 4) == x);

    auto f3 = tower(3, {1});
    CHECK(f3.size() == 3);
    CHECK_THROWS_AS(tower(4, {1}), shintani::ValidationError);
    CHECK_THROWS_AS(tower(2, {5, 7}), shintani::CapExceeded);
  }

  TEST_CASE("modulus is the least irreducible") {
    // brute force: a degree-D polynomial is irreducible iff it has no monic
    // factor of degree 1..D/2; check minimality against all smaller codes
    for (auto [p, d] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {2, 4}, {3, 2}, {2, 6}, {5, 2}}) {
      auto f = FieldTower::build(p, std::vector<int>{d});
      auto irreducible = [&](std::vector<int> poly) {
        // evaluate divisibility by every monic polynomial of degree 1..d/2
        for (int k = 1; k <= d / 2; ++k) {
          long total = 1;
          for (int i = 0; i < k; ++i) total *= p;
          for (long code = 0; code < total; ++code) {
            std::vector<int> g(k + 1, 0);
            g[k] = 1;
            long c = code;
            for (int i = 0; i < k; ++i) {
              g[i] = static_cast<int>(c % p);
              c /= p;
            }
            std::vector<long> r(poly.begin(), poly.end());
            for (int i = d; i >= k; --i) {
              long lead = ((r[i] % p) + p) % p;
              for (int j = 0; j <= k; ++j) r[i - k + j] = ((r[i - k + j] - lead * g[j]) % p + p) % p;
            }
            bool zero = true;
            for (int i = 0; i < k; ++i) zero = zero && r[i] % p == 0;
            if (zero) return false;
          }
        }
        return true;
      };
      std::vector<int> m(f.modulus().begin(), f.modulus().end());
      CHECK(irreducible(m));
      // no lexicographically smaller monic irreducible exists
      long total = 1;
      for (int i = 0; i < d; ++i) total *= p;
      for (long code = 0; code < total; ++code) {
        std::vector<int> g(d + 1, 0);
        g[d] = 1;
        long c = code;
        for (int i = 0; i < d; ++i) {
          g[i] = static_cast<int>(c % p);
          c /= p;
        }
        if (g == m) break;
        CHECK(!irreducible(g));
      }
    }
  }

  TEST_CASE("multiplication agrees with schoolbook arithmetic") {
    for (auto [p, d] : std::vector<std::pair<int, int>>{{2, 4}, {3, 2}, {3, 3}, {5, 2}, {2, 6}}) {
      auto f = FieldTower::build(p, std::vector<int>{d});
      for (Elem a = 0; a < f.size(); ++a)
        for (Elem b = 0; b < f.size(); ++b) REQUIRE(f.mul(a, b) == naive_mul(f, a, b));
    }
    std::mt19937_64 rng(1);
    for (int d : {20, 24, 30}) {
      auto f = FieldTower::build(2, std::vector<int>{d});
      std::uniform_int_distribution<Elem> u(0, f.size() - 1);
      for (int t = 0; t < 500; ++t) {
        Elem a = u(rng), b = u(rng);
        CHECK(f.mul(a, b) == naive_mul(f, a, b));
        if (a != 0) CHECK(f.mul(a, f.inv(a)) == 1);
      }
    }
  }

  TEST_CASE("frobenius_power examples and properties") {
    auto f4 = tower(2, {1, 2});
    for (Elem x : {Elem{0}, Elem{1}})
      for (int j = -3; j <= 3; ++j) CHECK(f4.frobenius_power(x, 2, j) == x);
    CHECK(f4.frobenius_power(2, 2, 1) == 3);
    CHECK(f4.frobenius_power(3, 2, 1) == 2);
    for (Elem x = 0; x < 4; ++x) CHECK(f4.frobenius_power(x, 2, 0) == x);

    auto f64 = tower(2, {1, 2, 3, 6});
    for (Elem x = 0; x < f64.size(); ++x) {
      CHECK(f64.frobenius_power(f64.frobenius_power(x, 4, 1), 4, -1) == x);
      Elem y = x;
      for (int k = 0; k < 2; ++k) y = f64.frobenius_power(y, 2, 3);
      CHECK(y == f64.frobenius_power(x, 2, 6));
      CHECK(f64.frobenius_power(x, 2, 1) == naive_pow(f64, x, 2));
    }
    for (int d : {1, 2, 3, 6}) {
      int fixed = 0;
      for (Elem x = 0; x < f64.size(); ++x) fixed += f64.frobenius_power(x, 2, d) == x;
      CHECK(fixed == (1 << d));
      CHECK(static_cast<int>(f64.level_elements(d).size()) == (1 << d));
    }
    CHECK_THROWS_AS(f64.frobenius_power(1, 3, 1), shintani::ValidationError);
  }

  TEST_CASE("solve_linearized examples") {
    auto f4 = tower(2, {1, 2});
    std::vector<Elem> as{1, 1};  // x + x^2
    CHECK(f4.solve_linearized(as, 2, 0, 1) == std::vector<Elem>{0, 1});
    CHECK(f4.solve_linearized(as, 2, 1, 1).empty());
    std::vector<Elem> expect;
    for (Elem x = 0; x < 4; ++x)
      if (!f4.in_level(x, 1) && f4.add(naive_mul(f4, x, x), x) == 1) expect.push_back(x);
    CHECK(expect.size() == 2);
    CHECK(f4.solve_linearized(as, 2, 1, 2) == expect);
    std::vector<Elem> id{1};
    for (Elem c = 0; c < 4; ++c) CHECK(f4.solve_linearized(id, 2, c, 2) == std::vector<Elem>{c});
    CHECK_THROWS_AS(f4.solve_linearized(as, 2, 1, 3), shintani::ValidationError);
  }

  TEST_CASE("solve_linearized matches enumeration and solutions form kernel cosets") {
    std::mt19937_64 rng(5);
    struct Case {
      int p;
      std::vector<int> degs;
      std::uint64_t q;
    };
    for (const auto& [p, degs, q] : std::vector<Case>{
             {2, {1, 2, 4}, 2}, {3, {1, 2}, 3}, {2, {2, 6}, 4}, {3, {1, 3}, 3}}) {
      auto f = FieldTower::build(p, degs);
      std::uniform_int_distribution<Elem> u(0, f.size() - 1);
      for (int t = 0; t < 30; ++t) {
        std::vector<Elem> coeffs{u(rng), u(rng), u(rng)};
        const Elem c = u(rng);
        for (int level : degs) {
          auto sols = f.solve_linearized(coeffs, q, c, level);
          std::vector<Elem> brute;
          for (Elem x : f.level_elements(level)) {
            Elem v = 0;
            for (std::size_t i = 0; i < coeffs.size(); ++i)
              v = f.add(v, naive_mul(f, coeffs[i], f.frobenius_power(x, q, static_cast<std::int64_t>(i))));
            if (v == c) brute.push_back(x);
          }
          CHECK(sols == brute);
          for (Elem s : sols)
            for (Elem r : sols) {
              const Elem d = f.sub(s, r);
              Elem v = 0;
              for (std::size_t i = 0; i < coeffs.size(); ++i)
                v = f.add(v, f.mul(coeffs[i], f.frobenius_power(d, q, static_cast<std::int64_t>(i))));
              CHECK(v == 0);
            }
        }
      }
    }
  }

  TEST_CASE("embeddings are ring homomorphisms") {
    auto f4 = tower(2, {2});
    auto f16 = tower(2, {4});
    auto e = f16.embed_from(f4);
    std::set<Elem> image(e.begin(), e.end());
    CHECK(image.size() == 4);
    for (Elem a = 0; a < 4; ++a)
      for (Elem b = 0; b < 4; ++b) {
        CHECK(e[f4.mul(a, b)] == f16.mul(e[a], e[b]));
        CHECK(e[f4.add(a, b)] == f16.add(e[a], e[b]));
      }
    CHECK(f16.str(1) == "[1,0,0,0]");
  }
}
