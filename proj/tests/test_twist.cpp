#include <random>
#include <set>

#include "doctest.h"
#include "shintani/errors.hpp"
#include "shintani/twist.hpp"

using namespace shintani;

namespace {

GroupPtr s3() { return permutation_group(3, {{1, 0, 2}, {1, 2, 0}}); }
GroupPtr d4() { return permutation_group(4, {{1, 2, 3, 0}, {2, 1, 0, 3}}); }

std::shared_ptr<const FieldTower> tower(int p, std::vector<int> degs) {
  return std::make_shared<const FieldTower>(FieldTower::build(p, degs));
}

GroupMap inversion(const GroupPtr& g) {
  return automorphism_from_function(g, [&](Index x) { return g->inv(x); });
}

struct Pair {
  GroupPtr g;
  GroupMap f;
};

std::vector<Pair> test_pairs() {
  auto z3 = cyclic_group(3), z4 = cyclic_group(4), s = s3(), d = d4();
  return {{z3, inversion(z3)},
          {z4, inversion(z4)},
          {s, GroupMap::identity(s)},
          {s, GroupMap::inner(s, 1)},
          {d, GroupMap::identity(d)},
          {trivial_group(), GroupMap::identity(trivial_group())}};
}

// Orbits of an arbitrary action by explicit orbit sets.
std::set<std::set<std::pair<Index, Index>>> brute_orbits(const FinGroup& g, const GroupMap& g1, const GroupMap& g2) {
  std::set<std::set<std::pair<Index, Index>>> out;
  for (Index a = 0; a < g.order(); ++a)
    for (Index b = 0; b < g.order(); ++b) {
      if (g.mul(g.mul(b, g2(a)), g.inv(g1(b))) != a) continue;
      std::set<std::pair<Index, Index>> orbit;
      for (Index x = 0; x < g.order(); ++x) {
        orbit.emplace(g.mul(g.mul(x, a), g.inv(g1(x))), g.mul(g.mul(x, b), g.inv(g2(x))));
      }
      out.insert(orbit);
    }
  return out;
}

Cyclotomic random_value(std::mt19937& rng) {
  std::uniform_int_distribution<int> c(-3, 3), k(0, 11);
  return Cyclotomic(std::int64_t{c(rng)}) + Cyclotomic(std::int64_t{c(rng)}) * Cyclotomic::root_of_unity(12, k(rng));
}

ClassFunctionFamily random_function(const SpacePtr& s, std::mt19937& rng) {
  ClassFunctionFamily f(s);
  for (auto& v : f.values) v = random_value(rng);
  return f;
}

// F^m(z) = z g for 3x3 unitriangular entry vectors (a12, a13, a23), by hand.
bool lang_holds(const FieldTower& f, std::uint64_t q, std::int64_t m, const std::vector<FieldTower::Elem>& z,
                const std::vector<FieldTower::Elem>& g) {
  const FieldTower::Elem p12 = f.add(z[0], g[0]);
  const FieldTower::Elem p13 = f.add(f.add(z[1], g[1]), f.mul(z[0], g[2]));
  const FieldTower::Elem p23 = f.add(z[2], g[2]);
  auto fr = [&](FieldTower::Elem e) {
    for (std::int64_t k = 0; k < m; ++k) e = f.pow(e, q);
    return e;
  };
  return fr(z[0]) == p12 && fr(z[1]) == p13 && fr(z[2]) == p23;
}

}  // namespace

TEST_SUITE("twist") {
  TEST_CASE("twisted classes") {
    auto z3 = cyclic_group(3);
    const auto tc = twisted_classes(*z3, inversion(z3));
    CHECK(tc.size() == 1);
    CHECK(tc.sizes[0] == 3);
    CHECK(tc.stabilizer_orders[0] == 1);

    auto s = s3();
    CHECK(twisted_classes(*s, GroupMap::identity(s)).size() == 3);

    for (const auto& [g, f] : test_pairs()) {
      const auto t = twisted_classes(*g, f);
      std::set<std::set<Index>> brute;
      for (Index y = 0; y < g->order(); ++y) {
        std::set<Index> orbit;
        for (Index x = 0; x < g->order(); ++x) orbit.insert(g->mul(g->mul(x, y), g->inv(f(x))));
        brute.insert(orbit);
      }
      CHECK(t.size() == brute.size());
      for (Index y = 0; y < g->order(); ++y) {
        const Index x = t.transporter[y];
        CHECK(g->mul(g->mul(x, y), g->inv(f(x))) == t.reps[t.class_of[y]]);
        CHECK(t.reps[t.class_of[y]] <= y);
      }
    }
  }

  TEST_CASE("inner forms") {
    auto s = s3();
    const auto fam = inner_forms(s, GroupMap::identity(s));
    REQUIRE(fam.size() == 3);
    std::multiset<std::size_t> orders;
    for (std::size_t i = 0; i < 3; ++i) orders.insert(fam.form(i).fixed.group->order());
    CHECK(orders == std::multiset<std::size_t>{2, 3, 6});

    auto z3 = cyclic_group(3);
    const auto inv = inner_forms(z3, inversion(z3));
    REQUIRE(inv.size() == 1);
    CHECK(inv.form(0).fixed.group->order() == 1);

    auto z4 = cyclic_group(4);
    const auto ab = inner_forms(z4, GroupMap::identity(z4));
    CHECK(ab.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(ab.form(i).fixed.group->order() == 4);
    CHECK(ab.table(0).size() == 4);
  }

  TEST_CASE("orbit spaces match brute force") {
    auto s = s3();
    CHECK(r_space(s, GroupMap::identity(s), GroupMap::identity(s))->size() == 8);
    CHECK(r_space(trivial_group(), GroupMap::identity(trivial_group()), GroupMap::identity(trivial_group()))->size() == 1);
    for (const auto& [g, f] : test_pairs()) {
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const auto g1 = f.power(a), g2 = f.power(b);
          const auto sp = r_space(g, g1, g2);
          const auto brute = brute_orbits(*g, g1, g2);
          CHECK(sp->size() == brute.size());
          std::size_t total = 0, r = 0;
          for (const auto& o : brute) r += o.size();
          for (std::size_t i = 0; i < sp->size(); ++i) {
            total += sp->sizes[i];
            CHECK(sp->sizes[i] * sp->stabilizers[i] == g->order());
            const auto [x, y] = sp->reps[i];
            CHECK(g->mul(g->mul(y, g2(x)), g->inv(g1(y))) == x);
          }
          CHECK(total == r);
        }
    }
    auto z3 = cyclic_group(3);
    const auto inv = inversion(z3);
    // 2h = 2g in Z/3 forces h = g: three pairs, one orbit per g up to x -> g + 2x
    const auto sp = r_space(z3, inv, inv);
    CHECK(sp->size() == brute_orbits(*z3, inv, inv).size());
  }

  TEST_CASE("tau t1 t2 are orbit bijections") {
    for (const auto& [g, f] : test_pairs()) {
      const auto sp = r_space(g, GroupMap::identity(g), f);
      const auto tau = map_tau(sp);
      const auto back = map_tau(tau.target);
      const auto tt = compose(tau, back);
      for (std::size_t i = 0; i < sp->size(); ++i) CHECK(tt.image[i] == i);
      const auto t1 = map_t1(sp);
      const auto t2 = map_t2(sp);
      CHECK(t1.image.size() == sp->size());
      CHECK(t2.image.size() == sp->size());
      // images satisfy the target relation by construction of locate(); spot the formula
      for (std::size_t i = 0; i < sp->size(); ++i) {
        const auto [x, y] = sp->reps[i];
        CHECK(t1.target->locate(g->mul(y, f(x)), y) == t1.image[i]);
      }
    }
  }

  TEST_CASE("inverse norm is an iterated t1") {
    for (const auto& [g, f] : test_pairs()) {
      const SpaceCache cache(g, f);
      for (std::int64_t m = 1; m <= 8; ++m) {
        const auto in = inverse_norm(cache, m);
        auto it = map_t1(cache, 0, 1);
        for (std::int64_t k = 1; k < m; ++k) it = compose(it, map_t1(cache, k, 1));
        CHECK(in.image == it.image);
        CHECK(in.target->size() == cache.get(0, 1)->size());
      }
    }
    // m = 1 fixes (g,1)
    auto s = s3();
    const SpaceCache cache(s, GroupMap::identity(s));
    const auto in = inverse_norm(cache, 1);
    const auto src = cache.get(0, 1);
    for (std::size_t i = 0; i < src->size(); ++i)
      if (src->reps[i].second == 0) CHECK(in.image[i] == i);
  }

  TEST_CASE("hermitian product") {
    std::mt19937 rng(11);
    auto s = s3();
    const auto sp = r_space(s, GroupMap::identity(s), GroupMap::identity(s));
    const auto f = random_function(sp, rng);
    CHECK(hermitian(f, ClassFunctionFamily(sp)).is_zero());
    for (std::size_t i = 0; i < sp->size(); ++i)
      for (std::size_t j = 0; j < sp->size(); ++j) {
        ClassFunctionFamily a(sp), b(sp);
        a.values[i] = 1;
        b.values[j] = 1;
        const Cyclotomic expect = i == j ? Cyclotomic(Rational(1, static_cast<std::int64_t>(sp->stabilizers[i]))) : Cyclotomic();
        CHECK(hermitian(a, b) == expect);
      }
    CHECK(hermitian(f, f).as_rational().has_value());
    const auto other = r_space(s, GroupMap::inner(s, 1), GroupMap::identity(s));
    CHECK_THROWS_AS(hermitian(f, ClassFunctionFamily(other)), ValidationError);
  }

  TEST_CASE("convolution algebra and module identity") {
    std::mt19937 rng(5);
    for (const auto& [g, f] : test_pairs()) {
      const SpaceCache cache(g, f);
      const auto base = cache.get(0, 1);
      const auto unit = unit_function(base);
      for (int trial = 0; trial < 5; ++trial) {
        const auto a = random_function(base, rng), b = random_function(base, rng), c = random_function(base, rng);
        CHECK(convolve(unit, a, base).values == a.values);
        CHECK(convolve(a, b, base).values == convolve(b, a, base).values);
        CHECK(convolve(convolve(a, b, base), c, base).values == convolve(a, convolve(b, c, base), base).values);
        // module over Fun([G],F) and t1 pullback compatibility, R_{F,F} -> R_{F^2,F}
        const auto t1 = map_t1(cache, 1, 1);
        const auto f2 = random_function(t1.target, rng);
        const auto lhs = convolve(a, pullback(f2, t1), cache.get(1, 1));
        const auto rhs = pullback(convolve(a, f2, t1.target), t1);
        CHECK(lhs.values == rhs.values);
      }
    }
  }

  TEST_CASE("lang_solve") {
    // degree f m p^k with p^k >= 3 always admits solutions
    auto f2 = tower(2, {1, 2, 4, 8});
    auto u = unitriangular_group(f2, 3, 1);
    const auto id = lang_solve(*u, 2, 1, 0);
    CHECK(std::all_of(id.entries.begin(), id.entries.end(), [](auto e) { return e == 0; }));
    const auto* law = as_unitriangular(*u);
    for (Index x = 0; x < u->order(); ++x) {
      for (std::int64_t m : {1, 2}) {
        const auto sol = lang_solve(*u, 2, m, x);
        CHECK(lang_holds(*f2, 2, m, sol.entries, law->entries(x)));
      }
    }
    auto f4 = tower(2, {2, 8});
    auto u4 = unitriangular_group(f4, 3, 2);
    const auto* law4 = as_unitriangular(*u4);
    std::mt19937 rng(17);
    std::uniform_int_distribution<Index> pick(0, static_cast<Index>(u4->order() - 1));
    for (int trial = 0; trial < 100; ++trial) {
      const Index x = pick(rng);
      const auto sol = lang_solve(*u4, 4, 1, x);
      CHECK(lang_holds(*f4, 4, 1, sol.entries, law4->entries(x)));
    }
    CHECK_THROWS_AS(lang_solve(*s3(), 2, 1, 1), ValidationError);
  }

  TEST_CASE("trace identity") {
    std::mt19937 rng(3);
    for (const auto& [g, f] : test_pairs()) {
      const auto forms = twisted_classes(*g, f);
      std::vector<std::int64_t> zero(forms.size(), 0);
      CHECK(trace_identity_check(*g, f, zero));
      std::uniform_int_distribution<std::int64_t> d(0, 20);
      for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::int64_t> dims(forms.size());
        for (auto& x : dims) x = d(rng);
        CHECK(trace_identity_check(*g, f, dims));
      }
    }
  }
}
