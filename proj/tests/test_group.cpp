#include <random>

#include "doctest.h"
#include "oracle_group.hpp"
#include "shintani/errors.hpp"
#include "shintani/group.hpp"

using namespace shintani;

namespace {

GroupPtr s3() { return permutation_group(3, {{1, 0, 2}, {1, 2, 0}}); }
GroupPtr d4() { return permutation_group(4, {{1, 2, 3, 0}, {2, 1, 0, 3}}); }

std::shared_ptr<const FieldTower> tower(int p, std::vector<int> degs) {
  return std::make_shared<const FieldTower>(FieldTower::build(p, degs));
}

void check_class_invariants(const FinGroup& g) {
  const auto cc = conjugacy_classes(g);
  std::size_t total = 0;
  for (std::size_t i = 0; i < cc.size(); ++i) {
    total += cc.sizes[i];
    CHECK(cc.sizes[i] * cc.centralizer_orders[i] == g.order());
  }
  CHECK(total == g.order());
  CHECK(cc.reps[0] == 0);
  CHECK(cc.sizes[0] == 1);
  for (Index x = 0; x < g.order(); ++x) {
    const Index t = cc.transporter[x];
    CHECK(g.conjugate(t, x) == cc.reps[cc.class_of[x]]);
  }
  // agrees with brute force
  const auto brute = oracle::classes(g);
  REQUIRE(brute.size() == cc.size());
  for (std::size_t i = 0; i < brute.size(); ++i) {
    CHECK(brute[i][0] == cc.reps[i]);
    CHECK(brute[i].size() == cc.sizes[i]);
  }
}

}  // namespace

TEST_SUITE("grp") {
  TEST_CASE("build_group examples") {
    auto z3 = cyclic_group(3);
    CHECK(z3->order() == 3);
    auto s = s3();
    CHECK(s->order() == 6);
    auto f2 = tower(2, {1});
    auto u = unitriangular_group(f2, 3, 1);
    CHECK(u->order() == 8);
    CHECK(oracle::classes(*u).size() == 5);
    CHECK(conjugacy_classes(*u).size() == 5);
    // same group as a matrix group over F_2
    auto m = matrix_group(f2, 3, {{1, 1, 0, 0, 1, 0, 0, 0, 1}, {1, 0, 0, 0, 1, 1, 0, 0, 1}});
    CHECK(m->order() == 8);
    CHECK(oracle::isomorphic(*m, *u));
    CHECK(s->describe(1) == "(1,2)");
  }

  TEST_CASE("construction errors") {
    CHECK_THROWS_AS(permutation_group(3, {{0, 0, 1}}), ValidationError);
    auto f2 = tower(2, {1});
    CHECK_THROWS_AS(matrix_group(f2, 2, {{1, 1, 1, 1}}), ValidationError);
    const std::size_t old = group_order_cap();
    set_group_order_cap(100);
    CHECK_THROWS_AS(permutation_group(6, {{1, 0, 2, 3, 4, 5}, {1, 2, 3, 4, 5, 0}}), CapExceeded);
    set_group_order_cap(old);
    // a Latin square with identity that is not associative (order-5 loop)
    std::vector<std::vector<Index>> loop{{0, 1, 2, 3, 4}, {1, 0, 3, 4, 2}, {2, 4, 0, 1, 3}, {3, 2, 4, 0, 1}, {4, 3, 1, 2, 0}};
    CHECK_THROWS_AS(cayley_group(loop), ValidationError);
  }

  TEST_CASE("cayley tables") {
    auto s = s3();
    std::vector<std::vector<Index>> t(6, std::vector<Index>(6));
    // relabel so that the identity is label 3
    auto lab = [](Index x) { return static_cast<Index>((x + 3) % 6); };
    for (Index a = 0; a < 6; ++a)
      for (Index b = 0; b < 6; ++b) t[lab(a)][lab(b)] = lab(s->mul(a, b));
    auto c = cayley_group(t);
    CHECK(c->order() == 6);
    CHECK(c->describe(0) == "3");
    CHECK(oracle::isomorphic(*c, *s));
    check_class_invariants(*c);
  }

  TEST_CASE("automorphism examples") {
    auto z3 = cyclic_group(3);
    std::vector<Index> inv{2};
    auto a = automorphism(z3, inv);
    CHECK(a.order() == 2);
    std::vector<Index> bad{0};
    CHECK_THROWS_AS(automorphism(z3, bad), ValidationError);
    auto f4 = tower(2, {1, 2});
    auto u = unitriangular_group(f4, 3, 2);
    CHECK(u->order() == 64);
    auto fr = unitriangular_frobenius(u, 2);
    CHECK(fr.order() == 2);
    // S_3: swapping generators (12) and (123) is not a homomorphism
    auto s = s3();
    std::vector<Index> swapped{s->generators()[1], s->generators()[0]};
    CHECK_THROWS_WITH_AS(automorphism(s, swapped), doctest::Contains("witness"), ValidationError);
  }

  TEST_CASE("automorphism validation on random inner automorphisms") {
    std::mt19937_64 rng(4);
    for (auto g : {s3(), d4()}) {
      for (int t = 0; t < 10; ++t) {
        const Index h = static_cast<Index>(rng() % g->order());
        std::vector<Index> imgs;
        for (Index s : g->generators()) imgs.push_back(g->conjugate(h, s));
        auto m = automorphism(g, imgs);
        CHECK(m == GroupMap::inner(g, h));
        for (Index x = 0; x < g->order(); ++x)
          for (Index y = 0; y < g->order(); ++y) CHECK(m(g->mul(x, y)) == g->mul(m(x), m(y)));
      }
    }
  }

  TEST_CASE("fixed_subgroup examples") {
    auto z3 = cyclic_group(3);
    std::vector<Index> inv{2};
    CHECK(fixed_subgroup(automorphism(z3, inv)).group->order() == 1);
    auto s = s3();
    CHECK(fixed_subgroup(GroupMap::identity(s)).group->order() == 6);
    auto f4 = tower(2, {1, 2});
    auto u = unitriangular_group(f4, 3, 2);
    const auto* law = as_unitriangular(*u);
    std::size_t brute = 0;
    for (Index x = 0; x < u->order(); ++x) {
      auto e = law->entries(x);
      bool in_f2 = std::all_of(e.begin(), e.end(), [](auto v) { return v <= 1; });
      brute += in_f2;
    }
    CHECK(brute == 8);
    CHECK(fixed_subgroup(unitriangular_frobenius(u, 2)).group->order() == 8);
  }

  TEST_CASE("classes and centralizers") {
    auto s = s3();
    auto cc = conjugacy_classes(*s);
    CHECK(cc.size() == 3);
    CHECK(cc.centralizer_orders == std::vector<std::size_t>{6, 2, 3});
    for (std::size_t i = 0; i < cc.size(); ++i) CHECK(centralizer(s, cc.reps[i]).group->order() == cc.centralizer_orders[i]);
    auto z4 = cyclic_group(4);
    CHECK(conjugacy_classes(*z4).size() == 4);
    for (auto g : {s3(), d4(), z4, direct_product(s3(), cyclic_group(2))}) check_class_invariants(*g);
    auto f4 = tower(2, {1, 2});
    check_class_invariants(*unitriangular_group(f4, 3, 2));
    CHECK(direct_product(s3(), cyclic_group(2))->order() == 12);
    CHECK(conjugacy_classes(*direct_product(s3(), cyclic_group(2))).size() == 6);
  }

  TEST_CASE("cyclic_extension examples") {
    auto z3 = cyclic_group(3);
    std::vector<Index> inv{2};
    auto e = cyclic_extension(z3, automorphism(z3, inv), 2, 0);
    CHECK(e.group->order() == 6);
    CHECK(oracle::isomorphic(*e.group, *s3()));
    CHECK(e.group->mul(e.group->mul(e.s, 1), e.group->inv(e.s)) == 2);

    auto z2 = cyclic_group(2);
    auto p = cyclic_extension(z2, GroupMap::identity(z2), 3, 0);
    CHECK(oracle::isomorphic(*p.group, *direct_product(z2, cyclic_group(3))));

    auto f4 = tower(2, {1, 2});
    auto u = unitriangular_group(f4, 3, 2);
    auto big = cyclic_extension(u, unitriangular_frobenius(u, 2), 2, 0);
    CHECK(big.group->order() == 128);
    check_class_invariants(*big.group);
    // s^m = w and s x s^-1 = phi(x)
    auto fr = unitriangular_frobenius(u, 2);
    for (Index x = 0; x < u->order(); ++x) CHECK(big.group->conjugate(big.s, x) == fr(x));
    CHECK(big.group->pow(big.s, 2) == 0);

    // inconsistent data: phi^2 = id but w = a non-central element
    auto s = s3();
    CHECK_THROWS_AS(cyclic_extension(s, GroupMap::identity(s), 2, 1), ValidationError);
  }
}
