#include <algorithm>

#include "doctest.h"
#include "shintani/chartab.hpp"
#include "shintani/errors.hpp"

using namespace shintani;

namespace {

GroupPtr s3() { return permutation_group(3, {{1, 0, 2}, {1, 2, 0}}); }
GroupPtr d4() { return permutation_group(4, {{1, 2, 3, 0}, {2, 1, 0, 3}}); }
GroupPtr q8() {
  // quaternion units as a Cayley table on {1,-1,i,-i,j,-j,k,-k}
  const int sign[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
  const int unit[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  std::vector<std::vector<Index>> table(8, std::vector<Index>(8));
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      const int ua = a / 2, ub = b / 2;
      const int s = sign[ua][ub] * (a % 2 ? -1 : 1) * (b % 2 ? -1 : 1);
      table[a][b] = static_cast<Index>(2 * unit[ua][ub] + (s < 0 ? 1 : 0));
    }
  return cayley_group(table);
}
GroupPtr a5() { return permutation_group(5, {{1, 2, 0, 3, 4}, {1, 2, 3, 4, 0}}); }

std::shared_ptr<const FieldTower> tower(int p, std::vector<int> degs) {
  return std::make_shared<const FieldTower>(FieldTower::build(p, degs));
}

// Group-algebra oracle: e_i = chi_i(1)/|G| sum chi_i(g^-1) g must be
// orthogonal idempotents summing to 1, which characterizes the irreducible
// characters among class functions.
void check_idempotents(const CharacterTable& t) {
  const FinGroup& g = *t.group;
  const std::size_t n = g.order();
  std::vector<std::vector<Cyclotomic>> e(t.size(), std::vector<Cyclotomic>(n));
  const Cyclotomic inv_order(Rational(1, static_cast<std::int64_t>(n)));
  for (std::size_t i = 0; i < t.size(); ++i)
    for (Index x = 0; x < n; ++x) e[i][x] = t.degree(i) * inv_order * t.value(i, g.inv(x));
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i; j < t.size(); ++j) {
      std::vector<Cyclotomic> prod(n);
      for (Index x = 0; x < n; ++x) {
        if (e[i][x].is_zero()) continue;
        for (Index y = 0; y < n; ++y) prod[g.mul(x, y)] += e[i][x] * e[j][y];
      }
      if (i == j) {
        CHECK(prod == e[i]);
      } else {
        CHECK(std::all_of(prod.begin(), prod.end(), [](const Cyclotomic& c) { return c.is_zero(); }));
      }
    }
  std::vector<Cyclotomic> sum(n);
  for (const auto& ei : e)
    for (Index x = 0; x < n; ++x) sum[x] += ei[x];
  CHECK(sum[0] == Cyclotomic(1));
  for (Index x = 1; x < n; ++x) CHECK(sum[x].is_zero());
}

std::vector<std::int64_t> degrees(const CharacterTable& t) {
  std::vector<std::int64_t> d;
  for (std::size_t i = 0; i < t.size(); ++i) d.push_back(t.degree(i).as_rational()->num());
  return d;
}

}  // namespace

TEST_SUITE("chartab") {
  TEST_CASE("small tables") {
    const auto t = character_table(s3());
    CHECK(degrees(t) == std::vector<std::int64_t>{1, 1, 2});
    CHECK(verify_character_table(t));
    check_idempotents(t);

    const auto triv = character_table(trivial_group());
    REQUIRE(triv.size() == 1);
    CHECK(triv.rows[0][0] == Cyclotomic(1));

    const auto z4 = character_table(cyclic_group(4));
    REQUIRE(z4.size() == 4);
    // each row is x -> i^{jx} for some j, and all four j occur
    std::vector<int> seen;
    for (std::size_t r = 0; r < 4; ++r) {
      for (int j = 0; j < 4; ++j) {
        bool ok = true;
        for (Index x = 0; x < 4; ++x) ok = ok && z4.value(r, x) == Cyclotomic::root_of_unity(4, j * x);
        if (ok) seen.push_back(j);
      }
    }
    std::sort(seen.begin(), seen.end());
    CHECK(seen == std::vector<int>{0, 1, 2, 3});
  }

  TEST_CASE("tables agree with the group-algebra oracle") {
    for (const auto& g : {s3(), d4(), q8(), cyclic_group(6), cyclic_group(5), direct_product(cyclic_group(2), s3())}) {
      CAPTURE(g->name());
      const auto t = character_table(g);
      CHECK(verify_character_table(t));
      check_idempotents(t);
    }
  }

  TEST_CASE("D4 and Q8 have equal degree lists") {
    const auto td = character_table(d4());
    const auto tq = character_table(q8());
    CHECK(degrees(td) == std::vector<std::int64_t>{1, 1, 1, 1, 2});
    CHECK(degrees(tq) == degrees(td));
  }

  TEST_CASE("A5 has golden-ratio values") {
    const auto t = character_table(a5());
    CHECK(degrees(t) == std::vector<std::int64_t>{1, 3, 3, 4, 5});
    CHECK(verify_character_table(t));
    const Cyclotomic z2 = Cyclotomic::root_of_unity(5, 2), z3 = Cyclotomic::root_of_unity(5, 3);
    const Cyclotomic golden = -(z2 + z3);
    const Cyclotomic other = Cyclotomic(1) - golden;
    int hits = 0;
    for (std::size_t r = 0; r < t.size(); ++r)
      for (const auto& v : t.rows[r]) hits += (v == golden || v == other) ? 1 : 0;
    CHECK(hits == 4);
  }

  TEST_CASE("unitriangular groups") {
    auto f2 = tower(2, {1});
    const auto t2 = character_table(unitriangular_group(f2, 3, 1));
    CHECK(degrees(t2) == std::vector<std::int64_t>{1, 1, 1, 1, 2});
    auto f4 = tower(2, {2});
    const auto t4 = character_table(unitriangular_group(f4, 3, 2));
    std::vector<std::int64_t> expect(16, 1);
    expect.insert(expect.end(), 3, 4);
    CHECK(degrees(t4) == expect);
    CHECK(verify_character_table(t4));
  }

  TEST_CASE("sigma_fixed_rows") {
    auto z3 = cyclic_group(3);
    const Index inv3[] = {2};
    const auto t3 = character_table(z3);
    const auto rp = sigma_fixed_rows(t3, automorphism(z3, inv3));
    CHECK(rp.fixed == std::vector<int>{0});
    CHECK(rp.perm == std::vector<int>{0, 2, 1});

    auto g = s3();
    const auto ts = character_table(g);
    const auto inner = sigma_fixed_rows(ts, GroupMap::inner(g, 1));
    CHECK(inner.fixed == std::vector<int>{0, 1, 2});

    auto z4 = cyclic_group(4);
    const Index inv4[] = {3};
    CHECK(sigma_fixed_rows(character_table(z4), automorphism(z4, inv4)).fixed.size() == 2);
  }

  TEST_CASE("extensions_of") {
    auto z3 = cyclic_group(3);
    const Index inv3[] = {2};
    const auto ext = cyclic_extension(z3, automorphism(z3, inv3), 2, 0);
    const auto tn = character_table(z3);
    const auto te = character_table(ext.group);
    CHECK(degrees(te) == std::vector<std::int64_t>{1, 1, 2});
    CHECK(extensions_of(tn, 0, ext, te) == std::vector<int>{0, 1});
    CHECK_THROWS_AS(extensions_of(tn, 1, ext, te), ValidationError);

    // N x Z/m: every character has m extensions
    auto g = s3();
    const auto prod = cyclic_extension(g, GroupMap::identity(g), 3, 0);
    const auto tg = character_table(g);
    const auto tp = character_table(prod.group);
    CHECK(tp.size() == 9);
    for (int r = 0; r < 3; ++r) CHECK(extensions_of(tg, r, prod, tp).size() == 3);

    // Frobenius acting on U_3(F_4): |Irr E| = 2 f + (r - f) / 2
    auto f4 = tower(2, {2});
    auto u = unitriangular_group(f4, 3, 2);
    const auto fr = unitriangular_frobenius(u, 2);
    const auto eu = cyclic_extension(u, fr, 2, 0);
    const auto tu = character_table(u);
    const auto teu = character_table(eu.group);
    CHECK(verify_character_table(teu));
    const auto fixed = sigma_fixed_rows(tu, fr).fixed;
    CHECK(teu.size() == 2 * fixed.size() + (tu.size() - fixed.size()) / 2);
    for (int r : fixed) CHECK(extensions_of(tu, r, eu, teu).size() == 2);
  }

  TEST_CASE("emitters") {
    const auto t = character_table(s3());
    const auto csv = table_csv(t);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(table_json(t).find("\"rows\"") != std::string::npos);
  }
}
