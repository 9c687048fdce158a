#include "shintani/chartab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "shintani/detail/modlin.hpp"
#include "shintani/errors.hpp"

namespace shintani {

namespace {

using detail::ModMatrix;
using detail::ModRow;
using detail::mod_inv;
using detail::mod_pow;

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::uint64_t dixon_prime(std::size_t order, std::size_t exponent) {
  const double bound = 2.0 * std::sqrt(static_cast<double>(order));
  for (std::uint64_t l = exponent + 1;; l += exponent) {
    if (static_cast<double>(l) > bound && is_prime(l)) return l;
  }
}

std::uint64_t primitive_root(std::uint64_t l) {
  std::vector<std::uint64_t> factors;
  std::uint64_t n = l - 1;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    factors.push_back(d);
    while (n % d == 0) n /= d;
  }
  if (n > 1) factors.push_back(n);
  for (std::uint64_t g = 2;; ++g) {
    bool ok = true;
    for (auto f : factors) ok = ok && mod_pow(g, (l - 1) / f, l) != 1;
    if (ok) return g;
  }
}

// Characteristic polynomial (low -> high, monic) via Hessenberg reduction.
std::vector<std::uint64_t> charpoly(ModMatrix h, std::uint64_t p) {
  const int n = static_cast<int>(h.size());
  for (int j = 0; j + 2 <= n; ++j) {
    int piv = j + 1;
    while (piv < n && h[piv][j] == 0) ++piv;
    if (piv == n) continue;
    if (piv != j + 1) {
      std::swap(h[piv], h[j + 1]);
      for (int r = 0; r < n; ++r) std::swap(h[r][piv], h[r][j + 1]);
    }
    const std::uint64_t iv = mod_inv(h[j + 1][j], p);
    for (int i = j + 2; i < n; ++i) {
      if (h[i][j] == 0) continue;
      const std::uint64_t f = h[i][j] * iv % p;
      for (int c = 0; c < n; ++c) h[i][c] = (h[i][c] + (p - f) * h[j + 1][c]) % p;
      for (int r = 0; r < n; ++r) h[r][j + 1] = (h[r][j + 1] + f * h[r][i]) % p;
    }
  }
  std::vector<std::vector<std::uint64_t>> polys(n + 1);
  polys[0] = {1};
  for (int m = 1; m <= n; ++m) {
    // (x - h[m-1][m-1]) * polys[m-1]
    std::vector<std::uint64_t> cur(m + 1, 0);
    for (int k = 0; k < m; ++k) {
      cur[k + 1] = (cur[k + 1] + polys[m - 1][k]) % p;
      cur[k] = (cur[k] + (p - h[m - 1][m - 1]) * polys[m - 1][k]) % p;
    }
    std::uint64_t prod = 1;
    for (int i = m - 1; i >= 1; --i) {
      prod = prod * h[i][i - 1] % p;
      if (prod == 0) break;
      const std::uint64_t c = h[i - 1][m - 1] * prod % p;
      for (int k = 0; k < static_cast<int>(polys[i - 1].size()); ++k)
        cur[k] = (cur[k] + (p - c) * polys[i - 1][k]) % p;
    }
    polys[m] = std::move(cur);
  }
  return polys[n];
}

struct Subspace {
  ModMatrix basis;  // RREF rows
  std::vector<int> pivots;
};

Subspace make_subspace(ModMatrix rows, std::uint64_t p) {
  Subspace s;
  s.pivots = detail::rref(rows, p);
  s.basis = std::move(rows);
  return s;
}

}  // namespace

CharacterTable character_table(const GroupPtr& g) {
  CharacterTable t;
  t.group = g;
  t.classes = conjugacy_classes(*g);
  const auto& cc = t.classes;
  const int r = static_cast<int>(cc.size());
  const std::size_t order = g->order();
  const std::uint64_t l = dixon_prime(order, g->exponent());

  std::vector<std::vector<Index>> members(r);
  for (Index x = 0; x < order; ++x) members[cc.class_of[x]].push_back(x);

  auto class_matrix = [&](int j) {
    ModMatrix a(r, ModRow(r, 0));
    for (Index x : members[j]) {
      const Index xi = g->inv(x);
      for (int i = 0; i < r; ++i) ++a[cc.class_of[g->mul(xi, cc.reps[i])]][i];
    }
    for (auto& row : a)
      for (auto& v : row) v %= l;
    return a;
  };

  ModMatrix ident(r, ModRow(r, 0));
  for (int i = 0; i < r; ++i) ident[i][i] = 1;
  std::vector<Subspace> spaces{make_subspace(ident, l)};
  for (int j = 1; j < r; ++j) {
    if (std::all_of(spaces.begin(), spaces.end(), [](const Subspace& s) { return s.basis.size() == 1; })) break;
    const ModMatrix a = class_matrix(j);
    std::vector<Subspace> next;
    for (auto& sp : spaces) {
      const int d = static_cast<int>(sp.basis.size());
      if (d == 1) {
        next.push_back(std::move(sp));
        continue;
      }
      // restricted matrix: column t = coordinates of A v_t at the pivots
      ModMatrix rm(d, ModRow(d, 0));
      for (int tcol = 0; tcol < d; ++tcol) {
        const auto& v = sp.basis[tcol];
        for (int s = 0; s < d; ++s) {
          const auto& arow = a[sp.pivots[s]];
          std::uint64_t acc = 0;
          for (int i = 0; i < r; ++i)
            if (v[i]) acc = (acc + arow[i] * v[i]) % l;
          rm[s][tcol] = acc;
        }
      }
      const auto cp = charpoly(rm, l);
      int found = 0;
      for (std::uint64_t lam = 0; lam < l; ++lam) {
        std::uint64_t val = 0;
        for (std::size_t k = cp.size(); k-- > 0;) val = (val * lam + cp[k]) % l;
        if (val != 0) continue;
        ModMatrix shifted = rm;
        for (int s = 0; s < d; ++s) shifted[s][s] = (shifted[s][s] + l - lam) % l;
        const auto ker = detail::nullspace(shifted, d, l);
        ModMatrix vecs;
        for (const auto& y : ker) {
          ModRow full(r, 0);
          for (int s = 0; s < d; ++s) {
            if (!y[s]) continue;
            for (int i = 0; i < r; ++i) full[i] = (full[i] + y[s] * sp.basis[s][i]) % l;
          }
          vecs.push_back(std::move(full));
        }
        found += static_cast<int>(vecs.size());
        next.push_back(make_subspace(std::move(vecs), l));
      }
      if (found != d) throw std::logic_error("class matrix is not diagonalizable modulo " + std::to_string(l));
    }
    spaces = std::move(next);
  }
  if (static_cast<int>(spaces.size()) != r) throw std::logic_error("class matrices did not separate the characters");

  const std::uint64_t e = g->exponent();
  const std::uint64_t z = mod_pow(primitive_root(l), (l - 1) / e, l);
  // classes of powers of each representative
  std::vector<std::vector<std::uint32_t>> power_classes(r);
  for (int c = 0; c < r; ++c) {
    Index x = 0;
    const std::size_t o = g->element_order(cc.reps[c]);
    for (std::size_t k = 0; k < o; ++k) {
      power_classes[c].push_back(cc.class_of[x]);
      x = g->mul(x, cc.reps[c]);
    }
  }

  for (const auto& sp : spaces) {
    const ModRow& v = sp.basis[0];
    if (v[0] == 0) throw std::logic_error("central character vanishes at the identity");
    const std::uint64_t iv0 = mod_inv(v[0], l);
    ModRow omega(r);
    for (int i = 0; i < r; ++i) omega[i] = v[i] * iv0 % l;
    std::uint64_t s = 0;
    for (int i = 0; i < r; ++i) {
      s = (s + omega[i] * omega[cc.inverse_class[i]] % l * mod_inv(cc.sizes[i] % l, l)) % l;
    }
    const std::uint64_t d2 = (order % l) * mod_inv(s, l) % l;
    std::uint64_t deg = 0;
    for (std::uint64_t d = 1; d * d <= order; ++d) {
      if (d * d % l == d2) {
        deg = d;
        break;
      }
    }
    if (deg == 0) throw std::logic_error("character degree not found");
    ModRow chi(r);
    for (int i = 0; i < r; ++i) chi[i] = deg * omega[i] % l * mod_inv(cc.sizes[i] % l, l) % l;
    std::vector<Cyclotomic> row(r);
    for (int c = 0; c < r; ++c) {
      const std::size_t o = power_classes[c].size();
      const std::uint64_t zo = mod_pow(z, e / o, l);
      const std::uint64_t inv_o = mod_inv(o % l, l);
      std::vector<std::int64_t> mu(o);
      for (std::size_t k = 0; k < o; ++k) {
        std::uint64_t acc = 0;
        // sum_t chi(g^t) zo^{-kt}
        const std::uint64_t step = mod_pow(mod_inv(zo, l), k, l);
        std::uint64_t w = 1;
        for (std::size_t tt = 0; tt < o; ++tt) {
          acc = (acc + chi[power_classes[c][tt]] * w) % l;
          w = w * step % l;
        }
        const std::uint64_t m = acc * inv_o % l;
        if (m > deg) throw std::logic_error("eigenvalue multiplicity out of range while lifting");
        mu[k] = static_cast<std::int64_t>(m);
      }
      row[c] = Cyclotomic::from_integer_coefficients(static_cast<int>(o), mu);
    }
    t.rows.push_back(std::move(row));
  }
  std::sort(t.rows.begin(), t.rows.end(), [](const auto& a, const auto& b) {
    const auto da = a[0].as_rational(), db = b[0].as_rational();
    if (*da != *db) return *da < *db;
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end()) < 0;
  });
  return t;
}

Cyclotomic inner_product(std::span<const Cyclotomic> f, std::span<const Cyclotomic> g, const CharacterTable& t) {
  if (f.size() != t.classes.size() || g.size() != t.classes.size()) {
    throw ValidationError("class function length does not match the class count");
  }
  Cyclotomic acc;
  for (std::size_t c = 0; c < f.size(); ++c) {
    acc += Cyclotomic(static_cast<std::int64_t>(t.classes.sizes[c])) * f[c] * g[c].conjugate();
  }
  return acc * Cyclotomic(Rational(1, static_cast<std::int64_t>(t.group->order())));
}

RowPermutation sigma_fixed_rows(const CharacterTable& t, const GroupMap& phi) {
  RowPermutation out;
  const std::size_t r = t.classes.size();
  std::vector<std::uint32_t> cmap(r);
  for (std::size_t c = 0; c < r; ++c) cmap[c] = t.classes.class_of[phi(t.classes.reps[c])];
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::vector<Cyclotomic> composed(r);
    for (std::size_t c = 0; c < r; ++c) composed[c] = t.rows[i][cmap[c]];
    int j = -1;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t.rows[k] == composed) {
        j = static_cast<int>(k);
        break;
      }
    }
    if (j < 0) throw std::logic_error("composition with the automorphism is not a row of the table");
    out.perm.push_back(j);
    if (j == static_cast<int>(i)) out.fixed.push_back(j);
  }
  return out;
}

std::vector<int> extensions_of(const CharacterTable& tn, int row, const CyclicExtension& ext, const CharacterTable& te) {
  const FinGroup& e = *ext.group;
  const std::size_t nn = ext.normal->order();
  const auto& chi = tn.rows.at(static_cast<std::size_t>(row));
  for (std::size_t c = 0; c < tn.classes.size(); ++c) {
    const Index y = tn.classes.reps[c];
    const Index conj = e.conjugate(ext.s, y);
    if (conj >= nn || !(chi[tn.classes.class_of[conj]] == chi[c])) {
      throw ValidationError("character is not fixed by the acting automorphism");
    }
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < te.size(); ++i) {
    bool ok = true;
    for (std::size_t c = 0; c < tn.classes.size() && ok; ++c) ok = te.value(i, tn.classes.reps[c]) == chi[c];
    if (ok) out.push_back(static_cast<int>(i));
  }
  if (out.size() != ext.m) {
    throw std::logic_error("expected " + std::to_string(ext.m) + " extensions, found " + std::to_string(out.size()));
  }
  // any two extensions differ by a linear character of the cyclic quotient
  const int m = static_cast<int>(ext.m);
  for (std::size_t k = 1; k < out.size(); ++k) {
    bool matched = false;
    for (int j = 0; j < m && !matched; ++j) {
      bool ok = true;
      for (std::size_t c = 0; c < te.classes.size() && ok; ++c) {
        const std::size_t coset = ext.coset(te.classes.reps[c]);
        const Cyclotomic lam = Cyclotomic::root_of_unity(m, static_cast<std::int64_t>(j * coset));
        ok = te.rows[out[k]][c] == lam * te.rows[out[0]][c];
      }
      matched = ok;
    }
    if (!matched) throw std::logic_error("extensions do not differ by a linear character of the quotient");
  }
  return out;
}

bool verify_character_table(const CharacterTable& t, std::string* failure) {
  auto fail = [&](const std::string& msg) {
    if (failure) *failure = msg;
    return false;
  };
  const FinGroup& g = *t.group;
  const auto& cc = t.classes;
  const std::size_t r = cc.size();
  if (t.size() != r) return fail("row count differs from class count");
  // row orthogonality
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      if (inner_product(t.rows[i], t.rows[j], t) != Cyclotomic(std::int64_t{i == j ? 1 : 0})) {
        return fail("rows " + std::to_string(i) + "," + std::to_string(j) + " not orthonormal");
      }
    }
  // column orthogonality
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b) {
      Cyclotomic s;
      for (std::size_t i = 0; i < r; ++i) s += t.rows[i][a] * t.rows[i][b].conjugate();
      const Cyclotomic expect(a == b ? static_cast<std::int64_t>(cc.centralizer_orders[a]) : 0);
      if (s != expect) return fail("columns " + std::to_string(a) + "," + std::to_string(b) + " not orthogonal");
    }
  // structure constants c_{jki} = #{(x,y) in C_j x C_k : xy = z_i}
  std::vector<std::vector<Index>> members(r);
  for (Index x = 0; x < g.order(); ++x) members[cc.class_of[x]].push_back(x);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t k = 0; k < r; ++k) {
      std::vector<std::int64_t> counted(r, 0);
      for (Index x : members[j])
        for (std::size_t i = 0; i < r; ++i)
          if (cc.class_of[g.mul(g.inv(x), cc.reps[i])] == k) ++counted[i];
      for (std::size_t i = 0; i < r; ++i) {
        Cyclotomic s;
        for (std::size_t c = 0; c < r; ++c) s += t.rows[c][j] * t.rows[c][k] * t.rows[c][i].conjugate() / t.rows[c][0];
        s *= Cyclotomic(Rational(static_cast<std::int64_t>(cc.sizes[j] * cc.sizes[k]), static_cast<std::int64_t>(g.order())));
        if (s != Cyclotomic(counted[i])) {
          return fail("structure constant (" + std::to_string(j) + "," + std::to_string(k) + "," + std::to_string(i) + ")");
        }
      }
    }
  return true;
}

std::string table_csv(const CharacterTable& t) {
  std::string out = "character";
  for (Index rep : t.classes.reps) out += ",\"" + t.group->describe(rep) + "\"";
  out += "\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += "chi_" + std::to_string(i);
    for (const auto& v : t.rows[i]) out += "," + v.str();
    out += "\n";
  }
  return out;
}

std::string table_json(const CharacterTable& t) {
  nlohmann::ordered_json j;
  j["order"] = t.group->order();
  auto& classes = j["classes"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < t.classes.size(); ++c) {
    classes.push_back({{"rep", t.classes.reps[c]}, {"label", t.group->describe(t.classes.reps[c])}, {"size", t.classes.sizes[c]}});
  }
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& v : row) r.push_back(v.str());
    rows.push_back(r);
  }
  return j.dump(2);
}

}  // namespace shintani
