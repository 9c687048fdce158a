#include "shintani/gf.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "shintani/detail/modlin.hpp"
#include "shintani/errors.hpp"

namespace shintani {

namespace {

std::atomic<int> g_degree_cap{32};

using Poly = std::vector<int>;  // low -> high, trimmed

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d != 0) continue;
    out.push_back(d);
    while (n % d == 0) n /= d;
  }
  if (n > 1) out.push_back(n);
  return out;
}

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mod(Poly a, const Poly& f, int p) {
  trim(a);
  const int df = static_cast<int>(f.size()) - 1;
  const int inv_lead = static_cast<int>(detail::mod_inv(f.back(), p));
  while (static_cast<int>(a.size()) - 1 >= df) {
    const int shift = static_cast<int>(a.size()) - 1 - df;
    const int c = a.back() * inv_lead % p;
    for (int j = 0; j <= df; ++j) a[shift + j] = ((a[shift + j] - c * f[j]) % p + p) % p;
    trim(a);
  }
  return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f, int p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  return poly_mod(r, f, p);
}

Poly poly_powmod(Poly base, std::uint64_t e, const Poly& f, int p) {
  Poly r{1};
  base = poly_mod(base, f, p);
  while (e > 0) {
    if (e & 1) r = poly_mulmod(r, base, f, p);
    base = poly_mulmod(base, base, f, p);
    e >>= 1;
  }
  return r;
}

Poly poly_gcd(Poly a, Poly b, int p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// x^{p^e} mod f
Poly frob_x(const Poly& f, int p, int e) {
  Poly r{0, 1};
  for (int i = 0; i < e; ++i) r = poly_powmod(r, static_cast<std::uint64_t>(p), f, p);
  return r;
}

bool is_irreducible(const Poly& f, int p) {
  const int d = static_cast<int>(f.size()) - 1;
  Poly xq = frob_x(f, p, d);
  Poly x{0, 1};
  if (poly_mod(xq, f, p) != poly_mod(x, f, p)) return false;
  for (auto r : prime_factors(static_cast<std::uint64_t>(d))) {
    Poly h = frob_x(f, p, d / static_cast<int>(r));
    h.resize(std::max<std::size_t>(h.size(), 2), 0);
    h[1] = (h[1] - 1 + p) % p;
    trim(h);
    Poly g = poly_gcd(f, h, p);
    if (g.size() != 1) return false;
  }
  return true;
}

}  // namespace

int field_degree_cap() { return g_degree_cap.load(); }

void set_field_degree_cap(int cap) {
  if (cap < 1) throw ConfigError("field degree cap must be positive");
  g_degree_cap.store(cap);
}

FieldTower FieldTower::build(int p, std::span<const int> degrees) {
  if (!is_prime(static_cast<std::uint64_t>(p))) throw ValidationError("field characteristic " + std::to_string(p) + " is not prime");
  int d = 1;
  for (int x : degrees) {
    if (x < 1) throw ValidationError("field degrees must be positive");
    d = std::lcm(d, x);
    if (d > g_degree_cap.load()) {
      throw CapExceeded("field degree " + std::to_string(d) + " exceeds cap " + std::to_string(g_degree_cap.load()));
    }
  }
  FieldTower t;
  t.p_ = p;
  t.d_ = d;
  t.pow_p_.assign(1, 1);
  for (int i = 0; i < d; ++i) {
    const unsigned __int128 next = static_cast<unsigned __int128>(t.pow_p_.back()) * p;
    if (next >= (static_cast<unsigned __int128>(1) << 62)) throw CapExceeded("field F_" + std::to_string(p) + "^" + std::to_string(d) + " too large");
    t.pow_p_.push_back(static_cast<Elem>(next));
  }
  t.size_ = t.pow_p_[d];

  // lexicographically smallest monic irreducible: count the lower coefficients
  // as a base-p number whose most significant digit is c_{D-1}
  for (std::uint64_t code = 0;; ++code) {
    Poly f(d + 1, 0);
    f[d] = 1;
    std::uint64_t c = code;
    for (int i = 0; i < d; ++i) {
      f[i] = static_cast<int>(c % p);
      c /= p;
    }
    if (f[0] == 0 && d > 1) continue;
    if (is_irreducible(f, p)) {
      t.modulus_ = f;
      break;
    }
  }

  t.levels_.push_back(1);
  t.levels_.push_back(d);
  for (int x : degrees) t.levels_.push_back(x);
  std::sort(t.levels_.begin(), t.levels_.end());
  t.levels_.erase(std::unique(t.levels_.begin(), t.levels_.end()), t.levels_.end());

  if (t.size_ <= (1u << 20)) {
    const std::uint64_t n = t.size_ - 1;
    const auto factors = prime_factors(n);
    Elem g = 0;
    for (Elem cand = 1; cand < t.size_; ++cand) {
      bool ok = true;
      for (auto r : factors) {
        if (t.pow_generic(cand, n / r) == 1) {
          ok = false;
          break;
        }
      }
      if (ok) {
        g = cand;
        break;
      }
    }
    t.exp_.resize(n);
    t.log_.assign(t.size_, 0);
    Elem cur = 1;
    for (std::uint64_t i = 0; i < n; ++i) {
      t.exp_[i] = static_cast<std::uint32_t>(cur);
      t.log_[cur] = static_cast<std::uint32_t>(i);
      cur = t.mul_generic(cur, g);
    }
  }
  return t;
}

bool FieldTower::has_level(int d) const { return std::binary_search(levels_.begin(), levels_.end(), d); }

FieldTower::Elem FieldTower::add(Elem a, Elem b) const {
  if (p_ == 2) return a ^ b;
  Elem r = 0;
  for (int i = 0; i < d_; ++i) {
    const Elem da = a % p_, db = b % p_;
    r += ((da + db) % p_) * pow_p_[i];
    a /= p_;
    b /= p_;
  }
  return r;
}

FieldTower::Elem FieldTower::neg(Elem a) const {
  if (p_ == 2) return a;
  Elem r = 0;
  for (int i = 0; i < d_; ++i) {
    const Elem da = a % p_;
    r += ((p_ - da) % p_) * pow_p_[i];
    a /= p_;
  }
  return r;
}

FieldTower::Elem FieldTower::sub(Elem a, Elem b) const { return add(a, neg(b)); }

FieldTower::Elem FieldTower::mul_generic(Elem a, Elem b) const {
  if (p_ == 2) {
    unsigned __int128 r = 0;
    for (int i = 0; i < d_; ++i)
      if ((b >> i) & 1) r ^= static_cast<unsigned __int128>(a) << i;
    unsigned __int128 m = 0;
    for (int i = 0; i <= d_; ++i)
      if (modulus_[i]) m |= static_cast<unsigned __int128>(1) << i;
    for (int i = 2 * d_ - 2; i >= d_; --i)
      if ((r >> i) & 1) r ^= m << (i - d_);
    return static_cast<Elem>(r);
  }
  const auto ca = coordinates(a), cb = coordinates(b);
  std::vector<std::int64_t> r(2 * d_ - 1, 0);
  for (int i = 0; i < d_; ++i) {
    if (ca[i] == 0) continue;
    for (int j = 0; j < d_; ++j) r[i + j] = (r[i + j] + static_cast<std::int64_t>(ca[i]) * cb[j]) % p_;
  }
  for (int i = 2 * d_ - 2; i >= d_; --i) {
    const std::int64_t c = r[i];
    if (c == 0) continue;
    for (int j = 0; j <= d_; ++j) r[i - d_ + j] = ((r[i - d_ + j] - c * modulus_[j]) % p_ + p_) % p_;
  }
  Elem out = 0;
  for (int i = 0; i < d_; ++i) out += static_cast<Elem>(r[i]) * pow_p_[i];
  return out;
}

FieldTower::Elem FieldTower::mul(Elem a, Elem b) const {
  if (a == 0 || b == 0) return 0;
  if (!exp_.empty()) {
    const std::uint64_t n = size_ - 1;
    std::uint64_t s = static_cast<std::uint64_t>(log_[a]) + log_[b];
    if (s >= n) s -= n;
    return exp_[s];
  }
  return mul_generic(a, b);
}

FieldTower::Elem FieldTower::pow_generic(Elem a, std::uint64_t e) const {
  Elem r = 1;
  while (e > 0) {
    if (e & 1) r = exp_.empty() ? mul_generic(r, a) : mul(r, a);
    e >>= 1;
    if (e) a = exp_.empty() ? mul_generic(a, a) : mul(a, a);
  }
  return r;
}

FieldTower::Elem FieldTower::pow(Elem a, std::uint64_t e) const {
  if (e == 0) return 1;
  if (a == 0) return 0;
  if (!exp_.empty()) {
    const std::uint64_t n = size_ - 1;
    return exp_[static_cast<std::uint64_t>(static_cast<unsigned __int128>(log_[a]) * (e % n) % n)];
  }
  return pow_generic(a, e);
}

FieldTower::Elem FieldTower::inv(Elem a) const {
  if (a == 0) throw std::domain_error("inverse of zero in finite field");
  return pow(a, size_ - 2);
}

FieldTower::Elem FieldTower::frobenius_exp(Elem x, int e) const {
  if (e == 0 || x == 0) return x;
  if (!exp_.empty()) {
    const std::uint64_t n = size_ - 1;
    return exp_[static_cast<std::uint64_t>(static_cast<unsigned __int128>(log_[x]) * (pow_p_[e] % n) % n)];
  }
  for (int i = 0; i < e; ++i) x = pow_generic(x, static_cast<std::uint64_t>(p_));
  return x;
}

int FieldTower::log_p(std::uint64_t q) const {
  std::uint64_t v = 1;
  for (int f = 0; f <= 64; ++f) {
    if (v == q) return f;
    if (v > q / static_cast<std::uint64_t>(p_)) break;
    v *= static_cast<std::uint64_t>(p_);
  }
  throw ValidationError("q = " + std::to_string(q) + " is not a power of the characteristic " + std::to_string(p_));
}

FieldTower::Elem FieldTower::frobenius_power(Elem x, std::uint64_t q, std::int64_t j) const {
  const std::int64_t f = log_p(q);
  const std::int64_t e = ((f * j) % d_ + d_) % d_;
  return frobenius_exp(x, static_cast<int>(e));
}

bool FieldTower::in_level(Elem x, int d) const {
  if (d < 1 || d_ % d != 0) return false;
  return frobenius_exp(x, d % d_) == x;
}

std::vector<int> FieldTower::coordinates(Elem x) const {
  std::vector<int> c(d_);
  for (int i = 0; i < d_; ++i) {
    c[i] = static_cast<int>(x % p_);
    x /= p_;
  }
  return c;
}

FieldTower::Elem FieldTower::from_coordinates(std::span<const int> coords) const {
  Elem r = 0;
  for (int i = 0; i < d_ && i < static_cast<int>(coords.size()); ++i)
    r += static_cast<Elem>(((coords[i] % p_) + p_) % p_) * pow_p_[i];
  return r;
}

std::vector<std::vector<int>> FieldTower::level_basis(int d) const {
  if (d < 1 || d_ % d != 0) throw ValidationError("level " + std::to_string(d) + " does not divide the tower degree");
  // kernel of the F_p-linear map x -> x^{p^d} - x
  detail::ModMatrix a(d_, detail::ModRow(d_, 0));
  for (int j = 0; j < d_; ++j) {
    // the monomial x^j has code p^j
    const Elem col = sub(frobenius_exp(pow_p_[j], d % d_), pow_p_[j]);
    const auto c = coordinates(col);
    for (int i = 0; i < d_; ++i) a[i][j] = static_cast<std::uint64_t>(c[i]);
  }
  const auto ker = detail::nullspace(a, d_, static_cast<std::uint64_t>(p_));
  std::vector<std::vector<int>> out;
  for (const auto& v : ker) {
    std::vector<int> e(v.begin(), v.end());
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<FieldTower::Elem> FieldTower::level_elements(int d) const {
  const auto basis = level_basis(d);
  std::vector<Elem> basis_elems;
  for (const auto& b : basis) basis_elems.push_back(from_coordinates(b));
  std::vector<Elem> out{0};
  for (Elem b : basis_elems) {
    const std::size_t n = out.size();
    for (int c = 1; c < p_; ++c) {
      const Elem cb = mul(static_cast<Elem>(c), b);
      for (std::size_t i = 0; i < n; ++i) out.push_back(add(out[i], cb));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<FieldTower::Elem> FieldTower::solve_linearized(std::span<const Elem> coeffs, std::uint64_t q, Elem c,
                                                           int level) const {
  if (!has_level(level)) throw ValidationError("level " + std::to_string(level) + " is not in the tower");
  const auto basis = level_basis(level);
  std::vector<Elem> basis_elems;
  for (const auto& b : basis) basis_elems.push_back(from_coordinates(b));
  auto apply = [&](Elem x) {
    Elem r = 0;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      r = add(r, mul(coeffs[i], frobenius_power(x, q, static_cast<std::int64_t>(i))));
    return r;
  };
  const int k = static_cast<int>(basis_elems.size());
  detail::ModMatrix a(d_, detail::ModRow(k, 0));
  for (int j = 0; j < k; ++j) {
    const auto col = coordinates(apply(basis_elems[j]));
    for (int i = 0; i < d_; ++i) a[i][j] = static_cast<std::uint64_t>(col[i]);
  }
  const auto cc = coordinates(c);
  detail::ModRow rhs(cc.begin(), cc.end());
  const auto sol = detail::solve(a, rhs, k, static_cast<std::uint64_t>(p_));
  if (!sol) return {};
  const auto ker = detail::nullspace(a, k, static_cast<std::uint64_t>(p_));
  if (ker.size() > 20 || std::pow(static_cast<double>(p_), static_cast<double>(ker.size())) > (1 << 20)) {
    throw CapExceeded("linearized equation has too many solutions to enumerate");
  }
  auto combine = [&](const detail::ModRow& t) {
    Elem x = 0;
    for (int j = 0; j < k; ++j) x = add(x, mul(static_cast<Elem>(t[j]), basis_elems[j]));
    return x;
  };
  std::vector<Elem> out{combine(*sol)};
  for (const auto& v : ker) {
    const Elem kv = combine(v);
    const std::size_t n = out.size();
    for (int s = 1; s < p_; ++s) {
      const Elem skv = mul(static_cast<Elem>(s), kv);
      for (std::size_t i = 0; i < n; ++i) out.push_back(add(out[i], skv));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<FieldTower::Elem> FieldTower::embed_from(const FieldTower& small) const {
  if (small.p_ != p_ || d_ % small.d_ != 0) throw ValidationError("field does not embed into the tower");
  const auto candidates = level_elements(small.d_);
  Elem root = 0;
  bool found = false;
  for (Elem r : candidates) {
    Elem v = 0;
    for (int i = small.d_; i >= 0; --i) v = add(mul(v, r), static_cast<Elem>(small.modulus_[i]));
    if (v == 0) {
      root = r;
      found = true;
      break;
    }
  }
  if (!found) throw std::logic_error("no root of the subfield modulus in the tower");
  std::vector<Elem> out(small.size_);
  for (Elem code = 0; code < small.size_; ++code) {
    const auto c = small.coordinates(code);
    Elem v = 0;
    for (int i = small.d_ - 1; i >= 0; --i) v = add(mul(v, root), static_cast<Elem>(c[i]));
    out[code] = v;
  }
  return out;
}

std::string FieldTower::str(Elem x) const {
  std::string s = "[";
  const auto c = coordinates(x);
  for (int i = 0; i < d_; ++i) {
    if (i) s += ",";
    s += std::to_string(c[i]);
  }
  return s + "]";
}

}  // namespace shintani
