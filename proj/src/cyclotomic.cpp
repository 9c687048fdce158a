#include "shintani/cyclotomic.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <stdexcept>

#include "shintani/errors.hpp"

namespace shintani {

namespace {

std::atomic<int> g_order_cap{2520};

struct PrimePower {
  int p;
  int a;
  int pa;
};

std::vector<PrimePower> factor(int n) {
  std::vector<PrimePower> out;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    PrimePower f{p, 0, 1};
    while (n % p == 0) {
      n /= p;
      ++f.a;
      f.pa *= p;
    }
    out.push_back(f);
  }
  if (n > 1) out.push_back({n, 1, n});
  return out;
}

std::int64_t modinv(std::int64_t a, std::int64_t m) {
  std::int64_t g = m, x = 0, x1 = 1, a1 = ((a % m) + m) % m;
  while (a1 != 0) {
    std::int64_t q = g / a1;
    std::tie(g, a1) = std::make_pair(a1, g - q * a1);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  return ((x % m) + m) % m;
}

int checked_lcm(int a, int b) {
  std::int64_t l = std::lcm<std::int64_t>(a, b);
  if (l > g_order_cap.load()) {
    throw CapExceeded("cyclotomic order " + std::to_string(l) + " exceeds cap " + std::to_string(g_order_cap.load()));
  }
  return static_cast<int>(l);
}

__int128 abs128(__int128 v) { return v < 0 ? -v : v; }

__int128 gcd128(__int128 a, __int128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Rewrites a dense coefficient vector over zeta_n^k into the Zumbroich basis:
// for each p^a || n the p-digit of k (top base-p digit of the p-adic
// coordinate) must avoid 0 for odd p and equal 0 for p = 2.
void reduce_to_basis(int n, std::vector<__int128>& buf) {
  for (const auto& [p, a, pa] : factor(n)) {
    const int m = n / pa;
    const std::int64_t minv = modinv(m % pa, pa);
    const int block = pa / p;
    const int step = n / p;
    for (int k = 0; k < n; ++k) {
      if (buf[k] == 0) continue;
      const int kp = static_cast<int>((static_cast<std::int64_t>(k % pa) * minv) % pa);
      const int digit = kp / block;
      const bool bad = (p == 2) ? digit != 0 : digit == 0;
      if (!bad) continue;
      const __int128 c = buf[k];
      buf[k] = 0;
      if (p == 2) {
        buf[(k + step) % n] -= c;
      } else {
        for (int j = 1; j < p; ++j) buf[(k + j * step) % n] -= c;
      }
    }
  }
}

}  // namespace

int cyclotomic_order_cap() { return g_order_cap.load(); }

void set_cyclotomic_order_cap(int cap) {
  if (cap < 1) throw ConfigError("cyclotomic order cap must be positive");
  g_order_cap.store(cap);
}

class CyclotomicBuilder {
 public:
  static std::vector<__int128>& scratch(int n) {
    thread_local std::vector<__int128> buf;
    buf.assign(static_cast<std::size_t>(n), 0);
    return buf;
  }

  // buf holds numerators over exponents 0..n-1 (not necessarily in basis form)
  static Cyclotomic finish(int n, std::vector<__int128>& buf, __int128 den) {
    if (den == 0) throw std::domain_error("division by zero");
    if (den < 0) {
      den = -den;
      for (auto& v : buf) v = -v;
    }
    reduce_to_basis(n, buf);
    __int128 g = den;
    for (int k = 0; k < n && g != 1; ++k) {
      if (buf[k] != 0) g = gcd128(g, buf[k]);
    }
    Cyclotomic out;
    out.n_ = n;
    bool any = false;
    for (int k = 0; k < n; ++k) {
      if (buf[k] == 0) continue;
      any = true;
      out.terms_.push_back({k, detail::narrow(buf[k] / g)});
    }
    if (!any) return Cyclotomic();
    out.den_ = detail::narrow(den / g);
    shrink(out);
    return out;
  }

  // Moves the value to the smallest Q(zeta_n) containing it.
  static void shrink(Cyclotomic& c) {
    bool changed = true;
    while (changed && c.n_ > 1) {
      changed = false;
      for (const auto& [p, a, pa] : factor(c.n_)) {
        if (p == 2 && a == 1) {
          for (auto& t : c.terms_) t.exp /= 2;
          c.n_ /= 2;
          changed = true;
          break;
        }
        if (a >= 2) {
          bool all = std::all_of(c.terms_.begin(), c.terms_.end(), [&](const auto& t) { return t.exp % p == 0; });
          if (!all) continue;
          for (auto& t : c.terms_) t.exp /= p;
          c.n_ /= p;
          changed = true;
          break;
        }
        // odd p exactly dividing n: each residue class mod n/p must carry
        // p-1 equal coefficients (or none)
        const int m = c.n_ / p;
        std::map<int, std::pair<int, std::int64_t>> groups;  // residue -> (count, coeff)
        bool ok = true;
        for (const auto& t : c.terms_) {
          auto [it, fresh] = groups.try_emplace(t.exp % m, 0, t.num);
          if (!fresh && it->second.second != t.num) {
            ok = false;
            break;
          }
          ++it->second.first;
        }
        if (!ok) continue;
        for (const auto& [r, g] : groups) {
          if (g.first != p - 1) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        std::vector<Cyclotomic::Term> next;
        for (const auto& [r, g] : groups) {
          int kb = r;
          while (kb % p != 0) kb += m;
          if (g.second == INT64_MIN) throw std::overflow_error("rational coefficient overflow");
          next.push_back({kb / p, -g.second});
        }
        std::sort(next.begin(), next.end(), [](const auto& x, const auto& y) { return x.exp < y.exp; });
        c.terms_ = std::move(next);
        c.n_ = m;
        changed = true;
        break;
      }
    }
  }

  static Cyclotomic add(const Cyclotomic& a, const Cyclotomic& b, bool negate_b) {
    if (b.is_zero()) return a;
    if (a.is_zero()) return negate_b ? -b : b;
    const int n = checked_lcm(a.n_, b.n_);
    auto& buf = scratch(n);
    const std::int64_t l = std::lcm(a.den_, b.den_);
    const __int128 fa = l / a.den_;
    const __int128 fb = (l / b.den_) * (negate_b ? -1 : 1);
    const int sa = n / a.n_, sb = n / b.n_;
    for (const auto& t : a.terms_) buf[t.exp * sa] += fa * t.num;
    for (const auto& t : b.terms_) buf[t.exp * sb] += fb * t.num;
    return finish(n, buf, l);
  }

  static Cyclotomic mul(const Cyclotomic& a, const Cyclotomic& b) {
    if (a.is_zero() || b.is_zero()) return Cyclotomic();
    if (a.n_ == 1) return scale(b, a.terms_[0].num, a.den_);
    if (b.n_ == 1) return scale(a, b.terms_[0].num, b.den_);
    const int n = checked_lcm(a.n_, b.n_);
    auto& buf = scratch(n);
    const int sa = n / a.n_, sb = n / b.n_;
    for (const auto& x : a.terms_) {
      for (const auto& y : b.terms_) {
        buf[(x.exp * sa + y.exp * sb) % n] += static_cast<__int128>(x.num) * y.num;
      }
    }
    return finish(n, buf, static_cast<__int128>(a.den_) * b.den_);
  }

  static Cyclotomic scale(const Cyclotomic& a, std::int64_t num, std::int64_t den) {
    if (num == 0 || a.is_zero()) return Cyclotomic();
    __int128 d = static_cast<__int128>(a.den_) * den;
    __int128 g = d;
    for (const auto& t : a.terms_) g = gcd128(g, static_cast<__int128>(t.num) * num);
    if (d < 0) g = -g;
    Cyclotomic out = a;
    for (auto& t : out.terms_) t.num = detail::narrow(static_cast<__int128>(t.num) * num / g);
    out.den_ = detail::narrow(d / g);
    return out;
  }

  static Cyclotomic permute_exponents(const Cyclotomic& a, std::int64_t t) {
    if (a.n_ == 1) return a;
    const int n = a.n_;
    auto& buf = scratch(n);
    const std::int64_t tt = ((t % n) + n) % n;
    for (const auto& x : a.terms_) buf[(x.exp * tt) % n] += x.num;
    return finish(n, buf, a.den_);
  }

  static Cyclotomic monomial(int n, std::int64_t k, std::int64_t num, std::int64_t den) {
    if (n < 1) throw std::invalid_argument("root of unity order must be positive");
    if (n > g_order_cap.load()) {
      throw CapExceeded("cyclotomic order " + std::to_string(n) + " exceeds cap " + std::to_string(g_order_cap.load()));
    }
    auto& buf = scratch(n);
    buf[static_cast<std::size_t>(((k % n) + n) % n)] = num;
    return finish(n, buf, den);
  }
};

Cyclotomic::Cyclotomic(std::int64_t v) {
  if (v != 0) terms_.push_back({0, v});
}

Cyclotomic::Cyclotomic(const Rational& r) {
  if (!r.is_zero()) {
    terms_.push_back({0, r.num()});
    den_ = r.den();
  }
}

Cyclotomic Cyclotomic::root_of_unity(int n, std::int64_t k) { return CyclotomicBuilder::monomial(n, k, 1, 1); }

Cyclotomic Cyclotomic::from_terms(int n, std::span<const std::pair<std::int64_t, Rational>> terms) {
  Cyclotomic acc;
  for (const auto& [k, c] : terms) {
    if (c.is_zero()) continue;
    acc += CyclotomicBuilder::monomial(n, k, c.num(), c.den());
  }
  return acc;
}

Cyclotomic Cyclotomic::from_integer_coefficients(int n, std::span<const std::int64_t> coeffs) {
  if (static_cast<int>(coeffs.size()) != n) throw std::invalid_argument("coefficient count must equal order");
  if (n > g_order_cap.load()) {
    throw CapExceeded("cyclotomic order " + std::to_string(n) + " exceeds cap " + std::to_string(g_order_cap.load()));
  }
  auto& buf = CyclotomicBuilder::scratch(n);
  for (int k = 0; k < n; ++k) buf[k] = coeffs[k];
  return CyclotomicBuilder::finish(n, buf, 1);
}

std::vector<std::pair<int, Rational>> Cyclotomic::coefficients() const {
  std::vector<std::pair<int, Rational>> out;
  for (const auto& t : terms_) out.emplace_back(t.exp, Rational(t.num, den_));
  return out;
}

std::optional<Rational> Cyclotomic::as_rational() const {
  if (terms_.empty()) return Rational(0);
  if (n_ != 1) return std::nullopt;
  return Rational(terms_[0].num, den_);
}

Cyclotomic Cyclotomic::operator-() const { return CyclotomicBuilder::scale(*this, -1, 1); }

Cyclotomic operator+(const Cyclotomic& a, const Cyclotomic& b) { return CyclotomicBuilder::add(a, b, false); }
Cyclotomic operator-(const Cyclotomic& a, const Cyclotomic& b) { return CyclotomicBuilder::add(a, b, true); }
Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& b) { return CyclotomicBuilder::mul(a, b); }
Cyclotomic operator/(const Cyclotomic& a, const Cyclotomic& b) { return a * b.inverse(); }

Cyclotomic Cyclotomic::conjugate() const { return CyclotomicBuilder::permute_exponents(*this, -1); }

Cyclotomic Cyclotomic::galois(std::int64_t t) const {
  if (std::gcd<std::int64_t>(((t % n_) + n_) % n_, n_) != 1 && n_ > 1) {
    throw std::invalid_argument("galois exponent must be coprime to the field order");
  }
  return CyclotomicBuilder::permute_exponents(*this, t);
}

Cyclotomic Cyclotomic::inverse() const {
  if (is_zero()) throw std::domain_error("division by zero");
  if (terms_.size() == 1) {
    const auto& t = terms_[0];
    return CyclotomicBuilder::monomial(n_, -static_cast<std::int64_t>(t.exp), den_, t.num);
  }
  // product of the nontrivial Galois conjugates divided by the (rational) norm
  Cyclotomic others(1);
  for (int t = 2; t < n_; ++t) {
    if (std::gcd(t, n_) == 1) others *= galois(t);
  }
  const Cyclotomic norm = *this * others;
  const auto r = norm.as_rational();
  if (!r) throw std::logic_error("cyclotomic norm is not rational");
  return CyclotomicBuilder::scale(others, r->den(), r->num());
}

Cyclotomic Cyclotomic::pow(std::int64_t e) const {
  if (e < 0) return inverse().pow(-e);
  Cyclotomic result(1), base = *this;
  while (e > 0) {
    if (e & 1) result *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return result;
}

std::optional<RootOfUnity> Cyclotomic::as_root_of_unity() const {
  if (is_zero()) return std::nullopt;
  const int n = (n_ % 2 == 0) ? n_ : 2 * n_;
  if (*this * conjugate() != Cyclotomic(1)) return std::nullopt;
  if (pow(n) != Cyclotomic(1)) return std::nullopt;
  for (int k = 0; k < n; ++k) {
    if (root_of_unity(n, k) == *this) {
      const int g = std::gcd(k, n);
      return RootOfUnity{k / g, n / g};
    }
  }
  return std::nullopt;
}

std::vector<std::pair<int, Rational>> Cyclotomic::embedded_coefficients(int n) const {
  if (n % n_ != 0) throw std::invalid_argument("embedding order must be a multiple of the field order");
  auto& buf = CyclotomicBuilder::scratch(n);
  const int s = n / n_;
  for (const auto& t : terms_) buf[t.exp * s] += t.num;
  reduce_to_basis(n, buf);
  std::vector<std::pair<int, Rational>> out;
  for (int k = 0; k < n; ++k) {
    if (buf[k] != 0) out.emplace_back(k, Rational(detail::narrow(buf[k]), den_));
  }
  return out;
}

std::strong_ordering operator<=>(const Cyclotomic& a, const Cyclotomic& b) {
  if (a.n_ != b.n_) return a.n_ <=> b.n_;
  const std::size_t len = std::min(a.terms_.size(), b.terms_.size());
  for (std::size_t i = 0; i < len; ++i) {
    if (a.terms_[i].exp != b.terms_[i].exp) return a.terms_[i].exp <=> b.terms_[i].exp;
    auto c = Rational(a.terms_[i].num, a.den_) <=> Rational(b.terms_[i].num, b.den_);
    if (c != 0) return c;
  }
  return a.terms_.size() <=> b.terms_.size();
}

std::string Cyclotomic::str() const {
  if (is_zero()) return "0";
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += " + ";
    out += Rational(t.num, den_).str();
    if (t.exp != 0) out += "*z(" + std::to_string(n_) + ")^" + std::to_string(t.exp);
  }
  return out;
}

Cyclotomic Cyclotomic::parse(std::string_view s) {
  Cyclotomic acc;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(" + ", pos);
    const std::string_view tok = s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    const std::size_t z = tok.find("*z(");
    if (z == std::string_view::npos) {
      acc += Cyclotomic(Rational::parse(tok));
    } else {
      const std::size_t close = tok.find(")^", z);
      if (close == std::string_view::npos) throw std::invalid_argument("malformed cyclotomic term '" + std::string(tok) + "'");
      const Rational c = Rational::parse(tok.substr(0, z));
      const int n = static_cast<int>(Rational::parse(tok.substr(z + 3, close - z - 3)).num());
      const std::int64_t k = Rational::parse(tok.substr(close + 2)).num();
      acc += CyclotomicBuilder::monomial(n, k, c.num(), c.den());
    }
    if (next == std::string_view::npos) break;
    pos = next + 3;
  }
  return acc;
}

std::size_t Cyclotomic::hash() const {
  std::size_t h = std::hash<int>()(n_) ^ (std::hash<std::int64_t>()(den_) << 1);
  for (const auto& t : terms_) {
    h = h * 1000003u ^ std::hash<int>()(t.exp);
    h = h * 1000003u ^ std::hash<std::int64_t>()(t.num);
  }
  return h;
}

std::optional<Cyclotomic> vector_ratio_root(std::span<const Cyclotomic> f, std::span<const Cyclotomic> g) {
  if (f.size() != g.size()) return std::nullopt;
  std::optional<Cyclotomic> ratio;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i].is_zero() != g[i].is_zero()) return std::nullopt;
    if (f[i].is_zero()) continue;
    if (!ratio) {
      // any root of unity in the compositum has order dividing lcm(2, orders)
      const int n = std::lcm(2, checked_lcm(f[i].order(), g[i].order()));
      for (int k = 0; k < n && !ratio; ++k) {
        const Cyclotomic zeta = Cyclotomic::root_of_unity(n, k);
        if (zeta * g[i] == f[i]) ratio = zeta;
      }
      if (!ratio) return std::nullopt;
    } else if (f[i] != *ratio * g[i]) {
      return std::nullopt;
    }
  }
  return ratio ? ratio : std::optional<Cyclotomic>(Cyclotomic(1));
}

}  // namespace shintani
