#include "shintani/detail/modlin.hpp"

#include <stdexcept>

namespace shintani::detail {

std::uint64_t mod_pow(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  b %= p;
  while (e > 0) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return r;
}

std::uint64_t mod_inv(std::uint64_t a, std::uint64_t p) {
  if (a % p == 0) throw std::domain_error("inverse of zero modulo p");
  return mod_pow(a, p - 2, p);
}

std::vector<int> rref(ModMatrix& a, std::uint64_t p) {
  std::vector<int> pivots;
  if (a.empty()) return pivots;
  const int cols = static_cast<int>(a[0].size());
  std::size_t row = 0;
  for (int c = 0; c < cols && row < a.size(); ++c) {
    std::size_t piv = row;
    while (piv < a.size() && a[piv][c] == 0) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[row], a[piv]);
    const std::uint64_t iv = mod_inv(a[row][c], p);
    for (auto& x : a[row]) x = x * iv % p;
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (r == row || a[r][c] == 0) continue;
      const std::uint64_t f = a[r][c];
      for (int k = c; k < cols; ++k) a[r][k] = (a[r][k] + (p - f) * a[row][k]) % p;
    }
    pivots.push_back(c);
    ++row;
  }
  a.resize(row);
  return pivots;
}

ModMatrix nullspace(ModMatrix a, int cols, std::uint64_t p) {
  for (auto& r : a) r.resize(cols, 0);
  const auto pivots = rref(a, p);
  std::vector<int> pivot_row(cols, -1);
  for (std::size_t i = 0; i < pivots.size(); ++i) pivot_row[pivots[i]] = static_cast<int>(i);
  ModMatrix basis;
  for (int f = 0; f < cols; ++f) {
    if (pivot_row[f] >= 0) continue;
    ModRow v(cols, 0);
    v[f] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = (p - a[i][f]) % p;
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<ModRow> solve(const ModMatrix& a, const ModRow& b, int cols, std::uint64_t p) {
  ModMatrix aug = a;
  for (std::size_t i = 0; i < aug.size(); ++i) {
    aug[i].resize(cols, 0);
    aug[i].push_back(b[i] % p);
  }
  const auto pivots = rref(aug, p);
  if (!pivots.empty() && pivots.back() == cols) return std::nullopt;
  ModRow v(cols, 0);
  for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = aug[i][cols];
  return v;
}

}  // namespace shintani::detail
