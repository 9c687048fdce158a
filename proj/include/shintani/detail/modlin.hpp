#pragma once

// Dense linear algebra over a prime field F_p, p < 2^31.

#include <cstdint>
#include <optional>
#include <vector>

namespace shintani::detail {

using ModRow = std::vector<std::uint64_t>;
using ModMatrix = std::vector<ModRow>;

std::uint64_t mod_pow(std::uint64_t b, std::uint64_t e, std::uint64_t p);
std::uint64_t mod_inv(std::uint64_t a, std::uint64_t p);

// Reduced row echelon form in place (zero rows dropped); returns pivot columns.
std::vector<int> rref(ModMatrix& a, std::uint64_t p);

// Basis of {v : a v = 0} for a matrix with `cols` columns.
ModMatrix nullspace(ModMatrix a, int cols, std::uint64_t p);

// Some v with a v = b, or nullopt.
std::optional<ModRow> solve(const ModMatrix& a, const ModRow& b, int cols, std::uint64_t p);

}  // namespace shintani::detail
