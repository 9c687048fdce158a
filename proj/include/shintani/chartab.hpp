#pragma once

#include <span>
#include <string>
#include <vector>

#include "shintani/cyclotomic.hpp"
#include "shintani/group.hpp"

namespace shintani {

struct CharacterTable {
  GroupPtr group;
  ConjugacyClasses classes;
  // rows[i][c] = chi_i on class c; sorted by degree, then values
  std::vector<std::vector<Cyclotomic>> rows;

  std::size_t size() const { return rows.size(); }
  const Cyclotomic& degree(std::size_t row) const { return rows[row][0]; }
  const Cyclotomic& value(std::size_t row, Index x) const { return rows[row][classes.class_of[x]]; }
};

// Dixon's method: simultaneous eigenvectors of the class matrices over F_l,
// l the least prime = 1 mod exponent(G) above 2 sqrt|G|, lifted to Q(zeta_e).
CharacterTable character_table(const GroupPtr& g);

// (1/|G|) sum_c |c| f(c) conj(g(c)) over the classes of the table's group.
Cyclotomic inner_product(std::span<const Cyclotomic> f, std::span<const Cyclotomic> g, const CharacterTable& t);

struct RowPermutation {
  std::vector<int> perm;   // chi_i o phi = chi_{perm[i]}
  std::vector<int> fixed;  // ascending
};

RowPermutation sigma_fixed_rows(const CharacterTable& t, const GroupMap& phi);

// Rows of te (the table of ext.group) restricting to row `row` of tn on N.
// Requires chi o phi = chi; returns exactly ext.m rows in ascending order.
std::vector<int> extensions_of(const CharacterTable& tn, int row, const CyclicExtension& ext, const CharacterTable& te);

// Checks that the table reproduces every class-algebra structure constant,
// counted directly in the group, and both orthogonality relations.
bool verify_character_table(const CharacterTable& t, std::string* failure = nullptr);

std::string table_csv(const CharacterTable& t);
std::string table_json(const CharacterTable& t);

}  // namespace shintani
