#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "shintani/gf.hpp"

namespace shintani {

using Index = std::uint32_t;

// Largest group order any constructor may produce (default 200000).
std::size_t group_order_cap();
void set_group_order_cap(std::size_t cap);

// Multiplication rule for groups too large for a full table.
class GroupLaw {
 public:
  virtual ~GroupLaw() = default;
  virtual Index multiply(Index a, Index b) const = 0;
  virtual std::string describe(Index a) const { return std::to_string(a); }
};

// Finite group on indices 0..order-1 with 0 the identity. Groups up to
// table_threshold() elements keep a full multiplication table.
class FinGroup {
 public:
  FinGroup(std::size_t order, std::shared_ptr<const GroupLaw> law, std::vector<Index> generators, std::string name);

  static std::size_t table_threshold() { return 2048; }

  std::size_t order() const { return order_; }
  Index mul(Index a, Index b) const {
    return table_.empty() ? law_->multiply(a, b) : table_[static_cast<std::size_t>(a) * order_ + b];
  }
  Index inv(Index a) const { return inv_[a]; }
  Index pow(Index a, std::int64_t e) const;
  // x g x^{-1}
  Index conjugate(Index x, Index g) const { return mul(mul(x, g), inv_[x]); }
  std::span<const Index> generators() const { return generators_; }
  std::size_t element_order(Index a) const { return elt_order_[a]; }
  std::size_t exponent() const { return exponent_; }
  std::string describe(Index a) const { return law_->describe(a); }
  const std::string& name() const { return name_; }
  const GroupLaw& law() const { return *law_; }
  bool is_abelian() const;

 private:
  std::size_t order_;
  std::shared_ptr<const GroupLaw> law_;
  std::vector<Index> generators_;
  std::string name_;
  std::vector<Index> table_;
  std::vector<Index> inv_;
  std::vector<std::uint32_t> elt_order_;
  std::size_t exponent_ = 1;
};

using GroupPtr = std::shared_ptr<const FinGroup>;

// Homomorphism between finite groups given by the full image table.
class GroupMap {
 public:
  GroupMap(GroupPtr source, GroupPtr target, std::vector<Index> images);

  static GroupMap identity(GroupPtr g);
  // x -> g x g^{-1}
  static GroupMap inner(GroupPtr group, Index g);

  Index operator()(Index x) const { return images_[x]; }
  const GroupPtr& source() const { return source_; }
  const GroupPtr& target() const { return target_; }
  std::span<const Index> images() const { return images_; }
  bool is_identity() const;
  // order as a permutation (automorphisms only)
  std::size_t order() const;
  // next after this: x -> next(this(x))
  GroupMap then(const GroupMap& next) const;
  GroupMap inverse() const;
  GroupMap power(std::int64_t k) const;

  friend bool operator==(const GroupMap& a, const GroupMap& b) { return a.images_ == b.images_; }

 private:
  GroupPtr source_;
  GroupPtr target_;
  std::vector<Index> images_;
};

// Automorphism determined by images of G's generators; validated to be a
// bijective homomorphism. Throws ValidationError naming a witness pair.
GroupMap automorphism(GroupPtr g, std::span<const Index> generator_images);
// Automorphism given elementwise; validated as above.
GroupMap automorphism_from_function(GroupPtr g, const std::function<Index(Index)>& f);
void validate_automorphism(const GroupMap& m);

// ---- constructors ----

GroupPtr cyclic_group(std::size_t n);
GroupPtr trivial_group();
// table[a][b] = a*b over labels 0..n-1; the identity need not be label 0
// (elements are re-indexed so that it is). Validated.
GroupPtr cayley_group(const std::vector<std::vector<Index>>& table);
// Permutations as 0-based image arrays; product (a*b)(i) = a(b(i)).
GroupPtr permutation_group(std::size_t degree, const std::vector<std::vector<std::uint32_t>>& generators);
// Invertible dim x dim matrices over `field`, entries as field codes (row-major).
GroupPtr matrix_group(std::shared_ptr<const FieldTower> field, int dim,
                      const std::vector<std::vector<FieldTower::Elem>>& generators);
GroupPtr direct_product(const GroupPtr& a, const GroupPtr& b);

// Permutation image array of an element of a permutation group.
const std::vector<std::uint32_t>& permutation_of(const FinGroup& g, Index x);
// Index of a permutation in a permutation group, or throws.
Index permutation_index(const FinGroup& g, const std::vector<std::uint32_t>& perm);
// Matrix entries (row-major codes) of an element of a matrix group.
const std::vector<FieldTower::Elem>& matrix_of(const FinGroup& g, Index x);
Index matrix_index(const FinGroup& g, const std::vector<FieldTower::Elem>& entries);

// Subgroup realized as a standalone group; elements ordered by parent index.
struct Subgroup {
  GroupPtr group;
  GroupPtr parent;
  std::vector<Index> embed;          // subgroup index -> parent index
  std::vector<std::int32_t> locate;  // parent index -> subgroup index or -1
  bool contains(Index parent_elem) const { return locate[parent_elem] >= 0; }
};

// `elements` must form a subgroup of `parent` (checked).
Subgroup make_subgroup(const GroupPtr& parent, std::vector<Index> elements, std::string name);
Subgroup fixed_subgroup(const GroupMap& phi);
Subgroup centralizer(const GroupPtr& g, Index a);

// Automorphism of a subgroup induced by a parent-level map that preserves it.
GroupMap restrict_map(const Subgroup& sub, const std::function<Index(Index)>& parent_map);

struct ConjugacyClasses {
  std::vector<Index> reps;                  // least index in each class; identity first
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> centralizer_orders;
  std::vector<std::uint32_t> class_of;      // element -> class
  std::vector<Index> transporter;           // element x -> t with t x t^{-1} = rep
  std::vector<std::uint32_t> inverse_class; // class of rep^{-1}
  std::size_t size() const { return reps.size(); }
};

ConjugacyClasses conjugacy_classes(const FinGroup& g);

// Group N x| <s> with s x s^{-1} = phi(x), s^m = w. Element n*s^k has index
// k*|N| + n, so N occupies indices 0..|N|-1.
struct CyclicExtension {
  GroupPtr group;
  GroupPtr normal;
  std::size_t m = 1;
  Index s = 0;
  Index w = 0;
  Index element(Index n, std::size_t k) const { return static_cast<Index>(k * normal->order() + n); }
  std::size_t coset(Index e) const { return e / normal->order(); }
};

CyclicExtension cyclic_extension(const GroupPtr& n, const GroupMap& phi, std::size_t m, Index w);

// ---- unitriangular groups ----

// Upper unitriangular n x n matrices with entries in one level of a tower.
// Element index = mixed-radix code of the strictly upper entries (row-major),
// each digit the position of the entry among the level's elements.
class UnitriangularLaw : public GroupLaw {
 public:
  UnitriangularLaw(std::shared_ptr<const FieldTower> field, int n, int level);
  Index multiply(Index a, Index b) const override;
  std::string describe(Index a) const override;

  int dim() const { return n_; }
  int level() const { return level_; }
  const FieldTower& field() const { return *field_; }
  std::shared_ptr<const FieldTower> field_ptr() const { return field_; }
  std::size_t order() const { return order_; }
  std::size_t entry_count() const { return static_cast<std::size_t>(n_ * (n_ - 1) / 2); }
  // strictly upper entries in row-major order (field codes)
  std::vector<FieldTower::Elem> entries(Index a) const;
  Index index_of(std::span<const FieldTower::Elem> entries) const;
  // product of entry vectors (no level restriction)
  std::vector<FieldTower::Elem> multiply_entries(std::span<const FieldTower::Elem> a,
                                                 std::span<const FieldTower::Elem> b) const;
  std::vector<FieldTower::Elem> inverse_entries(std::span<const FieldTower::Elem> a) const;
  int entry_position(int i, int j) const;

 private:
  std::shared_ptr<const FieldTower> field_;
  int n_;
  int level_;
  std::vector<FieldTower::Elem> level_elems_;
  std::vector<std::uint32_t> level_pos_;  // only when the tower is small
  std::size_t order_;
};

GroupPtr unitriangular_group(std::shared_ptr<const FieldTower> field, int n, int level);
const UnitriangularLaw* as_unitriangular(const FinGroup& g);
// Entrywise x -> x^{q^j} on a unitriangular group (validated).
GroupMap unitriangular_frobenius(const GroupPtr& g, std::uint64_t q, std::int64_t j = 1);

}  // namespace shintani
