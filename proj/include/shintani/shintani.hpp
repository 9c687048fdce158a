#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shintani/chartab.hpp"
#include "shintani/twist.hpp"

namespace shintani {

struct IrrepLabel {
  std::size_t form = 0;  // H^1(F^m) representative index
  std::size_t row = 0;   // row of that form's character table
  std::int64_t m = 1;
  friend bool operator==(const IrrepLabel&, const IrrepLabel&) = default;
};

struct ShintaniBasis {
  std::int64_t m = 1;
  std::vector<IrrepLabel> labels;
  std::vector<ClassFunctionFamily> vectors;  // each defined up to an m-th root of unity
};

struct ModelOptions {
  // choose the last extension character instead of the first
  bool tiebreak_last = false;
};

// A group with Frobenius together with everything needed to produce
// Sh_m(W) on Fun([G],F) and the twisting operator.
class DescentModel {
 public:
  virtual ~DescentModel() = default;

  virtual SpaceMode mode() const = 0;
  // R_{id,F}; Fun([G],F) lives here
  virtual SpacePtr base_space() const = 0;
  // scan step: order of F on the finite data
  virtual std::size_t stride() const = 0;
  // Irrep(G,F^m), all forms
  virtual std::vector<IrrepLabel> irreps(std::int64_t m) const = 0;
  // Irrep(G,F^m)^F
  virtual std::vector<IrrepLabel> fixed_irreps(std::int64_t m) const = 0;
  virtual Cyclotomic degree(const IrrepLabel& v) const = 0;
  // the form representative h of the label, as text
  virtual std::string form_label(const IrrepLabel& v) const = 0;
  // chi_V for V at level 1, on base_space()
  virtual ClassFunctionFamily character(const IrrepLabel& v) const = 0;
  virtual ClassFunctionFamily sh(const IrrepLabel& w) const = 0;
  // t2 pullback on base_space()
  virtual ClassFunctionFamily theta(const ClassFunctionFamily& f) const = 0;
  virtual std::string describe() const = 0;
};

// Finite model: G finite, F an automorphism; all spaces enumerated.
class FiniteModel : public DescentModel {
 public:
  FiniteModel(GroupPtr g, GroupMap f, ModelOptions opts = {});

  SpaceMode mode() const override { return SpaceMode::finite_model; }
  SpacePtr base_space() const override { return cache_.get(0, 1); }
  std::size_t stride() const override { return cache_.frobenius_order(); }
  std::vector<IrrepLabel> irreps(std::int64_t m) const override;
  std::vector<IrrepLabel> fixed_irreps(std::int64_t m) const override;
  Cyclotomic degree(const IrrepLabel& v) const override;
  std::string form_label(const IrrepLabel& v) const override;
  ClassFunctionFamily character(const IrrepLabel& v) const override;
  ClassFunctionFamily sh(const IrrepLabel& w) const override;
  ClassFunctionFamily theta(const ClassFunctionFamily& f) const override;
  std::string describe() const override;

  const SpaceCache& spaces() const { return cache_; }
  const InnerFormFamily& forms(std::int64_t m) const;
  // characters of all forms at level m on R_{id,F^m}
  std::vector<ClassFunctionFamily> irrep_family(std::int64_t m) const;
  // T_{W,psi_W} on R_{F^m,F}
  ClassFunctionFamily trace_function(const IrrepLabel& w) const;
  // witness h with (g,h) in R_{F^m,F} for the form rep g, if the form is F-stable
  std::optional<Index> witness(std::int64_t m, std::size_t form) const;

 private:
  struct FormData {
    std::optional<Index> h;
    std::optional<GroupMap> phi;  // on the fixed group
    std::vector<int> fixed_rows;
  };
  struct LevelData {
    std::unique_ptr<InnerFormFamily> forms;
    std::vector<FormData> data;
  };
  struct Extension {
    CyclicExtension ext;
    std::unique_ptr<CharacterTable> table;
  };

  const LevelData& level(std::int64_t m) const;
  const Extension& extension(std::int64_t m, std::size_t form) const;

  GroupPtr group_;
  GroupMap frob_;
  ModelOptions opts_;
  SpaceCache cache_;
  OrbitBijection theta_map_;
  mutable std::map<std::size_t, LevelData> levels_;
  mutable std::map<std::pair<std::int64_t, std::size_t>, Extension> extensions_;
};

// Connected model: upper unitriangular n x n matrices over the algebraic
// closure of F_p with Frobenius x -> x^q; everything is computed inside
// finite fixed groups U_n(F_{q^m}) with Lang's theorem gluing levels.
class ConnectedModel : public DescentModel {
 public:
  ConnectedModel(int n, int p, int f, ModelOptions opts = {});

  SpaceMode mode() const override { return SpaceMode::connected_unipotent; }
  SpacePtr base_space() const override { return base_; }
  std::size_t stride() const override { return 1; }
  std::vector<IrrepLabel> irreps(std::int64_t m) const override;
  std::vector<IrrepLabel> fixed_irreps(std::int64_t m) const override;
  Cyclotomic degree(const IrrepLabel& v) const override;
  std::string form_label(const IrrepLabel& v) const override;
  ClassFunctionFamily character(const IrrepLabel& v) const override;
  ClassFunctionFamily sh(const IrrepLabel& w) const override;
  ClassFunctionFamily theta(const ClassFunctionFamily& f) const override;
  std::string describe() const override;

  std::uint64_t q() const { return q_; }
  const GroupPtr& fixed_group() const { return base_group_; }

 private:
  struct Level {
    std::shared_ptr<const FieldTower> tower;
    GroupPtr group;  // U_n(F_{q^m})
    std::unique_ptr<CharacterTable> table;
    std::vector<int> fixed_rows;
    CyclicExtension ext;
    std::unique_ptr<CharacterTable> ext_table;
    std::vector<FieldTower::Elem> embed;  // base tower codes -> this tower
  };
  const Level& level(std::int64_t m) const;
  std::shared_ptr<const FieldTower> tower_for(std::int64_t m) const;

  int n_, p_, f_;
  std::uint64_t q_;
  ModelOptions opts_;
  std::shared_ptr<const FieldTower> base_tower_;
  GroupPtr base_group_;
  std::unique_ptr<CharacterTable> base_table_;
  SpacePtr base_;
  std::vector<std::uint32_t> theta_image_;
  mutable std::map<std::int64_t, Level> levels_;
};

ShintaniBasis shintani_basis(const DescentModel& model, std::int64_t m);
// all chi_V, V in Irrep(G,F), on the base space
std::vector<ClassFunctionFamily> level_one_characters(const DescentModel& model);
std::vector<std::vector<Cyclotomic>> gram_matrix(const std::vector<ClassFunctionFamily>& v);
// entries <Sh_m(W), chi_V>
std::vector<std::vector<Cyclotomic>> shintani_matrix(const DescentModel& model, std::int64_t m);
bool is_identity_matrix(const std::vector<std::vector<Cyclotomic>>& a);
bool is_unitary(const std::vector<std::vector<Cyclotomic>>& a);

// <Sh_m(W), chi_V> against the Lefschetz-sum side over H^1(F^{m+1}).
struct IpfResult {
  Cyclotomic lhs;
  Cyclotomic rhs;
  bool ok() const { return lhs == rhs; }
};
IpfResult ipf_crosscheck(const FiniteModel& model, const IrrepLabel& w, const IrrepLabel& v);

struct MatchCertificate {
  std::int64_t from = 0;
  std::int64_t to = 0;
  std::vector<int> partner;        // from-vector i matches to-vector partner[i]
  std::vector<Cyclotomic> ratio;   // from_i = ratio[i] * to_{partner[i]}
};

// Exact root-of-unity matching of two orthonormal bases; nullopt when some
// vector has no partner; throws std::logic_error on an ambiguous partner.
std::optional<MatchCertificate> match_bases(const ShintaniBasis& a, const ShintaniBasis& b);

struct EigenResult {
  std::optional<Cyclotomic> eigenvalue;
  bool root_of_unity = false;
};
std::vector<EigenResult> theta_eigencheck(const DescentModel& model, const std::vector<ClassFunctionFamily>& vectors);

struct ScanResult {
  std::int64_t m0 = 0;
  ShintaniBasis almost;
  std::vector<MatchCertificate> certificates;
  std::vector<EigenResult> eigen;
};

// Least m0 (multiple of stride) with Sh_{m0} ~ Sh_{2 m0} (~ Sh_{3 m0} when
// 3 m0 <= m_max). ConfigError if m_max < 2 stride; CapExceeded if none found.
ScanResult stabilization_scan(const DescentModel& model, std::int64_t m_max, std::int64_t stride = 0);

}  // namespace shintani
