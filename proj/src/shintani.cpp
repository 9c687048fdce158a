#include "shintani/shintani.hpp"

#include <stdexcept>

#include "shintani/errors.hpp"

namespace shintani {

namespace {

// extension row chosen by the deterministic tie-break
int pick_extension(const std::vector<int>& rows, const ModelOptions& opts) {
  return opts.tiebreak_last ? rows.back() : rows.front();
}

Index product_chain(const FinGroup& g, const GroupMap& f, Index h, std::int64_t m) {
  // h F(h) ... F^{m-1}(h)
  Index prod = 0, fh = h;
  for (std::int64_t k = 0; k < m; ++k) {
    prod = g.mul(prod, fh);
    fh = f(fh);
  }
  return prod;
}

}  // namespace

// ---- finite model ----

FiniteModel::FiniteModel(GroupPtr g, GroupMap f, ModelOptions opts)
    : group_(std::move(g)), frob_(std::move(f)), opts_(opts), cache_(group_, frob_), theta_map_(map_t2(cache_, 0, 1)) {
  validate_automorphism(frob_);
}

std::string FiniteModel::describe() const {
  return group_->name() + " (order " + std::to_string(group_->order()) + "), F of order " +
         std::to_string(cache_.frobenius_order());
}

const FiniteModel::LevelData& FiniteModel::level(std::int64_t m) const {
  const std::size_t n = cache_.frobenius_order();
  const auto key = static_cast<std::size_t>(((m % static_cast<std::int64_t>(n)) + static_cast<std::int64_t>(n)) % static_cast<std::int64_t>(n));
  auto it = levels_.find(key);
  if (it != levels_.end()) return it->second;
  LevelData ld;
  ld.forms = std::make_unique<InnerFormFamily>(group_, cache_.power(m));
  const auto r = cache_.get(m, 1);
  const FinGroup& g = *group_;
  for (std::size_t i = 0; i < ld.forms->size(); ++i) {
    FormData fd;
    const auto& form = ld.forms->form(i);
    for (Index h = 0; h < g.order(); ++h) {
      if (r->contains(form.rep, h)) {
        fd.h = h;
        break;
      }
    }
    if (fd.h) {
      const Index h = *fd.h;
      fd.phi = restrict_map(form.fixed, [&](Index x) { return g.conjugate(h, frob_(x)); });
      fd.fixed_rows = sigma_fixed_rows(ld.forms->table(i), *fd.phi).fixed;
    }
    ld.data.push_back(std::move(fd));
  }
  return levels_.emplace(key, std::move(ld)).first->second;
}

const InnerFormFamily& FiniteModel::forms(std::int64_t m) const { return *level(m).forms; }

std::optional<Index> FiniteModel::witness(std::int64_t m, std::size_t form) const { return level(m).data.at(form).h; }

const FiniteModel::Extension& FiniteModel::extension(std::int64_t m, std::size_t form) const {
  const auto key = std::make_pair(m, form);
  auto it = extensions_.find(key);
  if (it != extensions_.end()) return it->second;
  const auto& ld = level(m);
  const auto& fd = ld.data.at(form);
  if (!fd.h) throw ValidationError("form is not F-stable; no trace function exists");
  const FinGroup& g = *group_;
  const auto& sub = ld.forms->form(form).fixed;
  const Index gr = ld.forms->form(form).rep;
  const Index w = g.mul(product_chain(g, frob_, *fd.h, m), g.inv(gr));
  if (!sub.contains(w)) throw std::logic_error("extension element w is outside the fixed group");
  Extension e{cyclic_extension(sub.group, *fd.phi, static_cast<std::size_t>(m), static_cast<Index>(sub.locate[w])), nullptr};
  e.table = std::make_unique<CharacterTable>(character_table(e.ext.group));
  return extensions_.emplace(key, std::move(e)).first->second;
}

std::vector<IrrepLabel> FiniteModel::irreps(std::int64_t m) const {
  std::vector<IrrepLabel> out;
  const auto& ld = level(m);
  for (std::size_t i = 0; i < ld.forms->size(); ++i)
    for (std::size_t r = 0; r < ld.forms->table(i).size(); ++r) out.push_back({i, r, m});
  return out;
}

std::vector<IrrepLabel> FiniteModel::fixed_irreps(std::int64_t m) const {
  std::vector<IrrepLabel> out;
  const auto& ld = level(m);
  for (std::size_t i = 0; i < ld.forms->size(); ++i)
    for (int r : ld.data[i].fixed_rows) out.push_back({i, static_cast<std::size_t>(r), m});
  return out;
}

Cyclotomic FiniteModel::degree(const IrrepLabel& v) const { return forms(v.m).table(v.form).degree(v.row); }

std::string FiniteModel::form_label(const IrrepLabel& v) const { return group_->describe(forms(v.m).form(v.form).rep); }

std::vector<ClassFunctionFamily> FiniteModel::irrep_family(std::int64_t m) const {
  const auto& ld = level(m);
  const auto space = cache_.get(0, m);
  const FinGroup& g = *group_;
  const auto& tc = ld.forms->classes();
  std::vector<ClassFunctionFamily> out;
  for (const auto& label : irreps(m)) {
    ClassFunctionFamily f(space);
    const auto& sub = ld.forms->form(label.form).fixed;
    const auto& table = ld.forms->table(label.form);
    for (std::size_t i = 0; i < space->size(); ++i) {
      const auto [a, h] = space->reps[i];
      if (tc.class_of[h] != label.form) continue;
      const Index x = tc.transporter[h];
      const Index a2 = g.conjugate(x, a);
      if (!sub.contains(a2)) throw std::logic_error("transported element is outside the fixed group");
      f.values[i] = table.value(label.row, static_cast<Index>(sub.locate[a2]));
    }
    out.push_back(std::move(f));
  }
  return out;
}

ClassFunctionFamily FiniteModel::character(const IrrepLabel& v) const {
  if (v.m != 1) throw ValidationError("characters on Fun([G],F) are taken at level 1");
  const auto all = irreps(1);
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i] == v) return irrep_family(1)[i];
  throw ValidationError("unknown irreducible label");
}

ClassFunctionFamily FiniteModel::trace_function(const IrrepLabel& w) const {
  const std::int64_t m = w.m;
  const auto& ld = level(m);
  const auto& fd = ld.data.at(w.form);
  if (!fd.h) throw ValidationError("form is not F-stable; no trace function exists");
  const auto& e = extension(m, w.form);
  const auto ext_rows = extensions_of(ld.forms->table(w.form), static_cast<int>(w.row), e.ext, *e.table);
  const int row = pick_extension(ext_rows, opts_);
  const FinGroup& g = *group_;
  const FinGroup& eg = *e.ext.group;
  const auto& sub = ld.forms->form(w.form).fixed;
  const auto& tc = ld.forms->classes();
  const Index hinv = g.inv(*fd.h);
  const auto space = cache_.get(m, 1);
  ClassFunctionFamily out(space);
  for (std::size_t i = 0; i < space->size(); ++i) {
    const auto [a, b] = space->reps[i];
    if (tc.class_of[a] != w.form) continue;
    const Index x = tc.transporter[a];
    const Index b2 = g.mul(g.mul(x, b), g.inv(frob_(x)));
    const Index c = g.mul(b2, hinv);
    if (!sub.contains(c)) throw std::logic_error("twisting element is outside the fixed group");
    const Index cs = eg.mul(e.ext.element(static_cast<Index>(sub.locate[c]), 0), e.ext.s);
    out.values[i] = e.table->value(static_cast<std::size_t>(row), eg.inv(cs));
  }
  return out;
}

ClassFunctionFamily FiniteModel::sh(const IrrepLabel& w) const {
  return pullback(trace_function(w), inverse_norm(cache_, w.m));
}

ClassFunctionFamily FiniteModel::theta(const ClassFunctionFamily& f) const { return pullback(f, theta_map_); }

// ---- connected model ----

ConnectedModel::ConnectedModel(int n, int p, int f, ModelOptions opts) : n_(n), p_(p), f_(f), q_(1), opts_(opts) {
  if (n < 2) throw ValidationError("unitriangular dimension must be at least 2");
  if (f < 1) throw ValidationError("field degree must be positive");
  for (int i = 0; i < f; ++i) q_ *= static_cast<std::uint64_t>(p);
  base_tower_ = tower_for(1);
  base_group_ = unitriangular_group(base_tower_, n_, f_);
  base_table_ = std::make_unique<CharacterTable>(character_table(base_group_));
  base_ = connected_space(base_group_);
  const auto* law = as_unitriangular(*base_group_);
  for (std::size_t i = 0; i < base_->size(); ++i) {
    const auto x = law->entries(base_->reps[i].first);
    const auto z = lang_solve(*law, q_, 1, x).entries;
    const auto y = law->multiply_entries(law->multiply_entries(z, x), law->inverse_entries(z));
    theta_image_.push_back(base_->locate(law->index_of(y), 0));
  }
}

std::string ConnectedModel::describe() const {
  return "U_" + std::to_string(n_) + " over F_" + std::to_string(q_) + " closure, Frobenius x -> x^" + std::to_string(q_);
}

std::shared_ptr<const FieldTower> ConnectedModel::tower_for(std::int64_t m) const {
  // unipotent elements have p-power order at least n, so Lang solutions for
  // level f m live in degree f m p^k with p^k >= n
  int pk = 1;
  while (pk < n_) pk *= p_;
  const int fm = f_ * static_cast<int>(m);
  const std::vector<int> degrees{f_, fm, fm * pk};
  return std::make_shared<const FieldTower>(FieldTower::build(p_, degrees));
}

const ConnectedModel::Level& ConnectedModel::level(std::int64_t m) const {
  if (m < 1) throw ValidationError("level must be positive");
  auto it = levels_.find(m);
  if (it != levels_.end()) return it->second;
  Level lv;
  lv.tower = tower_for(m);
  lv.group = unitriangular_group(lv.tower, n_, f_ * static_cast<int>(m));
  lv.table = std::make_unique<CharacterTable>(character_table(lv.group));
  const auto frob = unitriangular_frobenius(lv.group, q_);
  lv.fixed_rows = sigma_fixed_rows(*lv.table, frob).fixed;
  lv.ext = cyclic_extension(lv.group, frob, static_cast<std::size_t>(m), 0);
  lv.ext_table = std::make_unique<CharacterTable>(character_table(lv.ext.group));
  lv.embed = lv.tower->embed_from(*base_tower_);
  return levels_.emplace(m, std::move(lv)).first->second;
}

std::vector<IrrepLabel> ConnectedModel::irreps(std::int64_t m) const {
  std::vector<IrrepLabel> out;
  const auto& rows = m == 1 ? base_table_->rows : level(m).table->rows;
  for (std::size_t r = 0; r < rows.size(); ++r) out.push_back({0, r, m});
  return out;
}

std::vector<IrrepLabel> ConnectedModel::fixed_irreps(std::int64_t m) const {
  std::vector<IrrepLabel> out;
  for (int r : level(m).fixed_rows) out.push_back({0, static_cast<std::size_t>(r), m});
  return out;
}

Cyclotomic ConnectedModel::degree(const IrrepLabel& v) const {
  return (v.m == 1 ? *base_table_ : *level(v.m).table).degree(v.row);
}

std::string ConnectedModel::form_label(const IrrepLabel&) const { return base_group_->describe(0); }

ClassFunctionFamily ConnectedModel::character(const IrrepLabel& v) const {
  if (v.m != 1 || v.form != 0 || v.row >= base_table_->size()) throw ValidationError("unknown level-1 label");
  return ClassFunctionFamily(base_, base_table_->rows[v.row]);
}

ClassFunctionFamily ConnectedModel::sh(const IrrepLabel& w) const {
  const auto& lv = level(w.m);
  const auto ext_rows = extensions_of(*lv.table, static_cast<int>(w.row), lv.ext, *lv.ext_table);
  const int row = pick_extension(ext_rows, opts_);
  const auto* base_law = as_unitriangular(*base_group_);
  const auto* law = as_unitriangular(*lv.group);
  const FieldTower& tw = *lv.tower;
  const FinGroup& eg = *lv.ext.group;
  ClassFunctionFamily out(base_);
  for (std::size_t i = 0; i < base_->size(); ++i) {
    auto x = base_law->entries(base_->reps[i].first);
    for (auto& e : x) e = lv.embed[e];
    const auto z = lang_solve(*law, q_, w.m, x).entries;
    std::vector<FieldTower::Elem> fz(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) fz[k] = tw.frobenius_power(z[k], q_, 1);
    const auto c = law->multiply_entries(z, law->inverse_entries(fz));
    const Index cs = eg.mul(lv.ext.element(law->index_of(c), 0), lv.ext.s);
    out.values[i] = lv.ext_table->value(static_cast<std::size_t>(row), eg.inv(cs));
  }
  return out;
}

ClassFunctionFamily ConnectedModel::theta(const ClassFunctionFamily& f) const {
  if (f.space != base_) throw ValidationError("function does not live on Fun([G],F)");
  ClassFunctionFamily out(base_);
  for (std::size_t i = 0; i < base_->size(); ++i) out.values[i] = f.values[theta_image_[i]];
  return out;
}

// ---- bases and matrices ----

ShintaniBasis shintani_basis(const DescentModel& model, std::int64_t m) {
  ShintaniBasis b;
  b.m = m;
  b.labels = model.fixed_irreps(m);
  for (const auto& w : b.labels) b.vectors.push_back(model.sh(w));
  return b;
}

std::vector<ClassFunctionFamily> level_one_characters(const DescentModel& model) {
  std::vector<ClassFunctionFamily> out;
  for (const auto& v : model.irreps(1)) out.push_back(model.character(v));
  return out;
}

std::vector<std::vector<Cyclotomic>> gram_matrix(const std::vector<ClassFunctionFamily>& v) {
  std::vector<std::vector<Cyclotomic>> g(v.size(), std::vector<Cyclotomic>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) g[i][j] = hermitian(v[i], v[j]);
  return g;
}

std::vector<std::vector<Cyclotomic>> shintani_matrix(const DescentModel& model, std::int64_t m) {
  const auto basis = shintani_basis(model, m);
  const auto chars = level_one_characters(model);
  std::vector<std::vector<Cyclotomic>> out(basis.vectors.size(), std::vector<Cyclotomic>(chars.size()));
  for (std::size_t i = 0; i < basis.vectors.size(); ++i)
    for (std::size_t j = 0; j < chars.size(); ++j) out[i][j] = hermitian(basis.vectors[i], chars[j]);
  return out;
}

bool is_identity_matrix(const std::vector<std::vector<Cyclotomic>>& a) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != a.size()) return false;
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[i][j] != Cyclotomic(std::int64_t{i == j ? 1 : 0})) return false;
  }
  return true;
}

bool is_unitary(const std::vector<std::vector<Cyclotomic>>& a) {
  const std::size_t n = a.size();
  std::vector<std::vector<Cyclotomic>> p(n, std::vector<Cyclotomic>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) return false;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) p[i][j] += a[i][k] * a[j][k].conjugate();
  }
  return is_identity_matrix(p);
}

IpfResult ipf_crosscheck(const FiniteModel& model, const IrrepLabel& w, const IrrepLabel& v) {
  IpfResult res;
  const auto chi = model.character(v);
  res.lhs = hermitian(model.sh(w), chi);

  const std::int64_t m = w.m;
  const auto tw = model.trace_function(w);
  const auto& cache = model.spaces();
  const FinGroup& g = *cache.group();
  const GroupMap& fm_inv = cache.power(-m);
  std::vector<const GroupMap*> fk;
  for (std::int64_t k = 0; k < m; ++k) fk.push_back(&cache.power(k));
  const auto t_classes = twisted_classes(g, cache.power(m + 1));
  for (std::size_t c = 0; c < t_classes.size(); ++c) {
    const Index t = t_classes.reps[c];
    Cyclotomic inner;
    for (Index h1 = 0; h1 < g.order(); ++h1) {
      const Index h2 = fm_inv(g.mul(g.inv(h1), t));
      if (!tw.space->contains(h1, h2)) continue;
      const Cyclotomic& a = tw.at(h1, h2);
      if (a.is_zero()) continue;
      // T_V on R_{F,F^m}: undo m pushes along t2, then tau back to chi_V
      Index x = h2, y = h1;
      for (std::int64_t k = m - 1; k >= 0; --k) y = g.mul(y, g.inv((*fk[static_cast<std::size_t>(k)])(x)));
      inner += a * chi.at(y, x).conjugate();
    }
    res.rhs += inner * Cyclotomic(Rational(1, static_cast<std::int64_t>(t_classes.stabilizer_orders[c])));
  }
  return res;
}

// ---- matching, eigenvectors, scan ----

std::optional<MatchCertificate> match_bases(const ShintaniBasis& a, const ShintaniBasis& b) {
  if (a.vectors.size() != b.vectors.size()) return std::nullopt;
  MatchCertificate cert;
  cert.from = a.m;
  cert.to = b.m;
  std::vector<char> used(b.vectors.size(), 0);
  for (const auto& u : a.vectors) {
    int partner = -1;
    Cyclotomic ratio;
    for (std::size_t j = 0; j < b.vectors.size(); ++j) {
      const auto r = vector_ratio_root(u.values, b.vectors[j].values);
      if (!r) continue;
      if (partner >= 0) throw std::logic_error("ambiguous basis match");
      partner = static_cast<int>(j);
      ratio = *r;
    }
    if (partner < 0 || used[partner]) return std::nullopt;
    used[partner] = 1;
    cert.partner.push_back(partner);
    cert.ratio.push_back(ratio);
  }
  return cert;
}

std::vector<EigenResult> theta_eigencheck(const DescentModel& model, const std::vector<ClassFunctionFamily>& vectors) {
  std::vector<EigenResult> out;
  for (const auto& v : vectors) {
    EigenResult r;
    const auto tv = model.theta(v);
    if (auto root = vector_ratio_root(tv.values, v.values)) {
      r.eigenvalue = *root;
      r.root_of_unity = true;
    } else {
      std::size_t i = 0;
      while (i < v.values.size() && v.values[i].is_zero()) ++i;
      if (i < v.values.size()) {
        const Cyclotomic lam = tv.values[i] / v.values[i];
        bool ok = true;
        for (std::size_t k = 0; k < v.values.size() && ok; ++k) ok = tv.values[k] == lam * v.values[k];
        if (ok) {
          r.eigenvalue = lam;
          r.root_of_unity = lam.as_root_of_unity().has_value();
        }
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

ScanResult stabilization_scan(const DescentModel& model, std::int64_t m_max, std::int64_t stride) {
  if (stride <= 0) stride = static_cast<std::int64_t>(model.stride());
  if (m_max < 2 * stride) {
    throw ConfigError("m_max = " + std::to_string(m_max) + " is below twice the stride " + std::to_string(stride));
  }
  std::map<std::int64_t, ShintaniBasis> bases;
  auto basis = [&](std::int64_t m) -> const ShintaniBasis& {
    auto it = bases.find(m);
    if (it == bases.end()) it = bases.emplace(m, shintani_basis(model, m)).first;
    return it->second;
  };
  for (std::int64_t m0 = stride; 2 * m0 <= m_max; m0 += stride) {
    const auto& b0 = basis(m0);
    auto c2 = match_bases(b0, basis(2 * m0));
    if (!c2) continue;
    ScanResult res;
    res.certificates.push_back(*c2);
    if (3 * m0 <= m_max) {
      auto c3 = match_bases(b0, basis(3 * m0));
      if (!c3) continue;
      res.certificates.push_back(*c3);
    }
    res.m0 = m0;
    res.almost = b0;
    res.eigen = theta_eigencheck(model, b0.vectors);
    return res;
  }
  throw CapExceeded("m_max too small: no stabilization found with 2 m0 <= " + std::to_string(m_max));
}

}  // namespace shintani
