#include "shintani/group.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "shintani/errors.hpp"

namespace shintani {

namespace {

std::atomic<std::size_t> g_order_cap{200000};

void check_cap(std::size_t n) {
  if (n > g_order_cap.load()) {
    throw CapExceeded("group order exceeds cap " + std::to_string(g_order_cap.load()));
  }
}

template <class T>
std::string key_of(const std::vector<T>& v) {
  return std::string(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T));
}

// BFS closure from the identity; elements appear in discovery order with
// generators applied on the right in the given order.
template <class T, class Mul>
std::vector<T> bfs_closure(const T& identity, const std::vector<T>& gens, Mul mul,
                           std::unordered_map<std::string, Index>& lookup) {
  std::vector<T> elems{identity};
  lookup.clear();
  lookup.emplace(key_of(identity), 0);
  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (const auto& g : gens) {
      T y = mul(elems[head], g);
      auto k = key_of(y);
      if (lookup.count(k)) continue;
      check_cap(elems.size() + 1);
      lookup.emplace(std::move(k), static_cast<Index>(elems.size()));
      elems.push_back(std::move(y));
    }
  }
  return elems;
}

class CyclicLaw : public GroupLaw {
 public:
  explicit CyclicLaw(std::size_t n) : n_(n) {}
  Index multiply(Index a, Index b) const override { return static_cast<Index>((a + b) % n_); }

 private:
  std::size_t n_;
};

class TableLaw : public GroupLaw {
 public:
  TableLaw(std::size_t n, std::vector<Index> table, std::vector<Index> labels)
      : n_(n), table_(std::move(table)), labels_(std::move(labels)) {}
  Index multiply(Index a, Index b) const override { return table_[static_cast<std::size_t>(a) * n_ + b]; }
  std::string describe(Index a) const override { return std::to_string(labels_[a]); }

 private:
  std::size_t n_;
  std::vector<Index> table_;
  std::vector<Index> labels_;
};

class PermutationLaw : public GroupLaw {
 public:
  std::size_t degree = 0;
  std::vector<std::vector<std::uint32_t>> perms;
  std::unordered_map<std::string, Index> lookup;

  Index multiply(Index a, Index b) const override {
    std::vector<std::uint32_t> c(degree);
    for (std::size_t i = 0; i < degree; ++i) c[i] = perms[a][perms[b][i]];
    return lookup.at(key_of(c));
  }

  std::string describe(Index a) const override {
    const auto& p = perms[a];
    std::string out;
    std::vector<bool> seen(degree, false);
    for (std::size_t i = 0; i < degree; ++i) {
      if (seen[i] || p[i] == i) continue;
      out += "(";
      std::size_t j = i;
      bool first = true;
      while (!seen[j]) {
        seen[j] = true;
        if (!first) out += ",";
        out += std::to_string(j + 1);
        first = false;
        j = p[j];
      }
      out += ")";
    }
    return out.empty() ? "()" : out;
  }
};

class MatrixLaw : public GroupLaw {
 public:
  std::shared_ptr<const FieldTower> field;
  int dim = 0;
  std::vector<std::vector<FieldTower::Elem>> mats;
  std::unordered_map<std::string, Index> lookup;

  std::vector<FieldTower::Elem> product(const std::vector<FieldTower::Elem>& a,
                                        const std::vector<FieldTower::Elem>& b) const {
    std::vector<FieldTower::Elem> c(static_cast<std::size_t>(dim * dim), 0);
    for (int i = 0; i < dim; ++i)
      for (int k = 0; k < dim; ++k) {
        const auto aik = a[i * dim + k];
        if (aik == 0) continue;
        for (int j = 0; j < dim; ++j) c[i * dim + j] = field->add(c[i * dim + j], field->mul(aik, b[k * dim + j]));
      }
    return c;
  }

  Index multiply(Index a, Index b) const override { return lookup.at(key_of(product(mats[a], mats[b]))); }

  std::string describe(Index a) const override {
    std::string out = "[";
    for (int i = 0; i < dim; ++i) {
      if (i) out += ",";
      out += "[";
      for (int j = 0; j < dim; ++j) {
        if (j) out += ",";
        out += std::to_string(mats[a][i * dim + j]);
      }
      out += "]";
    }
    return out + "]";
  }
};

class ProductLaw : public GroupLaw {
 public:
  ProductLaw(GroupPtr a, GroupPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  Index multiply(Index x, Index y) const override {
    const std::size_t nb = b_->order();
    return static_cast<Index>(a_->mul(static_cast<Index>(x / nb), static_cast<Index>(y / nb)) * nb +
                              b_->mul(static_cast<Index>(x % nb), static_cast<Index>(y % nb)));
  }
  std::string describe(Index x) const override {
    const std::size_t nb = b_->order();
    return "(" + a_->describe(static_cast<Index>(x / nb)) + "," + b_->describe(static_cast<Index>(x % nb)) + ")";
  }

 private:
  GroupPtr a_, b_;
};

class SubgroupLaw : public GroupLaw {
 public:
  SubgroupLaw(GroupPtr parent, std::vector<Index> embed, std::vector<std::int32_t> locate)
      : parent_(std::move(parent)), embed_(std::move(embed)), locate_(std::move(locate)) {}
  Index multiply(Index a, Index b) const override {
    return static_cast<Index>(locate_[parent_->mul(embed_[a], embed_[b])]);
  }
  std::string describe(Index a) const override { return parent_->describe(embed_[a]); }

 private:
  GroupPtr parent_;
  std::vector<Index> embed_;
  std::vector<std::int32_t> locate_;
};

class ExtensionLaw : public GroupLaw {
 public:
  ExtensionLaw(GroupPtr n, std::vector<std::vector<Index>> phi_powers, std::size_t m, Index w)
      : n_(std::move(n)), phik_(std::move(phi_powers)), m_(m), w_(w) {}
  Index multiply(Index a, Index b) const override {
    const std::size_t nn = n_->order();
    const std::size_t k1 = a / nn, k2 = b / nn;
    Index x = n_->mul(static_cast<Index>(a % nn), phik_[k1][b % nn]);
    std::size_t k = k1 + k2;
    if (k >= m_) {
      k -= m_;
      x = n_->mul(x, w_);
    }
    return static_cast<Index>(k * nn + x);
  }
  std::string describe(Index a) const override {
    const std::size_t nn = n_->order();
    return n_->describe(static_cast<Index>(a % nn)) + "*s^" + std::to_string(a / nn);
  }

 private:
  GroupPtr n_;
  std::vector<std::vector<Index>> phik_;
  std::size_t m_;
  Index w_;
};

// Extends `members` to its closure under right multiplication by `gens`.
// `admit(y)` is called for each new element and may throw.
template <class Mul, class Admit>
void close_under(Mul mul, const std::vector<Index>& gens, std::vector<Index>& members, std::vector<char>& in,
                 Admit admit) {
  for (std::size_t head = 0; head < members.size(); ++head) {
    for (Index s : gens) {
      const Index y = mul(members[head], s);
      if (in[y]) continue;
      admit(y);
      in[y] = 1;
      members.push_back(y);
    }
  }
}

// Greedy generating set: scan elements in index order, keep those outside the
// subgroup generated so far.
std::vector<Index> greedy_generators(const FinGroup& g) {
  std::vector<Index> gens;
  std::vector<char> in(g.order(), 0);
  std::vector<Index> members{0};
  in[0] = 1;
  for (Index x = 1; x < g.order() && members.size() < g.order(); ++x) {
    if (in[x]) continue;
    gens.push_back(x);
    close_under([&](Index a, Index b) { return g.mul(a, b); }, gens, members, in, [](Index) {});
  }
  return gens;
}

std::string witness(const FinGroup& g, Index x, Index y) {
  return "(" + g.describe(x) + ", " + g.describe(y) + ")";
}

}  // namespace

std::size_t group_order_cap() { return g_order_cap.load(); }

void set_group_order_cap(std::size_t cap) {
  if (cap < 1) throw ConfigError("group order cap must be positive");
  g_order_cap.store(cap);
}

// ---- FinGroup ----

FinGroup::FinGroup(std::size_t order, std::shared_ptr<const GroupLaw> law, std::vector<Index> generators,
                   std::string name)
    : order_(order), law_(std::move(law)), generators_(std::move(generators)), name_(std::move(name)) {
  check_cap(order_);
  if (order_ <= table_threshold()) {
    table_.resize(order_ * order_);
    for (Index a = 0; a < order_; ++a)
      for (Index b = 0; b < order_; ++b) table_[static_cast<std::size_t>(a) * order_ + b] = law_->multiply(a, b);
  }
  inv_.assign(order_, 0);
  elt_order_.assign(order_, 0);
  for (Index a = 0; a < order_; ++a) {
    if (elt_order_[a] != 0) continue;
    // walk the cyclic subgroup once and fill every power
    std::vector<Index> powers{0};
    Index x = a;
    while (x != 0) {
      powers.push_back(x);
      x = mul(x, a);
      if (powers.size() > order_) throw ValidationError("group law has an element of infinite order");
    }
    const std::size_t o = powers.size();
    for (std::size_t k = 1; k < o; ++k) {
      const std::size_t ok = o / std::gcd(o, k);
      elt_order_[powers[k]] = static_cast<std::uint32_t>(ok);
      inv_[powers[k]] = powers[o - k];
    }
  }
  elt_order_[0] = 1;
  inv_[0] = 0;
  exponent_ = 1;
  for (auto o : elt_order_) exponent_ = std::lcm(exponent_, static_cast<std::size_t>(o));
}

Index FinGroup::pow(Index a, std::int64_t e) const {
  const std::int64_t o = static_cast<std::int64_t>(elt_order_[a]);
  e = ((e % o) + o) % o;
  Index r = 0, base = a;
  while (e > 0) {
    if (e & 1) r = mul(r, base);
    base = mul(base, base);
    e >>= 1;
  }
  return r;
}

bool FinGroup::is_abelian() const {
  for (Index a : generators_)
    for (Index b : generators_)
      if (mul(a, b) != mul(b, a)) return false;
  return true;
}

// ---- GroupMap ----

GroupMap::GroupMap(GroupPtr source, GroupPtr target, std::vector<Index> images)
    : source_(std::move(source)), target_(std::move(target)), images_(std::move(images)) {
  if (images_.size() != source_->order()) throw std::invalid_argument("group map image table has wrong size");
}

GroupMap GroupMap::identity(GroupPtr g) {
  std::vector<Index> im(g->order());
  std::iota(im.begin(), im.end(), 0);
  return GroupMap(g, g, std::move(im));
}

GroupMap GroupMap::inner(GroupPtr g, Index h) {
  std::vector<Index> im(g->order());
  for (Index x = 0; x < g->order(); ++x) im[x] = g->conjugate(h, x);
  return GroupMap(g, g, std::move(im));
}

bool GroupMap::is_identity() const {
  for (Index x = 0; x < images_.size(); ++x)
    if (images_[x] != x) return false;
  return true;
}

std::size_t GroupMap::order() const {
  GroupMap cur = *this;
  std::size_t k = 1;
  while (!cur.is_identity()) {
    cur = cur.then(*this);
    ++k;
    if (k > 100000) throw ValidationError("map is not an automorphism of finite order");
  }
  return k;
}

GroupMap GroupMap::then(const GroupMap& next) const {
  std::vector<Index> im(images_.size());
  for (std::size_t x = 0; x < images_.size(); ++x) im[x] = next.images_[images_[x]];
  return GroupMap(source_, next.target_, std::move(im));
}

GroupMap GroupMap::inverse() const {
  std::vector<Index> im(images_.size());
  for (Index x = 0; x < images_.size(); ++x) im[images_[x]] = x;
  return GroupMap(target_, source_, std::move(im));
}

GroupMap GroupMap::power(std::int64_t k) const {
  if (k < 0) return inverse().power(-k);
  GroupMap r = identity(source_);
  GroupMap base = *this;
  while (k > 0) {
    if (k & 1) r = r.then(base);
    base = base.then(base);
    k >>= 1;
  }
  return r;
}

void validate_automorphism(const GroupMap& m) {
  const FinGroup& g = *m.source();
  if (m.source()->order() != m.target()->order()) throw ValidationError("automorphism must map a group to itself");
  if (m(0) != 0) throw ValidationError("map does not send the identity to the identity");
  for (Index x = 0; x < g.order(); ++x) {
    for (Index s : g.generators()) {
      if (m(g.mul(x, s)) != m.target()->mul(m(x), m(s))) {
        throw ValidationError("map is not a homomorphism; witness pair " + witness(g, x, s));
      }
    }
  }
  std::vector<char> hit(g.order(), 0);
  for (Index x = 0; x < g.order(); ++x) {
    if (hit[m(x)]) {
      Index y = 0;
      while (m(y) != m(x)) ++y;
      throw ValidationError("map is not bijective; witness pair " + witness(g, y, x));
    }
    hit[m(x)] = 1;
  }
}

GroupMap automorphism(GroupPtr g, std::span<const Index> generator_images) {
  const auto gens = g->generators();
  if (generator_images.size() != gens.size()) {
    throw ValidationError("expected " + std::to_string(gens.size()) + " generator images, got " +
                          std::to_string(generator_images.size()));
  }
  for (Index y : generator_images)
    if (y >= g->order()) throw ValidationError("generator image out of range");
  constexpr Index unset = static_cast<Index>(-1);
  std::vector<Index> im(g->order(), unset);
  im[0] = 0;
  std::vector<Index> queue{0};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Index x = queue[head];
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const Index y = g->mul(x, gens[i]);
      const Index iy = g->mul(im[x], generator_images[i]);
      if (im[y] == unset) {
        im[y] = iy;
        queue.push_back(y);
      } else if (im[y] != iy) {
        throw ValidationError("generator images do not define a homomorphism; witness pair " +
                              witness(*g, x, gens[i]));
      }
    }
  }
  GroupMap m(g, g, std::move(im));
  validate_automorphism(m);
  return m;
}

GroupMap automorphism_from_function(GroupPtr g, const std::function<Index(Index)>& f) {
  std::vector<Index> im(g->order());
  for (Index x = 0; x < g->order(); ++x) {
    im[x] = f(x);
    if (im[x] >= g->order()) throw ValidationError("map leaves the group");
  }
  GroupMap m(g, g, std::move(im));
  validate_automorphism(m);
  return m;
}

// ---- constructors ----

GroupPtr cyclic_group(std::size_t n) {
  if (n < 1) throw ValidationError("cyclic group order must be positive");
  std::vector<Index> gens;
  if (n > 1) gens.push_back(1);
  return std::make_shared<FinGroup>(n, std::make_shared<CyclicLaw>(n), gens, "Z/" + std::to_string(n));
}

GroupPtr trivial_group() { return cyclic_group(1); }

GroupPtr cayley_group(const std::vector<std::vector<Index>>& table) {
  const std::size_t n = table.size();
  if (n == 0) throw ValidationError("empty Cayley table");
  check_cap(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (table[i].size() != n) throw ValidationError("Cayley table row " + std::to_string(i) + " has wrong length");
    std::vector<char> seen(n, 0);
    for (Index v : table[i]) {
      if (v >= n) throw ValidationError("Cayley table entry out of range in row " + std::to_string(i));
      if (seen[v]) throw ValidationError("Cayley table row " + std::to_string(i) + " is not a permutation");
      seen[v] = 1;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<char> seen(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (seen[table[i][j]]) throw ValidationError("Cayley table column " + std::to_string(j) + " is not a permutation");
      seen[table[i][j]] = 1;
    }
  }
  std::size_t e = n;
  for (std::size_t i = 0; i < n && e == n; ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < n && ok; ++j) ok = table[i][j] == j && table[j][i] == j;
    if (ok) e = i;
  }
  if (e == n) throw ValidationError("Cayley table has no identity");
  // identity to index 0, other labels keep their relative order
  std::vector<Index> label_of(n), index_of(n);
  label_of[0] = static_cast<Index>(e);
  for (std::size_t i = 0, k = 1; i < n; ++i)
    if (i != e) label_of[k++] = static_cast<Index>(i);
  for (std::size_t k = 0; k < n; ++k) index_of[label_of[k]] = static_cast<Index>(k);
  std::vector<Index> t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a * n + b] = index_of[table[label_of[a]][label_of[b]]];
  auto law = std::make_shared<TableLaw>(n, t, label_of);
  // generators first, so Light's associativity test can use them
  auto probe = std::make_shared<FinGroup>(n, law, std::vector<Index>{}, "cayley");
  const auto gens = greedy_generators(*probe);
  for (Index s : gens)
    for (Index x = 0; x < n; ++x)
      for (Index y = 0; y < n; ++y) {
        const Index lhs = t[t[x * n + s] * n + y];
        const Index rhs = t[x * n + t[s * n + y]];
        if (lhs != rhs) {
          throw ValidationError("Cayley table is not associative at labels (" + std::to_string(label_of[x]) + ", " +
                                std::to_string(label_of[s]) + ", " + std::to_string(label_of[y]) + ")");
        }
      }
  return std::make_shared<FinGroup>(n, law, gens, "cayley(" + std::to_string(n) + ")");
}

GroupPtr permutation_group(std::size_t degree, const std::vector<std::vector<std::uint32_t>>& generators) {
  auto law = std::make_shared<PermutationLaw>();
  law->degree = degree;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const auto& g = generators[i];
    if (g.size() != degree) throw ValidationError("generator " + std::to_string(i) + " has wrong degree");
    std::vector<char> seen(degree, 0);
    for (auto v : g) {
      if (v >= degree || seen[v]) throw ValidationError("generator " + std::to_string(i) + " is not a permutation");
      seen[v] = 1;
    }
  }
  std::vector<std::uint32_t> id(degree);
  std::iota(id.begin(), id.end(), 0);
  law->perms = bfs_closure(
      id, generators,
      [&](const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
        std::vector<std::uint32_t> c(degree);
        for (std::size_t i = 0; i < degree; ++i) c[i] = a[b[i]];
        return c;
      },
      law->lookup);
  std::vector<Index> gens;
  for (const auto& g : generators) {
    const Index x = law->lookup.at(key_of(g));
    if (x != 0 && std::find(gens.begin(), gens.end(), x) == gens.end()) gens.push_back(x);
  }
  const std::size_t n = law->perms.size();
  return std::make_shared<FinGroup>(n, law, gens, "perm(" + std::to_string(n) + ")");
}

const std::vector<std::uint32_t>& permutation_of(const FinGroup& g, Index x) {
  auto law = dynamic_cast<const PermutationLaw*>(&g.law());
  if (!law) throw ValidationError("not a permutation group");
  return law->perms.at(x);
}

Index permutation_index(const FinGroup& g, const std::vector<std::uint32_t>& perm) {
  auto law = dynamic_cast<const PermutationLaw*>(&g.law());
  if (!law) throw ValidationError("not a permutation group");
  auto it = law->lookup.find(key_of(perm));
  if (it == law->lookup.end()) throw ValidationError("permutation is not in the group");
  return it->second;
}

namespace {

bool invertible(const FieldTower& f, int dim, std::vector<FieldTower::Elem> a) {
  for (int c = 0; c < dim; ++c) {
    int piv = c;
    while (piv < dim && a[piv * dim + c] == 0) ++piv;
    if (piv == dim) return false;
    for (int j = 0; j < dim; ++j) std::swap(a[c * dim + j], a[piv * dim + j]);
    const auto iv = f.inv(a[c * dim + c]);
    for (int r = c + 1; r < dim; ++r) {
      const auto factor = f.mul(a[r * dim + c], iv);
      if (factor == 0) continue;
      for (int j = c; j < dim; ++j) a[r * dim + j] = f.sub(a[r * dim + j], f.mul(factor, a[c * dim + j]));
    }
  }
  return true;
}

}  // namespace

GroupPtr matrix_group(std::shared_ptr<const FieldTower> field, int dim,
                      const std::vector<std::vector<FieldTower::Elem>>& generators) {
  auto law = std::make_shared<MatrixLaw>();
  law->field = field;
  law->dim = dim;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const auto& g = generators[i];
    if (g.size() != static_cast<std::size_t>(dim * dim)) throw ValidationError("generator " + std::to_string(i) + " has wrong size");
    for (auto v : g)
      if (v >= field->size()) throw ValidationError("generator " + std::to_string(i) + " has an entry outside the field");
    if (!invertible(*field, dim, g)) throw ValidationError("generator " + std::to_string(i) + " is singular");
  }
  std::vector<FieldTower::Elem> id(static_cast<std::size_t>(dim * dim), 0);
  for (int i = 0; i < dim; ++i) id[i * dim + i] = 1;
  law->mats = bfs_closure(
      id, generators, [&](const auto& a, const auto& b) { return law->product(a, b); }, law->lookup);
  std::vector<Index> gens;
  for (const auto& g : generators) {
    const Index x = law->lookup.at(key_of(g));
    if (x != 0 && std::find(gens.begin(), gens.end(), x) == gens.end()) gens.push_back(x);
  }
  const std::size_t n = law->mats.size();
  return std::make_shared<FinGroup>(n, law, gens, "matrix(" + std::to_string(n) + ")");
}

const std::vector<FieldTower::Elem>& matrix_of(const FinGroup& g, Index x) {
  auto law = dynamic_cast<const MatrixLaw*>(&g.law());
  if (!law) throw ValidationError("not a matrix group");
  return law->mats.at(x);
}

Index matrix_index(const FinGroup& g, const std::vector<FieldTower::Elem>& entries) {
  auto law = dynamic_cast<const MatrixLaw*>(&g.law());
  if (!law) throw ValidationError("not a matrix group");
  auto it = law->lookup.find(key_of(entries));
  if (it == law->lookup.end()) throw ValidationError("matrix is not in the group");
  return it->second;
}

GroupPtr direct_product(const GroupPtr& a, const GroupPtr& b) {
  const std::size_t n = a->order() * b->order();
  check_cap(n);
  std::vector<Index> gens;
  for (Index g : a->generators()) gens.push_back(static_cast<Index>(g * b->order()));
  for (Index h : b->generators()) gens.push_back(h);
  return std::make_shared<FinGroup>(n, std::make_shared<ProductLaw>(a, b), gens, a->name() + " x " + b->name());
}

// ---- subgroups ----

Subgroup make_subgroup(const GroupPtr& parent, std::vector<Index> elements, std::string name) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  if (elements.empty() || elements[0] != 0) throw ValidationError("subgroup must contain the identity");
  std::vector<std::int32_t> locate(parent->order(), -1);
  for (std::size_t i = 0; i < elements.size(); ++i) locate[elements[i]] = static_cast<std::int32_t>(i);
  // generating set and closure check inside the parent
  std::vector<Index> gens;  // parent indices
  std::vector<char> in(parent->order(), 0);
  std::vector<Index> members{0};
  in[0] = 1;
  for (Index x : elements) {
    if (in[x]) continue;
    gens.push_back(x);
    close_under([&](Index a, Index b) { return parent->mul(a, b); }, gens, members, in, [&](Index y) {
      if (locate[y] < 0) throw ValidationError("element set is not closed under multiplication");
    });
  }
  std::vector<Index> sub_gens;
  for (Index g : gens) sub_gens.push_back(static_cast<Index>(locate[g]));
  auto law = std::make_shared<SubgroupLaw>(parent, elements, locate);
  Subgroup s;
  s.group = std::make_shared<FinGroup>(elements.size(), law, sub_gens, std::move(name));
  s.parent = parent;
  s.embed = std::move(elements);
  s.locate = std::move(locate);
  return s;
}

Subgroup fixed_subgroup(const GroupMap& phi) {
  std::vector<Index> elems;
  for (Index x = 0; x < phi.source()->order(); ++x)
    if (phi(x) == x) elems.push_back(x);
  return make_subgroup(phi.source(), std::move(elems), phi.source()->name() + "^phi");
}

Subgroup centralizer(const GroupPtr& g, Index a) {
  std::vector<Index> elems;
  for (Index x = 0; x < g->order(); ++x)
    if (g->mul(x, a) == g->mul(a, x)) elems.push_back(x);
  return make_subgroup(g, std::move(elems), "C(" + g->describe(a) + ")");
}

GroupMap restrict_map(const Subgroup& sub, const std::function<Index(Index)>& parent_map) {
  std::vector<Index> im(sub.group->order());
  for (Index i = 0; i < im.size(); ++i) {
    const std::int32_t j = sub.locate[parent_map(sub.embed[i])];
    if (j < 0) throw ValidationError("map does not preserve the subgroup");
    im[i] = static_cast<Index>(j);
  }
  return GroupMap(sub.group, sub.group, std::move(im));
}

// ---- conjugacy classes ----

ConjugacyClasses conjugacy_classes(const FinGroup& g) {
  ConjugacyClasses cc;
  constexpr std::uint32_t unset = static_cast<std::uint32_t>(-1);
  cc.class_of.assign(g.order(), unset);
  cc.transporter.assign(g.order(), 0);
  const auto gens = g.generators();
  for (Index x = 0; x < g.order(); ++x) {
    if (cc.class_of[x] != unset) continue;
    const auto c = static_cast<std::uint32_t>(cc.reps.size());
    cc.reps.push_back(x);
    std::vector<Index> queue{x};
    cc.class_of[x] = c;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Index y = queue[head];
      for (Index s : gens) {
        const Index z = g.conjugate(s, y);
        if (cc.class_of[z] != unset) continue;
        cc.class_of[z] = c;
        // t_z z t_z^{-1} = rep with t_z = t_y s^{-1}
        cc.transporter[z] = g.mul(cc.transporter[y], g.inv(s));
        queue.push_back(z);
      }
    }
    cc.sizes.push_back(queue.size());
    cc.centralizer_orders.push_back(g.order() / queue.size());
  }
  for (Index r : cc.reps) cc.inverse_class.push_back(cc.class_of[g.inv(r)]);
  return cc;
}

// ---- cyclic extensions ----

CyclicExtension cyclic_extension(const GroupPtr& n, const GroupMap& phi, std::size_t m, Index w) {
  if (m < 1) throw ValidationError("extension degree must be positive");
  if (w >= n->order()) throw ValidationError("w is not an element of N");
  check_cap(n->order() * m);
  validate_automorphism(phi);
  if (phi(w) != w) throw ValidationError("phi(w) != w");
  std::vector<std::vector<Index>> phik(m);
  phik[0].resize(n->order());
  std::iota(phik[0].begin(), phik[0].end(), 0);
  for (std::size_t k = 1; k < m; ++k) {
    phik[k].resize(n->order());
    for (Index x = 0; x < n->order(); ++x) phik[k][x] = phi(phik[k - 1][x]);
  }
  for (Index x = 0; x < n->order(); ++x) {
    const Index phim = phi(phik[m - 1][x]);
    if (phim != n->conjugate(w, x)) {
      throw ValidationError("phi^m differs from conjugation by w at " + n->describe(x));
    }
  }
  std::vector<Index> gens(n->generators().begin(), n->generators().end());
  const Index s = m > 1 ? static_cast<Index>(n->order()) : w;
  if (m > 1) gens.push_back(s);
  CyclicExtension ext;
  ext.group = std::make_shared<FinGroup>(n->order() * m, std::make_shared<ExtensionLaw>(n, std::move(phik), m, w),
                                         gens, n->name() + " x| Z/" + std::to_string(m));
  ext.normal = n;
  ext.m = m;
  ext.s = s;
  ext.w = w;
  return ext;
}

// ---- unitriangular ----

UnitriangularLaw::UnitriangularLaw(std::shared_ptr<const FieldTower> field, int n, int level)
    : field_(std::move(field)), n_(n), level_(level) {
  if (n < 1) throw ValidationError("matrix size must be positive");
  if (field_->degree() % level != 0) throw ValidationError("level does not divide the tower degree");
  level_elems_ = field_->level_elements(level);
  if (field_->size() <= (1u << 22)) {
    level_pos_.assign(field_->size(), static_cast<std::uint32_t>(-1));
    for (std::size_t i = 0; i < level_elems_.size(); ++i) level_pos_[level_elems_[i]] = static_cast<std::uint32_t>(i);
  }
  double total = 1;
  for (std::size_t i = 0; i < entry_count(); ++i) total *= static_cast<double>(level_elems_.size());
  if (total > static_cast<double>(group_order_cap())) throw CapExceeded("unitriangular group order exceeds cap");
  order_ = static_cast<std::size_t>(total);
}

int UnitriangularLaw::entry_position(int i, int j) const {
  // row-major over i < j
  return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

std::vector<FieldTower::Elem> UnitriangularLaw::entries(Index a) const {
  std::vector<FieldTower::Elem> e(entry_count());
  const std::size_t r = level_elems_.size();
  for (auto& x : e) {
    x = level_elems_[a % r];
    a = static_cast<Index>(a / r);
  }
  return e;
}

Index UnitriangularLaw::index_of(std::span<const FieldTower::Elem> entries) const {
  const std::size_t r = level_elems_.size();
  std::size_t idx = 0;
  for (std::size_t t = entries.size(); t-- > 0;) {
    std::size_t pos;
    if (!level_pos_.empty()) {
      pos = entries[t] < level_pos_.size() ? level_pos_[entries[t]] : static_cast<std::uint32_t>(-1);
    } else {
      auto it = std::lower_bound(level_elems_.begin(), level_elems_.end(), entries[t]);
      pos = (it != level_elems_.end() && *it == entries[t]) ? static_cast<std::size_t>(it - level_elems_.begin())
                                                              : static_cast<std::uint32_t>(-1);
    }
    if (pos == static_cast<std::uint32_t>(-1)) throw ValidationError("matrix entry outside the group's field level");
    idx = idx * r + pos;
  }
  return static_cast<Index>(idx);
}

std::vector<FieldTower::Elem> UnitriangularLaw::multiply_entries(std::span<const FieldTower::Elem> a,
                                                                 std::span<const FieldTower::Elem> b) const {
  const FieldTower& f = *field_;
  std::vector<FieldTower::Elem> c(entry_count());
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) {
      FieldTower::Elem v = f.add(a[entry_position(i, j)], b[entry_position(i, j)]);
      for (int k = i + 1; k < j; ++k) v = f.add(v, f.mul(a[entry_position(i, k)], b[entry_position(k, j)]));
      c[entry_position(i, j)] = v;
    }
  return c;
}

std::vector<FieldTower::Elem> UnitriangularLaw::inverse_entries(std::span<const FieldTower::Elem> a) const {
  const FieldTower& f = *field_;
  std::vector<FieldTower::Elem> x(entry_count());
  for (int d = 1; d < n_; ++d)
    for (int i = 0; i + d < n_; ++i) {
      const int j = i + d;
      FieldTower::Elem v = a[entry_position(i, j)];
      for (int k = i + 1; k < j; ++k) v = f.add(v, f.mul(a[entry_position(i, k)], x[entry_position(k, j)]));
      x[entry_position(i, j)] = f.neg(v);
    }
  return x;
}

Index UnitriangularLaw::multiply(Index a, Index b) const {
  const auto ea = entries(a), eb = entries(b);
  return index_of(multiply_entries(ea, eb));
}

std::string UnitriangularLaw::describe(Index a) const {
  const auto e = entries(a);
  std::string out = "U[";
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(e[i]);
  }
  return out + "]";
}

GroupPtr unitriangular_group(std::shared_ptr<const FieldTower> field, int n, int level) {
  auto law = std::make_shared<UnitriangularLaw>(field, n, level);
  // elementary generators x_{i,i+1}(b) for an F_p-basis b of the level
  std::vector<FieldTower::Elem> basis;
  {
    const auto elems = field->level_elements(level);
    std::vector<FieldTower::Elem> span{0};
    for (auto e : elems) {
      if (std::binary_search(span.begin(), span.end(), e)) continue;
      basis.push_back(e);
      std::vector<FieldTower::Elem> next;
      for (auto s : span)
        for (int c = 0; c < field->characteristic(); ++c) next.push_back(field->add(s, field->mul(static_cast<FieldTower::Elem>(c), e)));
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      span = std::move(next);
    }
  }
  std::vector<Index> gens;
  for (int i = 0; i + 1 < n; ++i)
    for (auto b : basis) {
      std::vector<FieldTower::Elem> e(law->entry_count(), 0);
      e[law->entry_position(i, i + 1)] = b;
      gens.push_back(law->index_of(e));
    }
  const std::size_t order = law->order();
  return std::make_shared<FinGroup>(order, law, gens,
                                    "U_" + std::to_string(n) + "(F_" + std::to_string(field->characteristic()) + "^" +
                                        std::to_string(level) + ")");
}

const UnitriangularLaw* as_unitriangular(const FinGroup& g) { return dynamic_cast<const UnitriangularLaw*>(&g.law()); }

GroupMap unitriangular_frobenius(const GroupPtr& g, std::uint64_t q, std::int64_t j) {
  const auto* law = as_unitriangular(*g);
  if (!law) throw ValidationError("not a unitriangular group");
  return automorphism_from_function(g, [&](Index x) {
    auto e = law->entries(x);
    for (auto& v : e) v = law->field().frobenius_power(v, q, j);
    return law->index_of(e);
  });
}

}  // namespace shintani
