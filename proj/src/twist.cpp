#include "shintani/twist.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"
#include "shintani/errors.hpp"

namespace shintani {

namespace {

constexpr std::uint32_t unset = TwistedOrbitSpace::npos;

std::size_t reduce_mod(std::int64_t a, std::size_t n) {
  const auto nn = static_cast<std::int64_t>(n);
  return static_cast<std::size_t>(((a % nn) + nn) % nn);
}

bool same_space(const TwistedOrbitSpace& a, const TwistedOrbitSpace& b) {
  return &a == &b || (a.group == b.group && a.mode == b.mode && a.gamma1 == b.gamma1 && a.gamma2 == b.gamma2);
}

}  // namespace

TwistedClasses twisted_classes(const FinGroup& g, const GroupMap& phi) {
  TwistedClasses tc;
  tc.class_of.assign(g.order(), unset);
  tc.transporter.assign(g.order(), 0);
  const auto gens = g.generators();
  for (Index y = 0; y < g.order(); ++y) {
    if (tc.class_of[y] != unset) continue;
    const auto c = static_cast<std::uint32_t>(tc.reps.size());
    tc.reps.push_back(y);
    tc.class_of[y] = c;
    std::vector<Index> queue{y};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Index a = queue[head];
      for (Index s : gens) {
        const Index b = g.mul(g.mul(s, a), g.inv(phi(s)));
        if (tc.class_of[b] != unset) continue;
        tc.class_of[b] = c;
        tc.transporter[b] = g.mul(tc.transporter[a], g.inv(s));
        queue.push_back(b);
      }
    }
    tc.sizes.push_back(queue.size());
    tc.stabilizer_orders.push_back(g.order() / queue.size());
  }
  return tc;
}

// ---- inner forms ----

InnerFormFamily::InnerFormFamily(GroupPtr g, GroupMap f)
    : group_(std::move(g)), frob_(std::move(f)), classes_(twisted_classes(*group_, frob_)) {
  for (Index h : classes_.reps) {
    std::vector<Index> elems;
    for (Index x = 0; x < group_->order(); ++x)
      if (group_->conjugate(h, frob_(x)) == x) elems.push_back(x);
    forms_.push_back({h, make_subgroup(group_, std::move(elems), group_->name() + "^{" + group_->describe(h) + "F}")});
  }
  tables_.resize(forms_.size());
}

const CharacterTable& InnerFormFamily::table(std::size_t i) const {
  if (!tables_[i]) tables_[i] = std::make_unique<CharacterTable>(character_table(forms_[i].fixed.group));
  return *tables_[i];
}

InnerFormFamily inner_forms(GroupPtr g, const GroupMap& f) { return InnerFormFamily(std::move(g), f); }

// ---- orbit spaces ----

bool TwistedOrbitSpace::contains(Index g, Index h) const {
  const std::size_t n = group->order();
  if (g >= n || h >= n) return false;
  if (mode == SpaceMode::connected_unipotent) return h == 0;
  return orbit_of_[static_cast<std::size_t>(g) * n + h] != unset;
}

std::uint32_t TwistedOrbitSpace::locate(Index g, Index h) const {
  if (!contains(g, h)) {
    throw ValidationError("pair (" + group->describe(g) + ", " + group->describe(h) + ") is not in the space");
  }
  if (mode == SpaceMode::connected_unipotent) return orbit_of_[g];
  return orbit_of_[static_cast<std::size_t>(g) * group->order() + h];
}

std::string TwistedOrbitSpace::json() const {
  nlohmann::ordered_json j;
  j["mode"] = mode == SpaceMode::finite_model ? "finite-model" : "connected-unipotent";
  j["group_order"] = group->order();
  auto& orbits = j["orbits"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < size(); ++i) {
    orbits.push_back({{"g", reps[i].first}, {"h", reps[i].second}, {"size", sizes[i]}, {"stabilizer", stabilizers[i]}});
  }
  return j.dump(2);
}

SpacePtr r_space(GroupPtr g, const GroupMap& gamma1, const GroupMap& gamma2) {
  const std::size_t n = g->order();
  if (n * n > group_order_cap() * 64) throw CapExceeded("orbit space of " + std::to_string(n * n) + " pairs exceeds the cap");
  auto s = std::make_shared<TwistedOrbitSpace>(g, gamma1, gamma2, SpaceMode::finite_model);
  s->orbit_of_.assign(n * n, unset);
  std::vector<char> in_r(n * n, 0);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) in_r[a * n + b] = g->mul(g->mul(b, gamma2(a)), g->inv(gamma1(b))) == a;
  const auto gens = g->generators();
  for (std::size_t p = 0; p < n * n; ++p) {
    if (!in_r[p] || s->orbit_of_[p] != unset) continue;
    const auto c = static_cast<std::uint32_t>(s->reps.size());
    s->reps.emplace_back(static_cast<Index>(p / n), static_cast<Index>(p % n));
    s->orbit_of_[p] = c;
    std::vector<std::size_t> queue{p};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto a = static_cast<Index>(queue[head] / n), b = static_cast<Index>(queue[head] % n);
      for (Index x : gens) {
        const Index a2 = g->mul(g->mul(x, a), g->inv(gamma1(x)));
        const Index b2 = g->mul(g->mul(x, b), g->inv(gamma2(x)));
        const std::size_t q = static_cast<std::size_t>(a2) * n + b2;
        if (s->orbit_of_[q] != unset) continue;
        s->orbit_of_[q] = c;
        queue.push_back(q);
      }
    }
    s->sizes.push_back(queue.size());
    s->stabilizers.push_back(n / queue.size());
  }
  return s;
}

SpacePtr connected_space(GroupPtr fixed_group) {
  auto s = std::make_shared<TwistedOrbitSpace>(fixed_group, GroupMap::identity(fixed_group),
                                               GroupMap::identity(fixed_group), SpaceMode::connected_unipotent);
  const auto cc = conjugacy_classes(*fixed_group);
  for (std::size_t c = 0; c < cc.size(); ++c) {
    s->reps.emplace_back(cc.reps[c], 0);
    s->sizes.push_back(cc.sizes[c]);
    s->stabilizers.push_back(cc.centralizer_orders[c]);
  }
  s->orbit_of_ = cc.class_of;
  return s;
}

SpaceCache::SpaceCache(GroupPtr g, GroupMap f) : group_(std::move(g)), frob_(std::move(f)), n_(frob_.order()) {
  for (std::size_t k = 0; k < n_; ++k) powers_.push_back(frob_.power(static_cast<std::int64_t>(k)));
}

const GroupMap& SpaceCache::power(std::int64_t a) const { return powers_[reduce_mod(a, n_)]; }

SpacePtr SpaceCache::get(std::int64_t a, std::int64_t b) const {
  const auto key = std::make_pair(reduce_mod(a, n_), reduce_mod(b, n_));
  auto it = spaces_.find(key);
  if (it == spaces_.end()) it = spaces_.emplace(key, r_space(group_, powers_[key.first], powers_[key.second])).first;
  return it->second;
}

// ---- functions ----

ClassFunctionFamily::ClassFunctionFamily(SpacePtr s, std::vector<Cyclotomic> v) : space(std::move(s)), values(std::move(v)) {
  if (values.size() != space->size()) throw ValidationError("value count does not match the orbit count");
}

Cyclotomic ClassFunctionFamily::at_or_zero(Index g, Index h) const {
  return space->contains(g, h) ? values[space->locate(g, h)] : Cyclotomic();
}

bool ClassFunctionFamily::is_zero() const {
  return std::all_of(values.begin(), values.end(), [](const Cyclotomic& c) { return c.is_zero(); });
}

ClassFunctionFamily operator*(const Cyclotomic& c, const ClassFunctionFamily& f) {
  ClassFunctionFamily out(f.space);
  for (std::size_t i = 0; i < f.values.size(); ++i) out.values[i] = c * f.values[i];
  return out;
}

ClassFunctionFamily operator+(const ClassFunctionFamily& a, const ClassFunctionFamily& b) {
  if (!same_space(*a.space, *b.space)) throw ValidationError("functions live on different orbit spaces");
  ClassFunctionFamily out(a.space);
  for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = a.values[i] + b.values[i];
  return out;
}

// ---- orbit maps ----

OrbitBijection orbit_map(SpacePtr source, SpacePtr target,
                         const std::function<std::pair<Index, Index>(Index, Index)>& f) {
  if (source->size() != target->size()) throw std::logic_error("orbit map between spaces of different sizes");
  OrbitBijection out{source, target, {}};
  std::vector<char> hit(target->size(), 0);
  for (std::size_t i = 0; i < source->size(); ++i) {
    const auto [g, h] = f(source->reps[i].first, source->reps[i].second);
    const std::uint32_t j = target->locate(g, h);
    if (hit[j] || target->stabilizers[j] != source->stabilizers[i]) {
      throw std::logic_error("orbit map is not a stabilizer-preserving bijection");
    }
    hit[j] = 1;
    out.image.push_back(j);
  }
  return out;
}

OrbitBijection compose(const OrbitBijection& first, const OrbitBijection& second) {
  if (!same_space(*first.target, *second.source)) throw ValidationError("orbit maps are not composable");
  OrbitBijection out{first.source, second.target, {}};
  for (auto j : first.image) out.image.push_back(second.image[j]);
  return out;
}

ClassFunctionFamily pullback(const ClassFunctionFamily& f, const OrbitBijection& map) {
  if (!same_space(*f.space, *map.target)) throw ValidationError("function does not live on the target of the map");
  ClassFunctionFamily out(map.source);
  for (std::size_t i = 0; i < map.image.size(); ++i) out.values[i] = f.values[map.image[i]];
  return out;
}

OrbitBijection map_tau(const SpacePtr& s) {
  auto target = r_space(s->group, s->gamma2, s->gamma1);
  return orbit_map(s, target, [](Index g, Index h) { return std::make_pair(h, g); });
}

OrbitBijection map_t1(const SpacePtr& s) {
  const auto& g = *s->group;
  const GroupMap g2 = s->gamma2;
  auto target = r_space(s->group, g2.then(s->gamma1), g2);
  return orbit_map(s, target, [&](Index a, Index b) { return std::make_pair(g.mul(b, g2(a)), b); });
}

OrbitBijection map_t2(const SpacePtr& s) {
  const auto& g = *s->group;
  const GroupMap g2 = s->gamma2;
  auto target = r_space(s->group, s->gamma1, g2.then(s->gamma1));
  return orbit_map(s, target, [&](Index a, Index b) { return std::make_pair(a, g.mul(b, g2(a))); });
}

OrbitBijection map_t1(const SpaceCache& cache, std::int64_t a, std::int64_t b) {
  const auto& g = *cache.group();
  const GroupMap& g2 = cache.power(b);
  return orbit_map(cache.get(a, b), cache.get(a + b, b), [&](Index x, Index y) { return std::make_pair(g.mul(y, g2(x)), y); });
}

OrbitBijection map_t2(const SpaceCache& cache, std::int64_t a, std::int64_t b) {
  const auto& g = *cache.group();
  const GroupMap& g2 = cache.power(b);
  return orbit_map(cache.get(a, b), cache.get(a, a + b), [&](Index x, Index y) { return std::make_pair(x, g.mul(y, g2(x))); });
}

OrbitBijection inverse_norm(const SpaceCache& cache, std::int64_t m) {
  if (m < 1) throw ValidationError("inverse norm needs m >= 1");
  const auto& g = *cache.group();
  const GroupMap& f = cache.frobenius();
  return orbit_map(cache.get(0, 1), cache.get(m, 1), [&](Index x, Index h) {
    Index prod = x, fh = h;
    for (std::int64_t k = 0; k < m; ++k) {
      prod = g.mul(prod, fh);
      fh = f(fh);
    }
    return std::make_pair(prod, h);
  });
}

// ---- Lang's equation ----

LangSolution lang_solve(const UnitriangularLaw& law, std::uint64_t q, std::int64_t m,
                        std::span<const FieldTower::Elem> g) {
  if (m < 1) throw ValidationError("Lang equation needs m >= 1");
  const FieldTower& f = law.field();
  const int n = law.dim();
  if (g.size() != law.entry_count()) throw ValidationError("entry vector has the wrong length");
  std::vector<FieldTower::Elem> coeffs(static_cast<std::size_t>(m) + 1, 0);
  coeffs[0] = f.neg(1);
  coeffs[static_cast<std::size_t>(m)] = 1;
  auto verify = [&](const std::vector<FieldTower::Elem>& z) {
    std::vector<FieldTower::Elem> fz(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) fz[i] = f.frobenius_power(z[i], q, m);
    return fz == law.multiply_entries(z, g);
  };
  for (int level : f.levels()) {
    std::vector<FieldTower::Elem> z(law.entry_count(), 0);
    bool ok = true;
    for (int d = 1; d < n && ok; ++d) {
      for (int i = 0; i + d < n && ok; ++i) {
        const int j = i + d;
        FieldTower::Elem c = g[law.entry_position(i, j)];
        for (int k = i + 1; k < j; ++k) c = f.add(c, f.mul(z[law.entry_position(i, k)], g[law.entry_position(k, j)]));
        const auto sols = f.solve_linearized(coeffs, q, c, level);
        if (sols.empty()) {
          ok = false;
        } else {
          z[law.entry_position(i, j)] = sols.front();
        }
      }
    }
    if (!ok) continue;
    if (!verify(z)) throw std::logic_error("Lang solution failed substitution");
    return {level, z};
  }
  throw CapExceeded("Lang equation has no solution inside the field tower");
}

LangSolution lang_solve(const FinGroup& g, std::uint64_t q, std::int64_t m, Index x) {
  const UnitriangularLaw* law = as_unitriangular(g);
  if (!law) throw ValidationError("Lang solver needs a unitriangular group");
  const auto e = law->entries(x);
  return lang_solve(*law, q, m, e);
}

// ---- products ----

Cyclotomic hermitian(const ClassFunctionFamily& f1, const ClassFunctionFamily& f2) {
  if (!same_space(*f1.space, *f2.space)) throw ValidationError("functions live on different orbit spaces");
  Cyclotomic acc;
  for (std::size_t i = 0; i < f1.values.size(); ++i) {
    if (f1.values[i].is_zero() || f2.values[i].is_zero()) continue;
    acc += f1.values[i] * f2.values[i].conjugate() / Cyclotomic(static_cast<std::int64_t>(f1.space->stabilizers[i]));
  }
  return acc;
}

ClassFunctionFamily convolve(const ClassFunctionFamily& f1, const ClassFunctionFamily& f2, SpacePtr target) {
  const auto& s1 = *f1.space;
  const auto& s2 = *f2.space;
  if (s1.mode != SpaceMode::finite_model || s2.mode != SpaceMode::finite_model) {
    throw ValidationError("convolution is defined on finite-model spaces");
  }
  if (!(s1.gamma2 == s2.gamma2) || !(target->gamma2 == s1.gamma2)) throw ValidationError("mismatched Frobenius");
  if (!(target->gamma1 == s2.gamma1.then(s1.gamma1))) throw ValidationError("target is not R_{g1 g2, F}");
  const FinGroup& g = *target->group;
  ClassFunctionFamily out(target);
  for (std::size_t i = 0; i < target->size(); ++i) {
    const auto [a, h] = target->reps[i];
    Cyclotomic acc;
    for (Index a2 = 0; a2 < g.order(); ++a2) {
      if (!s2.contains(a2, h)) continue;
      const Index a1 = g.mul(a, g.inv(s1.gamma1(a2)));
      if (!s1.contains(a1, h)) continue;
      const auto& v1 = f1.values[s1.locate(a1, h)];
      if (v1.is_zero()) continue;
      acc += v1 * f2.values[s2.locate(a2, h)];
    }
    out.values[i] = acc;
  }
  return out;
}

ClassFunctionFamily unit_function(const SpacePtr& s) {
  if (!s->gamma1.is_identity()) throw ValidationError("the convolution unit lives on R_{id,F}");
  ClassFunctionFamily out(s);
  for (std::size_t i = 0; i < s->size(); ++i) out.values[i] = Cyclotomic(std::int64_t{s->reps[i].first == 0 ? 1 : 0});
  return out;
}

bool trace_identity_check(const FinGroup& g, const GroupMap& f, std::span<const std::int64_t> dims) {
  const auto t1 = twisted_classes(g, f);
  if (dims.size() != t1.size()) throw ValidationError("one dimension per form is required");
  const auto t2 = twisted_classes(g, f.power(2));
  Rational lhs;
  for (std::size_t i = 0; i < t1.size(); ++i) lhs = lhs + Rational(dims[i], static_cast<std::int64_t>(t1.stabilizer_orders[i]));
  std::vector<std::int64_t> bucket(t2.size(), 0);
  for (Index h = 0; h < g.order(); ++h) {
    const Index t = g.mul(h, f(h));
    const auto c = t2.class_of[t];
    if (t2.reps[c] == t) bucket[c] += dims[t1.class_of[h]];
  }
  Rational rhs;
  for (std::size_t c = 0; c < t2.size(); ++c) rhs = rhs + Rational(bucket[c], static_cast<std::int64_t>(t2.stabilizer_orders[c]));
  return lhs == rhs;
}

}  // namespace shintani
