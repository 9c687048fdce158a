#include "shintani/checks.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "shintani/errors.hpp"

namespace shintani {

namespace {

CheckResult pass(std::string detail = {}) { return {true, std::move(detail)}; }
CheckResult fail(std::string detail) { return {false, std::move(detail)}; }

std::string label_text(const IrrepLabel& w) {
  return "W(m=" + std::to_string(w.m) + ",form=" + std::to_string(w.form) + ",row=" + std::to_string(w.row) + ")";
}

Cyclotomic random_value(std::mt19937& rng) {
  std::uniform_int_distribution<int> c(-3, 3), k(0, 11);
  return Cyclotomic(std::int64_t{c(rng)}) + Cyclotomic(std::int64_t{c(rng)}) * Cyclotomic::root_of_unity(12, k(rng));
}

ClassFunctionFamily random_function(const SpacePtr& s, std::mt19937& rng) {
  ClassFunctionFamily f(s);
  for (auto& v : f.values) v = random_value(rng);
  return f;
}

int pk_at_least(int p, int n) {
  int pk = 1;
  while (pk < n) pk *= p;
  return pk;
}

}  // namespace

ModelSource ModelSource::finite(GroupPtr g, GroupMap frob) {
  ModelSource s;
  s.group = std::move(g);
  s.frobenius = std::move(frob);
  return s;
}

ModelSource ModelSource::connected(int n, int p, int f) {
  ModelSource s;
  s.n = n;
  s.p = p;
  s.f = f;
  return s;
}

std::unique_ptr<DescentModel> ModelSource::build(const ModelOptions& opts) const {
  if (is_connected()) return std::make_unique<ConnectedModel>(n, p, f, opts);
  if (!group || !frobenius) throw ConfigError("model source has no group");
  return std::make_unique<FiniteModel>(group, *frobenius, opts);
}

Verifier::Verifier(ModelSource src, VerifyOptions opts) : src_(std::move(src)), opts_(opts) {}

const std::vector<std::string>& Verifier::all_suites() {
  static const std::vector<std::string> names{"orthonormality", "sh1",      "ipf",         "theta", "stabilization",
                                              "eigen",          "matching", "integrality", "trace", "algebra",
                                              "lang",           "tiebreak", "determinism"};
  return names;
}

std::vector<std::string> Verifier::applicable() const {
  std::vector<std::string> out;
  for (const auto& s : all_suites()) {
    const bool finite_only = s == "ipf" || s == "theta" || s == "matching" || s == "integrality" || s == "trace" ||
                             s == "algebra";
    if (src_.is_connected() ? finite_only : s == "lang") continue;
    out.push_back(s);
  }
  return out;
}

CheckResult Verifier::run(const std::string& suite) {
  const auto app = applicable();
  if (std::find(app.begin(), app.end(), suite) == app.end()) {
    const bool known = std::find(all_suites().begin(), all_suites().end(), suite) != all_suites().end();
    throw ConfigError(known ? "suite '" + suite + "' does not apply to this group" : "unknown suite '" + suite + "'");
  }
  if (suite == "orthonormality") return orthonormality();
  if (suite == "sh1") return sh1();
  if (suite == "ipf") return ipf();
  if (suite == "theta") return theta();
  if (suite == "stabilization") return stabilization();
  if (suite == "eigen") return eigen();
  if (suite == "matching") return matching();
  if (suite == "integrality") return integrality();
  if (suite == "trace") return trace();
  if (suite == "algebra") return algebra();
  if (suite == "lang") return lang();
  if (suite == "tiebreak") return tiebreak();
  return determinism();
}

const DescentModel& Verifier::model() {
  if (!model_) model_ = src_.build();
  return *model_;
}

const FiniteModel& Verifier::finite() { return dynamic_cast<const FiniteModel&>(model()); }

const ScanResult& Verifier::scan() {
  if (!scan_) scan_ = stabilization_scan(model(), opts_.m_max);
  return *scan_;
}

const DoubleSimples& Verifier::simples() {
  if (!simples_) simples_ = double_simples(src_.group);
  return *simples_;
}

std::vector<std::int64_t> Verifier::levels() const {
  if (src_.is_connected()) return {1, 2, 4};
  return {1, 2, 3, 4};
}

CheckResult Verifier::orthonormality() {
  const auto& md = model();
  const std::size_t dim = md.base_space()->size();
  for (auto m : levels()) {
    const auto b = shintani_basis(md, m);
    if (b.vectors.size() != dim)
      return fail("m=" + std::to_string(m) + ": " + std::to_string(b.vectors.size()) + " vectors for dimension " +
                  std::to_string(dim));
    if (!is_identity_matrix(gram_matrix(b.vectors))) return fail("m=" + std::to_string(m) + ": Gram matrix is not I");
    if (!is_unitary(shintani_matrix(md, m))) return fail("m=" + std::to_string(m) + ": transition matrix not unitary");
  }
  return pass("levels " + std::to_string(levels().size()) + ", dimension " + std::to_string(dim));
}

CheckResult Verifier::sh1() {
  const auto& md = model();
  const auto ws = md.fixed_irreps(1);
  for (const auto& w : ws)
    if (md.sh(w).values != md.theta(md.character(w)).values) return fail(label_text(w) + ": Sh_1 differs from t2 pullback");
  return pass(std::to_string(ws.size()) + " characters");
}

CheckResult Verifier::ipf() {
  const auto& md = finite();
  std::size_t count = 0;
  const auto vs = md.fixed_irreps(1);
  for (std::int64_t m = 1; m <= 4; ++m)
    for (const auto& w : md.fixed_irreps(m))
      for (const auto& v : vs) {
        const auto r = ipf_crosscheck(md, w, v);
        if (!r.ok()) return fail(label_text(w) + " against " + label_text(v) + ": " + r.lhs.str() + " != " + r.rhs.str());
        ++count;
      }
  return pass(std::to_string(count) + " pairs");
}

CheckResult Verifier::theta() {
  const auto& md = finite();
  std::vector<ClassFunctionFamily> images;
  for (const auto& x : level_one_characters(md)) images.push_back(md.theta(x));
  if (!is_identity_matrix(gram_matrix(images))) return fail("Theta does not preserve the character basis Gram matrix");
  const auto& ds = simples();
  const auto& sigma = *src_.frobenius;
  const auto act = sigma_action(ds, sigma);
  for (int k : act.fixed) {
    const auto tc = cs_trace_function(cs_trace_data(ds, k, sigma, *act.witness[k]), md.base_space());
    const auto th = md.theta(tc);
    const auto ev = ds.simples[k].theta.inverse();
    for (std::size_t i = 0; i < tc.values.size(); ++i)
      if (th.values[i] != ev * tc.values[i]) return fail("simple " + std::to_string(k) + ": Theta T_C != theta^-1 T_C");
  }
  return pass(std::to_string(act.fixed.size()) + " fixed simples");
}

CheckResult Verifier::stabilization() {
  const auto& s = scan();
  if (s.certificates.empty()) return fail("no match certificates");
  for (const auto& c : s.certificates)
    for (const auto& r : c.ratio)
      if (!r.as_root_of_unity()) return fail("ratio " + r.str() + " is not a root of unity");
  if (!is_identity_matrix(gram_matrix(s.almost.vectors))) return fail("almost characters are not orthonormal");
  std::ostringstream os;
  os << "m0=" << s.m0;
  for (const auto& c : s.certificates) os << " " << c.from << "~" << c.to;
  return pass(os.str());
}

CheckResult Verifier::eigen() {
  const auto& s = scan();
  for (std::size_t i = 0; i < s.eigen.size(); ++i) {
    if (!s.eigen[i].eigenvalue) return fail("almost character " + std::to_string(i) + " is not a Theta eigenvector");
    if (!s.eigen[i].root_of_unity)
      return fail("almost character " + std::to_string(i) + " eigenvalue " + s.eigen[i].eigenvalue->str());
  }
  return pass(std::to_string(s.eigen.size()) + " eigenvectors");
}

CheckResult Verifier::matching() {
  const auto rep = verify_theorem_iii(finite(), scan().almost.vectors);
  if (!rep.ok) return fail(rep.summary());
  if (rep.fixed_simples != rep.almost_characters) return fail(rep.summary());
  return pass(std::to_string(rep.fixed_simples) + " = " + std::to_string(rep.almost_characters));
}

CheckResult Verifier::integrality() {
  const auto r = integrality_report(simples());
  if (!r.ok()) return fail(r.witness.empty() ? "sum of squares " + std::to_string(r.sum_dim_squared) : r.witness);
  return pass("sum dim^2 = " + std::to_string(r.sum_dim_squared));
}

CheckResult Verifier::trace() {
  const auto& g = *src_.group;
  const auto& f = *src_.frobenius;
  const std::size_t forms = twisted_classes(g, f).size();
  std::mt19937 rng(opts_.seed);
  std::uniform_int_distribution<std::int64_t> d(0, 20);
  std::vector<std::int64_t> dims(forms, 0);
  if (!trace_identity_check(g, f, dims)) return fail("zero vector");
  for (int t = 0; t < opts_.trials; ++t) {
    for (auto& x : dims) x = d(rng);
    if (!trace_identity_check(g, f, dims)) return fail("trial " + std::to_string(t));
  }
  return pass(std::to_string(opts_.trials) + " dimension vectors");
}

CheckResult Verifier::algebra() {
  const auto& cache = finite().spaces();
  const auto base = cache.get(0, 1);
  const auto unit = unit_function(base);
  const auto t1 = map_t1(cache, 1, 1);
  std::mt19937 rng(opts_.seed);
  for (int t = 0; t < opts_.trials; ++t) {
    const auto a = random_function(base, rng), b = random_function(base, rng), c = random_function(base, rng);
    const std::string at = "trial " + std::to_string(t) + ": ";
    if (convolve(unit, a, base).values != a.values) return fail(at + "unit");
    const auto ab = convolve(a, b, base);
    if (ab.values != convolve(b, a, base).values) return fail(at + "commutativity");
    if (convolve(ab, c, base).values != convolve(a, convolve(b, c, base), base).values) return fail(at + "associativity");
    const auto f2 = random_function(t1.target, rng);
    if (convolve(a, pullback(f2, t1), cache.get(1, 1)).values != pullback(convolve(a, f2, t1.target), t1).values)
      return fail(at + "t1 module map");
  }
  return pass(std::to_string(opts_.trials) + " triples");
}

CheckResult Verifier::lang() {
  for (std::int64_t m : {1, 2}) {
    auto r = check_lang_random(src_.n, src_.p, src_.f, m, opts_.trials, opts_.seed);
    if (!r.ok) return fail("m=" + std::to_string(m) + ": " + r.detail);
  }
  return pass(std::to_string(opts_.trials) + " right-hand sides per level");
}

CheckResult Verifier::tiebreak() {
  const auto& a = model();
  const auto b = src_.build({true});
  std::size_t count = 0;
  for (auto m : levels())
    for (const auto& w : a.fixed_irreps(m)) {
      const auto r = vector_ratio_root(a.sh(w).values, b->sh(w).values);
      if (!r) return fail(label_text(w) + ": no root-of-unity ratio");
      if (r->pow(m) != Cyclotomic(1)) return fail(label_text(w) + ": ratio " + r->str() + " is not an m-th root");
      ++count;
    }
  if (!src_.is_connected()) {
    const auto& ds = simples();
    const auto& sigma = *src_.frobenius;
    const auto act = sigma_action(ds, sigma);
    for (int k : act.fixed) {
      const auto x = cs_trace_function(cs_trace_data(ds, k, sigma, *act.witness[k]), a.base_space());
      const auto y = cs_trace_function(cs_trace_data(ds, k, sigma, *act.witness[k], {true}), a.base_space());
      if (!vector_ratio_root(x.values, y.values)) return fail("simple " + std::to_string(k) + ": no root-of-unity ratio");
      ++count;
    }
  }
  return pass(std::to_string(count) + " vectors");
}

CheckResult Verifier::determinism() {
  const auto& a = model();
  const auto b = src_.build();
  for (auto m : levels()) {
    const auto x = shintani_basis(a, m), y = shintani_basis(*b, m);
    if (x.labels != y.labels) return fail("m=" + std::to_string(m) + ": labels differ");
    for (std::size_t i = 0; i < x.vectors.size(); ++i)
      if (x.vectors[i].values != y.vectors[i].values) return fail("m=" + std::to_string(m) + ": vector differs");
  }
  return pass("fresh model reproduces all bases");
}

CheckResult check_lang_random(int n, int p, int f, std::int64_t m, int trials, std::uint32_t seed) {
  const int fm = f * static_cast<int>(m);
  const std::vector<int> degrees{f, fm, fm * pk_at_least(p, n)};
  const auto tower = std::make_shared<const FieldTower>(FieldTower::build(p, degrees));
  const auto g = unitriangular_group(tower, n, f);
  const auto* law = as_unitriangular(*g);
  std::uint64_t q = 1;
  for (int i = 0; i < f; ++i) q *= static_cast<std::uint64_t>(p);
  std::mt19937 rng(seed);
  std::uniform_int_distribution<Index> pick(0, static_cast<Index>(g->order() - 1));
  for (int t = 0; t < trials; ++t) {
    const Index x = pick(rng);
    const auto rhs = law->entries(x);
    const auto sol = lang_solve(*law, q, m, rhs);
    std::vector<FieldTower::Elem> fz(sol.entries.size());
    for (std::size_t i = 0; i < fz.size(); ++i) fz[i] = tower->frobenius_power(sol.entries[i], q, m);
    if (fz != law->multiply_entries(sol.entries, rhs)) return fail("element " + g->describe(x));
  }
  return pass(std::to_string(trials) + " right-hand sides");
}

}  // namespace shintani
