#include "shintani/csheaf.hpp"

#include <stdexcept>

#include "shintani/errors.hpp"

namespace shintani {

DoubleSimples double_simples(const GroupPtr& g) {
  DoubleSimples ds;
  ds.group = g;
  ds.classes = conjugacy_classes(*g);
  for (std::size_t c = 0; c < ds.classes.size(); ++c) {
    const Index a = ds.classes.reps[c];
    auto cent = std::make_shared<const Subgroup>(centralizer(g, a));
    auto table = std::make_shared<const CharacterTable>(character_table(cent->group));
    const auto a_local = static_cast<Index>(cent->locate[a]);
    for (std::size_t r = 0; r < table->size(); ++r) {
      DoubleSimple s;
      s.a = a;
      s.class_index = c;
      s.centralizer = cent;
      s.table = table;
      s.row = r;
      const auto deg = table->degree(r).as_rational();
      s.dim = deg && deg->den() == 1 ? static_cast<std::int64_t>(ds.classes.sizes[c]) * deg->num() : 0;
      s.theta = table->value(r, a_local) / table->degree(r);
      ds.simples.push_back(std::move(s));
    }
  }
  return ds;
}

SigmaAction sigma_action(const DoubleSimples& ds, const GroupMap& sigma) {
  const FinGroup& g = *ds.group;
  const GroupMap sigma_inv = sigma.inverse();
  SigmaAction out;
  out.witness.assign(ds.simples.size(), std::nullopt);
  std::vector<std::size_t> first_of_class(ds.classes.size(), 0);
  for (std::size_t i = ds.simples.size(); i-- > 0;) first_of_class[ds.simples[i].class_index] = i;
  for (std::size_t i = 0; i < ds.simples.size(); ++i) {
    const auto& s = ds.simples[i];
    const Index sa = sigma(s.a);
    const auto c2 = ds.classes.class_of[sa];
    const Index y = ds.classes.transporter[sa];  // y sigma(a) y^{-1} = a'
    const Index yinv = g.inv(y);
    const auto& target = ds.simples[first_of_class[c2]];
    const auto& cent2 = *target.centralizer;
    const auto& table2 = *target.table;
    const auto& cent = *s.centralizer;
    // rho'(z) = rho(sigma^{-1}(y^{-1} z y)) on the classes of C(a')
    std::vector<Cyclotomic> composed(table2.classes.size());
    for (std::size_t k = 0; k < composed.size(); ++k) {
      const Index z = cent2.embed[table2.classes.reps[k]];
      const Index back = sigma_inv(g.mul(g.mul(yinv, z), y));
      if (!cent.contains(back)) throw std::logic_error("sigma does not carry centralizers to centralizers");
      composed[k] = s.table->value(s.row, static_cast<Index>(cent.locate[back]));
    }
    int j = -1;
    for (std::size_t r = 0; r < table2.size(); ++r) {
      if (table2.rows[r] == composed) {
        j = static_cast<int>(first_of_class[c2] + r);
        break;
      }
    }
    if (j < 0) throw std::logic_error("sigma-image of a simple is not a simple");
    out.perm.push_back(j);
    if (j == static_cast<int>(i)) {
      out.fixed.push_back(j);
      out.witness[i] = y;
    }
  }
  return out;
}

CsTrace cs_trace_data(const DoubleSimples& ds, std::size_t simple, const GroupMap& sigma, Index u,
                      const ModelOptions& opts) {
  const FinGroup& g = *ds.group;
  const auto& s = ds.simples.at(simple);
  if (g.conjugate(u, sigma(s.a)) != s.a) throw ValidationError("witness does not satisfy u sigma(a) u^{-1} = a");
  const auto& cent = *s.centralizer;
  const std::size_t n = sigma.order();
  const GroupMap phi = restrict_map(cent, [&](Index x) { return g.conjugate(u, sigma(x)); });
  Index w = 0, su = u;
  for (std::size_t k = 0; k < n; ++k) {
    w = g.mul(w, su);
    su = sigma(su);
  }
  if (!cent.contains(w)) throw std::logic_error("s^n lies outside the centralizer");
  CsTrace t{&ds, simple, sigma, u, cyclic_extension(cent.group, phi, n, static_cast<Index>(cent.locate[w])), nullptr, 0};
  t.ext_table = std::make_shared<const CharacterTable>(character_table(t.ext.group));
  const auto rows = extensions_of(*s.table, static_cast<int>(s.row), t.ext, *t.ext_table);
  t.ext_row = opts.tiebreak_last ? rows.back() : rows.front();
  return t;
}

Cyclotomic cs_trace_value(const CsTrace& t, Index g, Index h, Index x) {
  const FinGroup& grp = *t.ds->group;
  const auto& s = t.ds->simples[t.simple];
  if (grp.conjugate(x, s.a) != g) throw ValidationError("x does not conjugate a to g");
  const Index c = grp.mul(grp.mul(grp.mul(grp.inv(x), h), t.sigma(x)), grp.inv(t.u));
  const auto& cent = *s.centralizer;
  if (!cent.contains(c)) throw std::logic_error("c lies outside the centralizer");
  const FinGroup& e = *t.ext.group;
  const Index cs = e.mul(t.ext.element(static_cast<Index>(cent.locate[c]), 0), t.ext.s);
  return t.ext_table->value(static_cast<std::size_t>(t.ext_row), e.inv(cs));
}

ClassFunctionFamily cs_trace_function(const CsTrace& t, const SpacePtr& space) {
  const auto& ds = *t.ds;
  const auto& s = ds.simples[t.simple];
  if (space->group != ds.group || !space->gamma1.is_identity() || !(space->gamma2 == t.sigma)) {
    throw ValidationError("trace functions live on R_{id,sigma}");
  }
  const FinGroup& g = *ds.group;
  ClassFunctionFamily out(space);
  for (std::size_t i = 0; i < space->size(); ++i) {
    const auto [a, h] = space->reps[i];
    if (ds.classes.class_of[a] != s.class_index) continue;
    out.values[i] = cs_trace_value(t, a, h, g.inv(ds.classes.transporter[a]));
  }
  return out;
}

std::string TheoremIIIReport::summary() const {
  std::string out = std::to_string(fixed_simples) + " fixed simples, " + std::to_string(almost_characters) +
                    " almost characters";
  if (!unmatched.empty()) {
    out += "; unmatched simples:";
    for (int k : unmatched) out += " " + std::to_string(k);
  }
  std::size_t bad = 0;
  for (bool b : eigen_ok) bad += b ? 0 : 1;
  if (bad) out += "; " + std::to_string(bad) + " eigenvalue failures";
  return out;
}

TheoremIIIReport verify_theorem_iii(const FiniteModel& model, const std::vector<ClassFunctionFamily>& almost,
                                    const ModelOptions& opts) {
  const auto& cache = model.spaces();
  const auto ds = double_simples(cache.group());
  const auto action = sigma_action(ds, cache.frobenius());
  const auto space = model.base_space();
  TheoremIIIReport rep;
  rep.fixed_simples = action.fixed.size();
  rep.almost_characters = almost.size();
  std::vector<char> used(almost.size(), 0);
  for (int k : action.fixed) {
    const auto t = cs_trace_data(ds, static_cast<std::size_t>(k), cache.frobenius(), *action.witness[k], opts);
    const auto tc = cs_trace_function(t, space);
    const auto image = model.theta(tc);
    bool eig = true;
    const Cyclotomic inv_theta = ds.simples[k].theta.inverse();
    for (std::size_t i = 0; i < tc.values.size() && eig; ++i) eig = image.values[i] == inv_theta * tc.values[i];
    rep.eigen_ok.push_back(eig);
    int partner = -1;
    Cyclotomic ratio;
    for (std::size_t j = 0; j < almost.size(); ++j) {
      if (used[j]) continue;
      if (auto r = vector_ratio_root(tc.values, almost[j].values)) {
        partner = static_cast<int>(j);
        ratio = *r;
        break;
      }
    }
    rep.partner.push_back(partner);
    rep.ratio.push_back(ratio);
    if (partner < 0) {
      rep.unmatched.push_back(k);
    } else {
      used[partner] = 1;
    }
  }
  bool eig_all = true;
  for (bool b : rep.eigen_ok) eig_all = eig_all && b;
  rep.ok = rep.unmatched.empty() && rep.fixed_simples == rep.almost_characters && eig_all;
  return rep;
}

IntegralityReport integrality_report(const DoubleSimples& ds) {
  IntegralityReport r;
  const auto n = static_cast<std::int64_t>(ds.group->order());
  r.expected = n * n;
  for (std::size_t i = 0; i < ds.simples.size(); ++i) {
    const auto& s = ds.simples[i];
    if (s.dim <= 0) {
      r.dims_integral = false;
      if (r.witness.empty()) r.witness = "simple " + std::to_string(i) + " has non-integral dimension";
    }
    if (!s.theta.as_root_of_unity()) {
      r.twists_roots_of_unity = false;
      if (r.witness.empty()) r.witness = "simple " + std::to_string(i) + " has twist " + s.theta.str();
    }
    r.sum_dim_squared += s.dim * s.dim;
  }
  r.sum_matches = r.sum_dim_squared == r.expected;
  return r;
}

}  // namespace shintani
