#include "shintani/cli.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <sys/file.h>
#include <unistd.h>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "shintani/csheaf.hpp"
#include "shintani/errors.hpp"

namespace shintani::cli {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr const char* kVersion = "shintani-cli 1.0.0";

[[noreturn]] void bad(const std::string& path, const std::string& msg) { throw ConfigError(path + ": " + msg); }

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) bad(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) bad(path, "missing field '" + key + "'");
  return *it;
}

std::int64_t get_int(const json& v, const std::string& path, std::int64_t lo, std::int64_t hi) {
  if (!v.is_number_integer()) bad(path, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < lo || x > hi) bad(path, "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return x;
}

const json& get_array(const json& v, const std::string& path) {
  if (!v.is_array()) bad(path, "expected an array");
  return v;
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

// ---- groups ----

struct Built {
  std::string kind;
  GroupPtr group;
  std::shared_ptr<const FieldTower> tower;
  int p = 0;
  int degree = 0;
  int dim = 0;
  std::vector<Index> listed;  // elements named by the spec's generator list
  std::vector<Built> factors;
};

std::shared_ptr<const FieldTower> parse_field(const json& spec, const std::string& path, int& p, int& degree) {
  const auto& fb = field(spec, "field", path);
  const std::string fp = path + ".field";
  p = static_cast<int>(get_int(field(fb, "p", fp), fp + ".p", 2, 65521));
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) bad(fp + ".p", std::to_string(p) + " is not prime");
  degree = fb.contains("degree") ? static_cast<int>(get_int(fb["degree"], fp + ".degree", 1, 1 << 20)) : 1;
  const std::vector<int> degrees{degree};
  return std::make_shared<const FieldTower>(FieldTower::build(p, degrees));
}

FieldTower::Elem parse_field_elem(const FieldTower& f, const json& v, const std::string& path) {
  if (v.is_array()) {
    if (v.size() > static_cast<std::size_t>(f.degree())) bad(path, "too many coefficients");
    std::vector<int> coords(static_cast<std::size_t>(f.degree()), 0);
    for (std::size_t i = 0; i < v.size(); ++i)
      coords[i] = static_cast<int>(get_int(v[i], at(path, i), 0, f.characteristic() - 1));
    return f.from_coordinates(coords);
  }
  return static_cast<FieldTower::Elem>(get_int(v, path, 0, static_cast<std::int64_t>(f.size()) - 1));
}

std::vector<FieldTower::Elem> parse_matrix(const FieldTower& f, int dim, const json& v, const std::string& path) {
  get_array(v, path);
  if (v.size() != static_cast<std::size_t>(dim)) bad(path, "expected " + std::to_string(dim) + " rows");
  std::vector<FieldTower::Elem> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto rp = at(path, i);
    get_array(v[i], rp);
    if (v[i].size() != static_cast<std::size_t>(dim)) bad(rp, "expected " + std::to_string(dim) + " entries");
    for (std::size_t j = 0; j < v[i].size(); ++j) out.push_back(parse_field_elem(f, v[i][j], at(rp, j)));
  }
  return out;
}

// "(1 2 3)(4,5)" with 1-based points
std::vector<std::uint32_t> parse_cycles(const std::string& s, std::size_t degree, const std::string& path) {
  std::vector<std::uint32_t> perm(degree);
  for (std::size_t i = 0; i < degree; ++i) perm[i] = static_cast<std::uint32_t>(i);
  std::vector<char> used(degree, 0);
  std::size_t i = 0;
  auto skip = [&] {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  skip();
  while (i < s.size()) {
    if (s[i] != '(') bad(path, "expected '(' at offset " + std::to_string(i));
    ++i;
    std::vector<std::uint32_t> cycle;
    for (;;) {
      skip();
      if (i < s.size() && s[i] == ')') {
        ++i;
        break;
      }
      if (i < s.size() && s[i] == ',' && !cycle.empty()) {
        ++i;
        continue;
      }
      if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) bad(path, "malformed cycle");
      std::size_t v = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        v = v * 10 + static_cast<std::size_t>(s[i] - '0');
        if (v > degree) bad(path, "point exceeds the degree");
        ++i;
      }
      if (v == 0) bad(path, "points are numbered from 1");
      if (used[v - 1]) bad(path, "point " + std::to_string(v) + " repeated");
      used[v - 1] = 1;
      cycle.push_back(static_cast<std::uint32_t>(v - 1));
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) perm[cycle[k]] = cycle[(k + 1) % cycle.size()];
    skip();
  }
  return perm;
}

std::vector<std::uint32_t> parse_permutation(const json& v, std::size_t degree, const std::string& path) {
  if (v.is_string()) return parse_cycles(v.get<std::string>(), degree, path);
  get_array(v, path);
  if (v.size() != degree) bad(path, "expected " + std::to_string(degree) + " images");
  std::vector<std::uint32_t> perm;
  for (std::size_t i = 0; i < v.size(); ++i)
    perm.push_back(static_cast<std::uint32_t>(get_int(v[i], at(path, i), 0, static_cast<std::int64_t>(degree) - 1)));
  return perm;
}

Index resolve_element(const Built& b, const json& v, const std::string& path);

Built build_group(const json& spec, const std::string& path) {
  Built b;
  const auto& kind = field(spec, "kind", path);
  if (!kind.is_string()) bad(path + ".kind", "expected a string");
  b.kind = kind.get<std::string>();
  if (b.kind == "cyclic") {
    const auto n = get_int(field(spec, "n", path), path + ".n", 1, static_cast<std::int64_t>(group_order_cap()) + 1);
    b.group = cyclic_group(static_cast<std::size_t>(n));
    if (n > 1) b.listed = {1};
  } else if (b.kind == "permutation") {
    const auto degree = static_cast<std::size_t>(get_int(field(spec, "degree", path), path + ".degree", 1, 4096));
    const auto gp = path + ".generators";
    const auto& gens = get_array(field(spec, "generators", path), gp);
    std::vector<std::vector<std::uint32_t>> perms;
    for (std::size_t i = 0; i < gens.size(); ++i) perms.push_back(parse_permutation(gens[i], degree, at(gp, i)));
    b.group = permutation_group(degree, perms);
    for (const auto& p : perms) b.listed.push_back(permutation_index(*b.group, p));
  } else if (b.kind == "cayley") {
    const auto tp = path + ".table";
    const auto& t = get_array(field(spec, "table", path), tp);
    std::vector<std::vector<Index>> table;
    for (std::size_t i = 0; i < t.size(); ++i) {
      get_array(t[i], at(tp, i));
      std::vector<Index> row;
      for (std::size_t j = 0; j < t[i].size(); ++j)
        row.push_back(static_cast<Index>(get_int(t[i][j], at(at(tp, i), j), 0, static_cast<std::int64_t>(t.size()) - 1)));
      table.push_back(std::move(row));
    }
    b.group = cayley_group(table);
    b.listed.assign(b.group->generators().begin(), b.group->generators().end());
  } else if (b.kind == "matrix") {
    b.tower = parse_field(spec, path, b.p, b.degree);
    b.dim = static_cast<int>(get_int(field(spec, "dim", path), path + ".dim", 1, 16));
    const auto gp = path + ".generators";
    const auto& gens = get_array(field(spec, "generators", path), gp);
    std::vector<std::vector<FieldTower::Elem>> mats;
    for (std::size_t i = 0; i < gens.size(); ++i) mats.push_back(parse_matrix(*b.tower, b.dim, gens[i], at(gp, i)));
    b.group = matrix_group(b.tower, b.dim, mats);
    for (const auto& m : mats) b.listed.push_back(matrix_index(*b.group, m));
  } else if (b.kind == "unitriangular") {
    b.tower = parse_field(spec, path, b.p, b.degree);
    b.dim = static_cast<int>(get_int(field(spec, "n", path), path + ".n", 1, 16));
    b.group = unitriangular_group(b.tower, b.dim, b.degree);
    b.listed.assign(b.group->generators().begin(), b.group->generators().end());
  } else if (b.kind == "direct_product") {
    const auto fp = path + ".factors";
    const auto& fs = get_array(field(spec, "factors", path), fp);
    if (fs.empty()) bad(fp, "expected at least one factor");
    for (std::size_t i = 0; i < fs.size(); ++i) {
      b.factors.push_back(build_group(fs[i], at(fp, i)));
      if (b.factors.back().kind == "unitriangular" && fs[i].value("mode", "finite") != "finite")
        bad(at(fp, i), "factors must be finite groups");
    }
    b.group = b.factors[0].group;
    for (std::size_t i = 1; i < b.factors.size(); ++i) b.group = direct_product(b.group, b.factors[i].group);
    b.listed.assign(b.group->generators().begin(), b.group->generators().end());
  } else {
    bad(path + ".kind", "unknown kind '" + b.kind + "'");
  }
  return b;
}

Index resolve_element(const Built& b, const json& v, const std::string& path) {
  const auto order = static_cast<std::int64_t>(b.group->order());
  if (b.kind == "cayley") {
    const auto label = get_int(v, path, 0, order - 1);
    for (Index k = 0; k < b.group->order(); ++k)
      if (b.group->describe(k) == std::to_string(label)) return k;
    bad(path, "unknown label");
  }
  if (v.is_number_integer()) return static_cast<Index>(get_int(v, path, 0, order - 1));
  if (b.kind == "permutation") {
    const auto degree = permutation_of(*b.group, 0).size();
    return permutation_index(*b.group, parse_permutation(v, degree, path));
  }
  if (b.kind == "matrix") return matrix_index(*b.group, parse_matrix(*b.tower, b.dim, v, path));
  if (b.kind == "unitriangular") {
    const auto m = parse_matrix(*b.tower, b.dim, v, path);
    std::vector<FieldTower::Elem> upper;
    for (int i = 0; i < b.dim; ++i)
      for (int j = 0; j < b.dim; ++j) {
        const auto e = m[static_cast<std::size_t>(i * b.dim + j)];
        if (i == j && e != 1) bad(path, "diagonal entries must be 1");
        if (i > j && e != 0) bad(path, "entries below the diagonal must be 0");
        if (i < j) {
          if (!b.tower->in_level(e, b.degree)) bad(path, "entry outside the field");
          upper.push_back(e);
        }
      }
    return as_unitriangular(*b.group)->index_of(upper);
  }
  if (b.kind == "direct_product") {
    get_array(v, path);
    if (v.size() != b.factors.size()) bad(path, "expected one entry per factor");
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      idx = idx * b.factors[i].group->order() + resolve_element(b.factors[i], v[i], at(path, i));
    return static_cast<Index>(idx);
  }
  bad(path, "expected an element index");
}

GroupMap entrywise_frobenius(const Built& b, std::int64_t power) {
  if (b.kind == "unitriangular") {
    std::uint64_t p = static_cast<std::uint64_t>(b.p);
    return unitriangular_frobenius(b.group, p, power);
  }
  const auto& g = b.group;
  return automorphism_from_function(g, [&](Index x) {
    auto m = matrix_of(*g, x);
    for (auto& e : m) e = b.tower->frobenius_power(e, static_cast<std::uint64_t>(b.p), power);
    return matrix_index(*g, m);
  });
}

GroupMap parse_automorphism(const Built& b, const json& a, const std::string& path) {
  if (!a.is_object() || a.size() != 1) bad(path, "expected exactly one of images, inner, map, frobenius");
  const auto& g = b.group;
  if (a.contains("images")) {
    const auto ip = path + ".images";
    const auto& imgs = get_array(a["images"], ip);
    if (imgs.size() != b.listed.size())
      bad(ip, "expected " + std::to_string(b.listed.size()) + " images, one per generator");
    std::map<Index, Index> assigned;
    for (std::size_t i = 0; i < imgs.size(); ++i) {
      const Index y = resolve_element(b, imgs[i], at(ip, i));
      const Index x = b.listed[i];
      if (x == 0 && y != 0) bad(at(ip, i), "the identity must map to the identity");
      auto [it, fresh] = assigned.emplace(x, y);
      if (!fresh && it->second != y) bad(at(ip, i), "conflicting images for a repeated generator");
    }
    std::vector<Index> gen_images;
    for (Index s : g->generators()) gen_images.push_back(assigned.at(s));
    return automorphism(g, gen_images);
  }
  if (a.contains("inner")) return GroupMap::inner(g, resolve_element(b, a["inner"], path + ".inner"));
  if (a.contains("map")) {
    const auto mp = path + ".map";
    const auto& imgs = get_array(a["map"], mp);
    if (imgs.size() != g->order()) bad(mp, "expected one image per element");
    std::vector<Index> table;
    for (std::size_t i = 0; i < imgs.size(); ++i) table.push_back(resolve_element(b, imgs[i], at(mp, i)));
    // entries are listed in the spec's own element numbering (labels for Cayley tables)
    return automorphism_from_function(g, [&](Index x) {
      return table[b.kind == "cayley" ? static_cast<Index>(std::stoul(g->describe(x))) : x];
    });
  }
  if (a.contains("frobenius")) {
    const auto fp = path + ".frobenius";
    if (b.kind != "matrix" && b.kind != "unitriangular") bad(fp, "needs a matrix or unitriangular group");
    const auto& fr = a["frobenius"];
    if (!fr.is_object()) bad(fp, "expected an object");
    const auto power = fr.contains("power") ? get_int(fr["power"], fp + ".power", 0, 1 << 20) : 1;
    return entrywise_frobenius(b, power);
  }
  bad(path, "expected exactly one of images, inner, map, frobenius");
}

std::string modulus_text(const FieldTower& f) {
  std::string s = "p=" + std::to_string(f.characteristic()) + " [";
  const auto m = f.modulus();
  for (std::size_t i = 0; i < m.size(); ++i) s += (i ? "," : "") + std::to_string(m[i]);
  return s + "]";
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

// ---- output ----

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_field(cells[i]);
  return out + "\n";
}

std::string orbit_label(const TwistedOrbitSpace& s, std::size_t i) {
  const auto [g, h] = s.reps[i];
  if (s.mode == SpaceMode::connected_unipotent) return s.group->describe(g);
  return "(" + s.group->describe(g) + ";" + s.group->describe(h) + ")";
}

ojson values_json(const std::vector<Cyclotomic>& v) {
  auto a = ojson::array();
  for (const auto& x : v) a.push_back(x.str());
  return a;
}

std::string root_text(const Cyclotomic& c) {
  const auto r = c.as_root_of_unity();
  if (!r) return c.str();
  return "E(" + std::to_string(r->n) + ")^" + std::to_string(r->k);
}

struct Header {
  std::vector<std::pair<std::string, std::string>> fields;
  void add(std::string k, std::string v) { fields.emplace_back(std::move(k), std::move(v)); }
  std::string csv() const {
    std::string out;
    for (const auto& [k, v] : fields) out += "# " + k + ": " + v + "\n";
    return out;
  }
  ojson json() const {
    ojson j = ojson::object();
    for (const auto& [k, v] : fields) j[k] = v;
    return j;
  }
};

std::string params_text(const std::map<std::string, std::string>& params) {
  std::string s;
  for (const auto& [k, v] : params) s += (s.empty() ? "" : " ") + k + "=" + v;
  return s.empty() ? "-" : s;
}

std::int64_t int_param(const CommandRequest& req, const std::string& key, std::optional<std::int64_t> fallback) {
  auto it = req.params.find(key);
  if (it == req.params.end()) {
    if (!fallback) throw ConfigError("command '" + req.command + "' needs --" + key);
    return *fallback;
  }
  try {
    std::size_t used = 0;
    const auto v = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("--" + key + ": expected an integer, got '" + it->second + "'");
  }
}

// Everything a command needs, computed after the spec is parsed.
struct Session {
  const SessionConfig& cfg;
  const CommandRequest& req;
  ParsedSpec spec;
  Header header;
  bool json_out = false;
};

const FiniteModel& as_finite(const DescentModel& m, const std::string& cmd) {
  const auto* f = dynamic_cast<const FiniteModel*>(&m);
  if (!f) throw ConfigError("command '" + cmd + "' needs a finite group");
  return *f;
}

int cmd_classes(Session& s, std::ostream& out) {
  const auto model = make_model(s.spec, {s.cfg.tiebreak_override});
  const auto base = model->base_space();
  if (model->mode() == SpaceMode::connected_unipotent) {
    // H^1 is trivial; the classes of G^F index Fun([G],F)
    const auto& g = *base->group;
    if (s.json_out) {
      ojson j;
      j["header"] = s.header.json();
      auto& rows = j["classes"] = ojson::array();
      for (std::size_t i = 0; i < base->size(); ++i)
        rows.push_back({{"index", i}, {"rep", g.describe(base->reps[i].first)}, {"size", base->sizes[i]},
                        {"centralizer", base->stabilizers[i]}});
      j["orbit_space"] = ojson::parse(base->json());
      out << j.dump(2) << "\n";
    } else {
      out << s.header.csv() << csv_row({"index", "rep", "size", "centralizer"});
      for (std::size_t i = 0; i < base->size(); ++i)
        out << csv_row({std::to_string(i), g.describe(base->reps[i].first), std::to_string(base->sizes[i]),
                        std::to_string(base->stabilizers[i])});
    }
    return kPass;
  }
  const auto& g = *s.spec.source.group;
  const auto tc = twisted_classes(g, *s.spec.source.frobenius);
  if (s.json_out) {
    ojson j;
    j["header"] = s.header.json();
    auto& rows = j["twisted_classes"] = ojson::array();
    for (std::size_t i = 0; i < tc.size(); ++i)
      rows.push_back({{"index", i}, {"rep", tc.reps[i]}, {"label", g.describe(tc.reps[i])}, {"size", tc.sizes[i]},
                      {"stabilizer", tc.stabilizer_orders[i]}});
    j["orbit_space"] = ojson::parse(base->json());
    out << j.dump(2) << "\n";
  } else {
    out << s.header.csv() << csv_row({"index", "rep", "label", "size", "stabilizer"});
    for (std::size_t i = 0; i < tc.size(); ++i)
      out << csv_row({std::to_string(i), std::to_string(tc.reps[i]), g.describe(tc.reps[i]), std::to_string(tc.sizes[i]),
                      std::to_string(tc.stabilizer_orders[i])});
  }
  return kPass;
}

int cmd_irreps(Session& s, std::ostream& out) {
  const auto m = int_param(s.req, "m", 1);
  if (m < 1) throw ConfigError("--m must be positive");
  const auto model = make_model(s.spec, {s.cfg.tiebreak_override});
  const auto all = model->irreps(m);
  const auto fixed = model->fixed_irreps(m);
  auto is_fixed = [&](const IrrepLabel& v) { return std::find(fixed.begin(), fixed.end(), v) != fixed.end(); };
  if (s.json_out) {
    ojson j;
    j["header"] = s.header.json();
    j["m"] = m;
    auto& rows = j["irreps"] = ojson::array();
    for (const auto& v : all)
      rows.push_back({{"form", v.form}, {"form_rep", model->form_label(v)}, {"row", v.row},
                      {"degree", model->degree(v).str()}, {"frobenius_fixed", is_fixed(v)}});
    j["fixed_count"] = fixed.size();
    out << j.dump(2) << "\n";
  } else {
    out << s.header.csv() << csv_row({"form", "form_rep", "row", "degree", "frobenius_fixed"});
    for (const auto& v : all)
      out << csv_row({std::to_string(v.form), model->form_label(v), std::to_string(v.row), model->degree(v).str(),
                      is_fixed(v) ? "yes" : "no"});
  }
  return kPass;
}

int cmd_shintani(Session& s, std::ostream& out) {
  const auto m = int_param(s.req, "m", std::nullopt);
  if (m < 1) throw ConfigError("--m must be positive");
  const auto model = make_model(s.spec, {s.cfg.tiebreak_override});
  const auto b = shintani_basis(*model, m);
  const auto& base = *model->base_space();
  const bool gram = is_identity_matrix(gram_matrix(b.vectors));
  if (s.json_out) {
    ojson j;
    j["header"] = s.header.json();
    j["m"] = m;
    auto& orbits = j["orbits"] = ojson::array();
    for (std::size_t i = 0; i < base.size(); ++i) orbits.push_back(orbit_label(base, i));
    auto& basis = j["basis"] = ojson::array();
    for (std::size_t k = 0; k < b.labels.size(); ++k)
      basis.push_back({{"form", b.labels[k].form}, {"row", b.labels[k].row}, {"values", values_json(b.vectors[k].values)}});
    j["gram_identity"] = gram;
    out << j.dump(2) << "\n";
  } else {
    out << s.header.csv() << "# gram_identity: " << (gram ? "true" : "false") << "\n";
    std::vector<std::string> head{"form", "row"};
    for (std::size_t i = 0; i < base.size(); ++i) head.push_back(orbit_label(base, i));
    out << csv_row(head);
    for (std::size_t k = 0; k < b.labels.size(); ++k) {
      std::vector<std::string> row{std::to_string(b.labels[k].form), std::to_string(b.labels[k].row)};
      for (const auto& v : b.vectors[k].values) row.push_back(v.str());
      out << csv_row(row);
    }
  }
  return kPass;
}

int cmd_theta(Session& s, std::ostream& out) {
  const auto model = make_model(s.spec, {s.cfg.tiebreak_override});
  const auto base = model->base_space();
  // Theta permutes orbit indicators: Theta(delta_i) = delta_{image[i]}
  std::vector<std::size_t> image(base->size());
  for (std::size_t i = 0; i < base->size(); ++i) {
    ClassFunctionFamily d(base);
    d.values[i] = 1;
    const auto t = model->theta(d);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < t.values.size(); ++k)
      if (!t.values[k].is_zero()) {
        image[i] = k;
        ++hits;
      }
    if (hits != 1 || t.values[image[i]] != Cyclotomic(1)) throw std::logic_error("Theta does not permute orbit indicators");
  }
  const auto chars = level_one_characters(*model);
  const auto eig = theta_eigencheck(*model, chars);
  const auto labels = model->fixed_irreps(1);
  if (s.json_out) {
    ojson j;
    j["header"] = s.header.json();
    auto& perm = j["orbits"] = ojson::array();
    for (std::size_t i = 0; i < base->size(); ++i)
      perm.push_back({{"index", i}, {"label", orbit_label(*base, i)}, {"image", image[i]}});
    auto& ev = j["characters"] = ojson::array();
    for (std::size_t k = 0; k < eig.size(); ++k)
      ev.push_back({{"form", labels[k].form},
                    {"row", labels[k].row},
                    {"eigenvalue", eig[k].eigenvalue ? ojson(eig[k].eigenvalue->str()) : ojson(nullptr)}});
    out << j.dump(2) << "\n";
  } else {
    out << s.header.csv() << csv_row({"index", "label", "image", "image_label"});
    for (std::size_t i = 0; i < base->size(); ++i)
      out << csv_row({std::to_string(i), orbit_label(*base, i), std::to_string(image[i]), orbit_label(*base, image[i])});
  }
  return kPass;
}

int cmd_scan(Session& s, std::ostream& out) {
  const auto m_max = int_param(s.req, "mmax", s.cfg.m_max);
  const auto stride = int_param(s.req, "stride", 0);
  if (stride < 0) throw ConfigError("--stride must be non-negative");
  const auto model = make_model(s.spec, {s.cfg.tiebreak_override});
  const auto res = stabilization_scan(*model, m_max, stride);
  const auto& base = *model->base_space();
  if (s.json_out) {
    ojson j;
    j["header"] = s.header.json();
    j["m0"] = res.m0;
    j["stride"] = stride ? stride : static_cast<std::int64_t>(model->stride());
    auto& orbits = j["orbits"] = ojson::array();
    for (std::size_t i = 0; i < base.size(); ++i) orbits.push_back(orbit_label(base, i));
    auto& almost = j["almost_characters"] = ojson::array();
    for (std::size_t k = 0; k < res.almost.vectors.size(); ++k) {
      const auto& e = res.eigen[k];
      almost.push_back({{"form", res.almost.labels[k].form},
                        {"row", res.almost.labels[k].row},
                        {"eigenvalue", e.eigenvalue ? ojson(e.eigenvalue->str()) : ojson(nullptr)},
                        {"eigenvalue_root", e.eigenvalue ? ojson(root_text(*e.eigenvalue)) : ojson(nullptr)},
                        {"values", values_json(res.almost.vectors[k].values)}});
    }
    auto& certs = j["certificates"] = ojson::array();
    for (const auto& c : res.certificates) {
      auto ratios = ojson::array();
      for (const auto& r : c.ratio) ratios.push_back(root_text(r));
      certs.push_back({{"from", c.from}, {"to", c.to}, {"partner", c.partner}, {"ratio", ratios}});
    }
    out << j.dump(2) << "\n";
  } else {
    out << s.header.csv() << "# m0: " << res.m0 << "\n";
    for (const auto& c : res.certificates) {
      out << "# certificate " << c.from << "~" << c.to << ":";
      for (std::size_t i = 0; i < c.partner.size(); ++i) out << " " << i << "->" << c.partner[i] << "@" << root_text(c.ratio[i]);
      out << "\n";
    }
    std::vector<std::string> head{"form", "row", "eigenvalue"};
    for (std::size_t i = 0; i < base.size(); ++i) head.push_back(orbit_label(base, i));
    out << csv_row(head);
    for (std::size_t k = 0; k < res.almost.vectors.size(); ++k) {
      const auto& e = res.eigen[k];
      std::vector<std::string> row{std::to_string(res.almost.labels[k].form), std::to_string(res.almost.labels[k].row),
                                   e.eigenvalue ? root_text(*e.eigenvalue) : "none"};
      for (const auto& v : res.almost.vectors[k].values) row.push_back(v.str());
      out << csv_row(row);
    }
  }
  return kPass;
}

int cmd_csheaf(Session& s, std::ostream& out) {
  const auto model = make_model(s.spec, {s.cfg.tiebreak_override});
  as_finite(*model, "csheaf");
  auto it = s.req.params.find("sigma");
  const std::string mode = it == s.req.params.end() ? "auto" : it->second;
  const auto& g = s.spec.source.group;
  GroupMap sigma = *s.spec.source.frobenius;
  SpacePtr space = model->base_space();
  if (mode == "identity") {
    sigma = GroupMap::identity(g);
    space = r_space(g, sigma, sigma);
  } else if (mode != "auto") {
    throw ConfigError("--sigma: expected auto or identity, got '" + mode + "'");
  }
  const auto ds = double_simples(g);
  const auto act = sigma_action(ds, sigma);
  std::vector<ClassFunctionFamily> tcs;
  for (int k : act.fixed)
    tcs.push_back(cs_trace_function(cs_trace_data(ds, static_cast<std::size_t>(k), sigma, *act.witness[k],
                                                  {s.cfg.tiebreak_override}),
                                    space));
  auto fixed_pos = [&](std::size_t k) {
    for (std::size_t i = 0; i < act.fixed.size(); ++i)
      if (static_cast<std::size_t>(act.fixed[i]) == k) return static_cast<int>(i);
    return -1;
  };
  if (s.json_out) {
    ojson j;
    j["header"] = s.header.json();
    j["sigma"] = mode;
    auto& rows = j["simples"] = ojson::array();
    for (std::size_t k = 0; k < ds.simples.size(); ++k) {
      const auto& d = ds.simples[k];
      rows.push_back({{"index", k},
                      {"class_rep", g->describe(d.a)},
                      {"rho", d.row},
                      {"dim", d.dim},
                      {"theta", root_text(d.theta)},
                      {"sigma_image", act.perm[k]},
                      {"fixed", fixed_pos(k) >= 0}});
    }
    auto& orbits = j["orbits"] = ojson::array();
    for (std::size_t i = 0; i < space->size(); ++i) orbits.push_back(orbit_label(*space, i));
    auto& fs = j["trace_functions"] = ojson::array();
    for (std::size_t i = 0; i < tcs.size(); ++i) fs.push_back({{"simple", act.fixed[i]}, {"values", values_json(tcs[i].values)}});
    out << j.dump(2) << "\n";
  } else {
    out << s.header.csv() << "# sigma: " << mode << "\n";
    out << csv_row({"index", "class_rep", "rho", "dim", "theta", "sigma_image", "fixed"});
    for (std::size_t k = 0; k < ds.simples.size(); ++k) {
      const auto& d = ds.simples[k];
      out << csv_row({std::to_string(k), g->describe(d.a), std::to_string(d.row), std::to_string(d.dim), root_text(d.theta),
                      std::to_string(act.perm[k]), fixed_pos(k) >= 0 ? "yes" : "no"});
    }
    out << "# trace functions T_C on R_{id,sigma}\n";
    std::vector<std::string> head{"simple"};
    for (std::size_t i = 0; i < space->size(); ++i) head.push_back(orbit_label(*space, i));
    out << csv_row(head);
    for (std::size_t i = 0; i < tcs.size(); ++i) {
      std::vector<std::string> row{std::to_string(act.fixed[i])};
      for (const auto& v : tcs[i].values) row.push_back(v.str());
      out << csv_row(row);
    }
  }
  return kPass;
}

int cmd_verify(Session& s, std::ostream& out) {
  VerifyOptions vo;
  vo.m_max = s.cfg.m_max;
  Verifier v(s.spec.source, vo);
  auto it = s.req.params.find("suite");
  std::vector<std::string> suites;
  if (it == s.req.params.end() || it->second == "all") {
    suites = v.applicable();
  } else {
    suites = {it->second};
  }
  struct Row {
    std::string suite;
    std::string status;
    std::string detail;
  };
  std::vector<Row> rows;
  int code = kPass;
  for (const auto& name : suites) {
    try {
      const auto r = v.run(name);
      rows.push_back({name, r.ok ? "PASS" : "FAIL", r.detail});
      if (!r.ok && code == kPass) code = kCheckFailure;
    } catch (const CapExceeded& e) {
      rows.push_back({name, "FAIL", std::string("cap exceeded: ") + e.what()});
      code = kCapExceeded;
    }
  }
  if (s.json_out) {
    ojson j;
    j["header"] = s.header.json();
    auto& arr = j["results"] = ojson::array();
    for (const auto& r : rows) arr.push_back({{"suite", r.suite}, {"status", r.status}, {"detail", r.detail}});
    j["ok"] = code == kPass;
    out << j.dump(2) << "\n";
  } else {
    out << s.header.csv();
    for (const auto& r : rows) out << r.status << " " << r.suite << (r.detail.empty() ? "" : ": " + r.detail) << "\n";
  }
  return code;
}

void apply_caps(const SessionConfig& cfg) {
  if (cfg.field_cap < 1) throw ConfigError("field cap must be positive");
  if (cfg.order_cap < 1) throw ConfigError("group order cap must be positive");
  if (cfg.cyclotomic_cap < 1) throw ConfigError("cyclotomic order cap must be positive");
  if (cfg.m_max < 1) throw ConfigError("m_max must be positive");
  if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format must be csv or json");
  set_field_degree_cap(cfg.field_cap);
  set_group_order_cap(cfg.order_cap);
  set_cyclotomic_order_cap(cfg.cyclotomic_cap);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read spec file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"classes", "irreps", "shintani", "theta", "scan", "csheaf", "verify"};
  return c;
}

int dispatch(Session& s, std::ostream& out) {
  const auto& c = s.req.command;
  if (c == "classes") return cmd_classes(s, out);
  if (c == "irreps") return cmd_irreps(s, out);
  if (c == "shintani") return cmd_shintani(s, out);
  if (c == "theta") return cmd_theta(s, out);
  if (c == "scan") return cmd_scan(s, out);
  if (c == "csheaf") return cmd_csheaf(s, out);
  return cmd_verify(s, out);
}

// Holds an exclusive flock on <dir>/.lock for the session.
class CacheLock {
 public:
  explicit CacheLock(const std::filesystem::path& dir) {
    fd_ = ::open((dir / ".lock").c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) throw ConfigError("cannot open cache lock in '" + dir.string() + "'");
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw ConfigError("cannot lock cache directory '" + dir.string() + "'");
    }
  }
  ~CacheLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  CacheLock(const CacheLock&) = delete;
  CacheLock& operator=(const CacheLock&) = delete;

 private:
  int fd_ = -1;
};

void write_atomic(const std::filesystem::path& target, const std::string& bytes) {
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) throw ConfigError("cannot write cache file '" + tmp.string() + "'");
    o << bytes;
  }
  std::filesystem::rename(tmp, target);
}

std::string error_report(const Header& h, bool json_out, const std::string& kind, int code, const std::string& msg) {
  if (json_out) {
    ojson j;
    j["header"] = h.json();
    j["error"] = {{"kind", kind}, {"exit_code", code}, {"message", msg}};
    return j.dump(2) + "\n";
  }
  return h.csv() + csv_row({"status", "kind", "message"}) + csv_row({"error", kind, msg});
}

}  // namespace

ParsedSpec parse_spec_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    const auto pos = what.find("; ");
    throw ConfigError("malformed JSON at " + line_col(text, e.byte > 0 ? e.byte - 1 : 0) + ": " +
                      (pos == std::string::npos ? what : what.substr(pos + 2)));
  }
  ParsedSpec out;
  out.content = text;
  if (!doc.is_object()) bad("$", "expected an object");
  const auto& kind = field(doc, "kind", "$");
  const bool connected = kind.is_string() && kind.get<std::string>() == "unitriangular" &&
                         doc.value("mode", std::string("connected")) == "connected";
  if (doc.contains("mode") && (!doc["mode"].is_string() || (doc["mode"] != "connected" && doc["mode"] != "finite")))
    bad("$.mode", "expected connected or finite");
  if (connected) {
    int p = 0, degree = 0;
    const auto tower = parse_field(doc, "$", p, degree);
    const int n = static_cast<int>(get_int(field(doc, "n", "$"), "$.n", 1, 16));
    if (doc.contains("automorphism")) {
      const auto& a = doc["automorphism"];
      const bool plain = a.is_object() && a.size() == 1 && a.contains("frobenius") && a["frobenius"].is_object() &&
                         (!a["frobenius"].contains("power") || a["frobenius"]["power"] == 1);
      if (!plain) bad("$.automorphism", "a connected group takes only the standard Frobenius {\"frobenius\":{}}");
    }
    out.source = ModelSource::connected(n, p, degree);
    out.field_modulus = modulus_text(*tower);
    return out;
  }
  const auto built = build_group(doc, "$");
  if (built.tower) out.field_modulus = modulus_text(*built.tower);
  GroupMap frob = GroupMap::identity(built.group);
  if (doc.contains("automorphism")) {
    frob = parse_automorphism(built, doc["automorphism"], "$.automorphism");
  } else {
    out.warnings.push_back("no automorphism given; using the identity");
  }
  out.source = ModelSource::finite(built.group, std::move(frob));
  return out;
}

ParsedSpec parse_spec(const std::string& path) { return parse_spec_text(read_file(path)); }

std::unique_ptr<DescentModel> make_model(const ParsedSpec& spec, const ModelOptions& opts) { return spec.source.build(opts); }

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) throw std::runtime_error("SHA-256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

int run_command(const SessionConfig& cfg, const CommandRequest& req, std::ostream& out, std::ostream& err) {
  Header header;
  header.add("tool", kVersion);
  header.add("command", req.command);
  header.add("params", params_text(req.params));
  const bool json_out = cfg.format == "json";
  auto fail = [&](const std::string& kind, int code, const std::string& msg) {
    err << "error: " << msg << "\n";
    out << error_report(header, json_out, kind, code, msg);
    return code;
  };
  try {
    apply_caps(cfg);
    if (std::find(commands().begin(), commands().end(), req.command) == commands().end())
      throw ConfigError("unknown command '" + req.command + "'");
    const std::string content = read_file(cfg.spec_path);
    header.add("spec_sha256", sha256_hex(content));
    header.add("caps", "field_degree=" + std::to_string(cfg.field_cap) + " group_order=" + std::to_string(cfg.order_cap) +
                           " cyclotomic_order=" + std::to_string(cfg.cyclotomic_cap) + " m_max=" + std::to_string(cfg.m_max));
    header.add("format", cfg.format);
    header.add("tiebreak", cfg.tiebreak_override ? "last" : "first");

    std::string cache_root = cfg.cache_dir;
    if (cache_root.empty())
      if (const char* env = std::getenv("SHINTANI_CACHE")) cache_root = env;
    std::optional<CacheLock> lock;
    std::filesystem::path entry;
    if (!cache_root.empty()) {
      std::filesystem::create_directories(cache_root);
      lock.emplace(cache_root);
      std::string material;
      for (const auto& [k, v] : header.fields) material += k + "=" + v + "\n";
      entry = std::filesystem::path(cache_root) / sha256_hex(material);
      auto code_file = entry;
      code_file += ".code";
      auto out_file = entry;
      out_file += ".out";
      if (std::filesystem::exists(code_file) && std::filesystem::exists(out_file)) {
        int code = 0;
        std::ifstream(code_file) >> code;
        out << read_file(out_file.string());
        return code;
      }
    }

    Session s{cfg, req, parse_spec_text(content), header, json_out};
    for (const auto& w : s.spec.warnings) err << "warning: " << w << "\n";
    s.header.add("model", make_model(s.spec, {})->describe());
    if (!s.spec.field_modulus.empty()) s.header.add("field_modulus", s.spec.field_modulus);
    header = s.header;
    std::ostringstream buf;
    const int code = dispatch(s, buf);
    if (!entry.empty()) {
      auto out_file = entry;
      out_file += ".out";
      auto code_file = entry;
      code_file += ".code";
      write_atomic(out_file, buf.str());
      write_atomic(code_file, std::to_string(code) + "\n");
    }
    out << buf.str();
    return code;
  } catch (const CapExceeded& e) {
    return fail("cap_exceeded", kCapExceeded, e.what());
  } catch (const ConfigError& e) {
    return fail("config_error", kConfigError, e.what());
  } catch (const ValidationError& e) {
    return fail("validation_error", kConfigError, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail("config_error", kConfigError, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail("config_error", kConfigError, e.what());
  } catch (const std::exception& e) {
    return fail("internal_error", kCheckFailure, e.what());
  }
}

}  // namespace shintani::cli
