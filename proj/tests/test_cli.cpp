#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "shintani/cli.hpp"
#include "shintani/errors.hpp"

using namespace shintani;
using namespace shintani::cli;

namespace {

namespace fs = std::filesystem;

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("shintani_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_spec(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::string& spec, const std::string& command, std::map<std::string, std::string> params = {},
        SessionConfig cfg = {}) {
  cfg.spec_path = spec;
  std::ostringstream out, err;
  const int code = run_command(cfg, {command, std::move(params)}, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

const char* kS3 = R"J({"kind":"permutation","degree":3,"generators":["(1 2)","(1 2 3)"]})J";
const char* kS3ad = R"J({"kind":"permutation","degree":3,"generators":["(1 2)","(1 2 3)"],"automorphism":{"inner":"(1 2)"}})J";
const char* kZ3 = R"J({"kind":"cyclic","n":3,"automorphism":{"images":[2]}})J";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("minimal spec is Z/3 with inversion") {
    const auto s = parse_spec_text(kZ3);
    REQUIRE(!s.source.is_connected());
    CHECK(s.source.group->order() == 3);
    for (Index x = 0; x < 3; ++x) CHECK((*s.source.frobenius)(x) == s.source.group->inv(x));
    CHECK(s.warnings.empty());
  }

  TEST_CASE("missing automorphism defaults to the identity with a warning") {
    const auto s = parse_spec_text(kS3);
    CHECK(s.source.group->order() == 6);
    CHECK(s.source.frobenius->is_identity());
    REQUIRE(s.warnings.size() == 1);
    const auto r = run(write_spec("s3.json", kS3), "classes");
    CHECK(r.err.find("warning: no automorphism") != std::string::npos);
  }

  TEST_CASE("unitriangular spec gives a connected session") {
    const auto s = parse_spec_text(R"J({"kind":"unitriangular","n":3,"field":{"p":2,"degree":1}})J");
    REQUIRE(s.source.is_connected());
    CHECK(s.source.n == 3);
    CHECK(s.source.p == 2);
    CHECK(s.source.f == 1);
    CHECK(!s.field_modulus.empty());
    const auto model = make_model(s, {});
    CHECK(model->mode() == SpaceMode::connected_unipotent);
    // classes of U_3(F_2) = D_4
    CHECK(model->base_space()->size() == 5);
    const auto fin = parse_spec_text(R"J({"kind":"unitriangular","n":3,"field":{"p":2,"degree":2},"mode":"finite",
                                          "automorphism":{"frobenius":{}}})J");
    CHECK(!fin.source.is_connected());
    CHECK(fin.source.group->order() == 64);
    CHECK(fin.source.frobenius->order() == 2);
  }

  TEST_CASE("other group kinds") {
    const auto cay = parse_spec_text(R"J({"kind":"cayley","table":[[1,2,0],[2,0,1],[0,1,2]],"automorphism":{"map":[1,0,2]}})J");
    CHECK(cay.source.group->order() == 3);
    CHECK(!cay.source.frobenius->is_identity());
    const auto dp = parse_spec_text(R"J({"kind":"direct_product","factors":[{"kind":"cyclic","n":2},{"kind":"cyclic","n":2}],
                                         "automorphism":{"images":[[0,1],[1,0]]}})J");
    CHECK(dp.source.group->order() == 4);
    CHECK(dp.source.frobenius->order() == 2);
    // GL_2(F_4) with the entrywise Frobenius
    const auto gl = parse_spec_text(R"J({"kind":"matrix","field":{"p":2,"degree":2},"dim":2,
        "generators":[[[1,1],[0,1]],[[0,1],[1,0]],[[2,0],[0,1]]],"automorphism":{"frobenius":{"power":1}}})J");
    CHECK(gl.source.group->order() == 180);
    CHECK(gl.source.frobenius->order() == 2);
    const auto arr = parse_spec_text(R"J({"kind":"permutation","degree":3,"generators":[[1,0,2],[1,2,0]],
                                          "automorphism":{"images":[[1,0,2],[2,0,1]]}})J");
    // (12) fixed and the 3-cycle inverted: conjugation by (12)
    const auto& g = arr.source.group;
    CHECK(*arr.source.frobenius == GroupMap::inner(g, permutation_index(*g, {1, 0, 2})));
  }

  TEST_CASE("schema errors cite the line or the field") {
    try {
      parse_spec_text("{\"kind\": \"cyclic\",\n  \"n\": 3,,\n}");
      FAIL("no error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    try {
      parse_spec_text(R"J({"kind":"cyclic"})J");
      FAIL("no error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("missing field 'n'") != std::string::npos);
    }
    try {
      parse_spec_text(R"J({"kind":"cyclic","n":3,"automorphism":{"images":[1,2]}})J");
      FAIL("no error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("$.automorphism.images") != std::string::npos);
    }
    try {
      parse_spec_text(R"J({"kind":"permutation","degree":3,"generators":["(1 4)"]})J");
      FAIL("no error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("$.generators[0]") != std::string::npos);
    }
    // not a homomorphism
    CHECK_THROWS_AS(parse_spec_text(R"J({"kind":"cyclic","n":4,"automorphism":{"images":[2]}})J"), ValidationError);
    CHECK_THROWS_AS(parse_spec_text(R"J({"kind":"sporadic"})J"), ConfigError);
  }

  TEST_CASE("classes on S3 with the identity is a 3-row table") {
    const auto r = run(write_spec("s3.json", kS3), "classes");
    CHECK(r.code == kPass);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "index,rep,label,size,stabilizer");
    CHECK(r.out.find("# spec_sha256: " + sha256_hex(kS3)) != std::string::npos);
    SessionConfig js;
    js.format = "json";
    const auto j = run(write_spec("s3.json", kS3), "classes", {}, js);
    CHECK(j.code == kPass);
    CHECK(j.out.find("\"orbit_space\"") != std::string::npos);
  }

  TEST_CASE("verify on the trivial group passes") {
    const auto r = run(write_spec("triv.json", R"J({"kind":"cyclic","n":1})J"), "verify");
    CHECK(r.code == kPass);
    const auto lines = data_lines(r.out);
    CHECK(lines.size() == 12);
    for (const auto& l : lines) CHECK(l.rfind("PASS ", 0) == 0);
  }

  TEST_CASE("verify suites on Z/3 with inversion") {
    const auto spec = write_spec("z3.json", kZ3);
    for (const char* suite : {"ipf", "matching", "tiebreak"}) {
      const auto r = run(spec, "verify", {{"suite", suite}});
      CHECK(r.code == kPass);
      CHECK(data_lines(r.out).size() == 1);
    }
    CHECK(run(spec, "verify", {{"suite", "lang"}}).code == kConfigError);
    CHECK(run(spec, "verify", {{"suite", "nonsense"}}).code == kConfigError);
  }

  TEST_CASE("scan bound errors") {
    const auto spec = write_spec("s3.json", kS3);
    // S3 with the identity needs m0 = 6
    const auto r = run(spec, "scan", {{"mmax", "2"}});
    CHECK(r.code == kCapExceeded);
    CHECK(r.err.find("m_max too small") != std::string::npos);
    CHECK(r.out.find("error,cap_exceeded,") != std::string::npos);
    CHECK(run(spec, "scan", {{"mmax", "1"}}).code == kConfigError);
    CHECK(run(spec, "scan", {{"mmax", "x"}}).code == kConfigError);
    const auto ok = run(spec, "scan", {{"mmax", "12"}});
    CHECK(ok.code == kPass);
    CHECK(ok.out.find("# m0: 6") != std::string::npos);
  }

  TEST_CASE("malformed input exits 2 with a report") {
    SessionConfig js;
    js.format = "json";
    const auto r = run(write_spec("bad.json", "{\"kind\": }"), "classes", {}, js);
    CHECK(r.code == kConfigError);
    CHECK(r.out.find("\"kind\": \"config_error\"") != std::string::npos);
    CHECK(run((scratch() / "absent.json").string(), "classes").code == kConfigError);
    CHECK(run(write_spec("z3.json", kZ3), "csheaf", {{"sigma", "other"}}).code == kConfigError);
    CHECK(run(write_spec("u3.json", R"J({"kind":"unitriangular","n":3,"field":{"p":2}})J"), "csheaf").code == kConfigError);
    SessionConfig small;
    small.order_cap = 4;
    CHECK(run(write_spec("s3.json", kS3), "classes", {}, small).code == kCapExceeded);
  }

  TEST_CASE("cache hits replay stored bytes") {
    const auto spec = write_spec("s3ad.json", kS3ad);
    SessionConfig cfg;
    cfg.cache_dir = (scratch() / "cache").string();
    const auto fresh = run(spec, "shintani", {{"m", "2"}}, cfg);
    REQUIRE(fresh.code == kPass);
    std::vector<fs::path> outs;
    for (const auto& e : fs::directory_iterator(cfg.cache_dir))
      if (e.path().extension() == ".out") outs.push_back(e.path());
    REQUIRE(outs.size() == 1);
    const auto hit = run(spec, "shintani", {{"m", "2"}}, cfg);
    CHECK(sha256_hex(hit.out) == sha256_hex(fresh.out));
    // the hit is served from the file, not recomputed
    std::ofstream(outs[0]) << "marker\n";
    CHECK(run(spec, "shintani", {{"m", "2"}}, cfg).out == "marker\n");
    fs::remove(outs[0]);
    CHECK(run(spec, "shintani", {{"m", "2"}}, cfg).out == fresh.out);
    // different parameters are different entries
    CHECK(run(spec, "shintani", {{"m", "3"}}, cfg).out != fresh.out);
    CHECK(run(spec, "shintani", {{"m", "2"}}).out == fresh.out);
  }

  TEST_CASE("outputs are byte-identical across runs") {
    const auto spec = write_spec("s3ad.json", kS3ad);
    SessionConfig js;
    js.format = "json";
    for (const auto& [cmd, params] : std::vector<std::pair<std::string, std::map<std::string, std::string>>>{
             {"classes", {}}, {"irreps", {{"m", "2"}}}, {"shintani", {{"m", "3"}}}, {"theta", {}}, {"csheaf", {}},
             {"scan", {{"mmax", "48"}}}}) {
      CAPTURE(cmd);
      const auto a = run(spec, cmd, params), b = run(spec, cmd, params);
      CHECK(a.code == kPass);
      CHECK(a.out == b.out);
      const auto c = run(spec, cmd, params, js), d = run(spec, cmd, params, js);
      CHECK(c.code == kPass);
      CHECK(c.out == d.out);
    }
  }

  TEST_CASE("executable exit codes") {
    const std::string exe = SHINTANI_CLI_PATH;
    auto status = [&](const std::string& args) {
      const int s = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
      return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    const auto triv = write_spec("triv.json", R"J({"kind":"cyclic","n":1})J");
    const auto s3 = write_spec("s3.json", kS3);
    CHECK(status("--spec " + triv + " verify") == 0);
    CHECK(status("--spec " + s3 + " classes") == 0);
    CHECK(status("--spec " + s3 + " scan --mmax 2") == 3);
    CHECK(status("--spec " + write_spec("bad.json", "[") + " classes") == 2);
    CHECK(status("--spec " + s3 + " --format json shintani --m 2") == 0);
  }
}
