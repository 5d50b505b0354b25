#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "runner/config.hpp"
#include "runner/runner.hpp"
#include "symplattice/error.hpp"

using namespace symplattice;
using namespace symplattice::cli;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_with(const std::string& command, const std::vector<std::pair<std::string, std::string>>& kv) {
  Config cfg;
  for (const auto& [k, v] : kv) cfg.set(k, v);
  std::ostringstream out, err;
  const int code = run(command, cfg, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config text") {
  std::istringstream in("# comment\nd = 4\n  sampler.kind=kan  # trailing\n\nN_list = 1,4,16\n");
  Config cfg;
  parse_config_text(in, cfg);
  CHECK(cfg.get_int("d", 0) == 4);
  CHECK(cfg.get_string("sampler.kind", "") == "kan");
  CHECK(cfg.get_int_list("N_list", {}) == std::vector<int>{1, 4, 16});
  CHECK(cfg.get_uint("samples", 1000000) == 1000000);
  CHECK(cfg.resolved().at("samples") == 1000000);

  Config sci;
  sci.set("mc.samples", "1e6");
  CHECK(sci.get_uint("mc.samples", 0) == 1000000);
  sci.set("bad", "1.5");
  CHECK_THROWS_AS(sci.get_uint("bad", 0), ValidationError);

  std::istringstream dup("d = 2\nd = 3\n");
  Config c2;
  CHECK_THROWS_AS(parse_config_text(dup, c2), ValidationError);
  std::istringstream junk("just words\n");
  CHECK_THROWS_AS(parse_config_text(junk, c2), ValidationError);

  Config c3;
  c3.set("typo", "1");
  CHECK_THROWS_AS(c3.reject_unused(), ValidationError);
}

TEST_CASE("exit codes name the offending key") {
  const Result no_seed = run_with("clt", {{"d", "2"}});
  CHECK(no_seed.code == kExitValidation);
  CHECK(no_seed.err.find("seed") != std::string::npos);

  const Result unknown = run_with("cover-check", {{"gama", "2"}});
  CHECK(unknown.code == kExitValidation);
  CHECK(unknown.err.find("gama") != std::string::npos);

  const Result fmt = run_with("cover-check", {{"format", "xml"}});
  CHECK(fmt.code == kExitValidation);
  CHECK(fmt.err.find("format") != std::string::npos);

  const Result range = run_with("cover-check", {{"r", "9"}});
  CHECK(range.code == kExitValidation);

  CHECK(run_with("frobnicate", {}).code == kExitValidation);
  CHECK(run_with("cover-check", {{"threads", "-1"}}).code == kExitValidation);
}

TEST_CASE("cover-check report") {
  const Result r = run_with("cover-check", {{"r", "3"}, {"gamma", "2"}, {"grid", "10"}});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("command") == "cover-check");
  CHECK(j.at("covered") == true);
  CHECK(j.at("config").at("grid") == 10);
}

TEST_CASE("reports are byte-identical for a fixed seed and metadata is separate") {
  const auto dir = std::filesystem::temp_directory_path() / "symplattice_cli_test";
  std::filesystem::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> base = {
      {"d", "2"}, {"seed", "17"}, {"samples", "5"}, {"sampler.burn_in", "50"}, {"format", "json"}};
  auto a = base, b = base, c = base;
  a.emplace_back("output", (dir / "a.json").string());
  b.emplace_back("output", (dir / "b.json").string());
  b.emplace_back("threads", "1");
  c.emplace_back("output", (dir / "c.json").string());
  c[1].second = "18";
  REQUIRE(run_with("sample", a).code == kExitOk);
  REQUIRE(run_with("sample", b).code == kExitOk);
  REQUIRE(run_with("sample", c).code == kExitOk);
  const std::string ra = slurp(dir / "a.json"), rb = slurp(dir / "b.json"), rc = slurp(dir / "c.json");
  CHECK_FALSE(ra.empty());
  // output path and thread count are run metadata, not part of the report
  CHECK(ra == rb);
  CHECK(ra != rc);

  REQUIRE(run_with("sample", a).code == kExitOk);
  CHECK(slurp(dir / "a.json") == ra);

  const auto meta = nlohmann::json::parse(slurp(dir / "a.json.meta.json"));
  CHECK(meta.contains("elapsed_seconds"));
  CHECK(meta.contains("threads"));
  std::filesystem::remove_all(dir);
}
