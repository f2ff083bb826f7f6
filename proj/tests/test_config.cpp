#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "congesta/config.hpp"

using namespace congesta;

namespace {

const std::string kBase = R"([domain]
dim = 1
[boundary]
u_left = 0.5
u_right = 1
rho_B = 0.8
[initial]
rho = uniform
rho_mean = 0.4
[potential]
mu0 = 1
eta0 = 0.1
q = 2
[scheme]
resolution = 32
[congestion]
alpha = 10
)";

RunConfig parse(const std::string& extra) { return parse_run_config_text(kBase + extra, "t.cfg"); }

std::string message(const std::string& text) {
  try {
    parse_run_config_text(text, "t.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults and hash") {
  const RunConfig c = parse("");
  CHECK(c.dim == 1);
  CHECK(c.scheme.snapshot_every == 1);
  CHECK(c.scheme.modes == 4);
  CHECK(c.limits.block == 4);
  CHECK(c.seed == 0);
  CHECK(c.hash == fnv1a64(kBase));
  CHECK(c.hash != parse("# comment\n").hash);
  // FNV-1a 64 reference values
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
}

TEST_CASE("sections, ladders and sweeps") {
  const RunConfig c = parse("[sweep]\nalpha = 10, 40\ndt = 1e-3, 2e-3\nworkers = 2\n[output]\nseed = 9\n");
  REQUIRE(c.sweep.axes.size() == 2);
  CHECK(c.sweep.axes[0].first == "alpha");
  CHECK(c.sweep.workers == 2);
  CHECK(c.seed == 9);

  std::string lad = kBase;
  lad.replace(lad.find("alpha = 10"), 10, "ladder = 10, 40, 160");
  const RunConfig l = parse_run_config_text(lad, "t.cfg");
  CHECK(l.congestion.ladder == std::vector<double>{10, 40, 160});
  CHECK(l.congestion.alpha == 10);
}

TEST_CASE("errors are line anchored") {
  CHECK(message(kBase + "[scheme]\n").find("duplicate section") != std::string::npos);
  CHECK(message(kBase + "[limits]\nblock = 5\n").find("t.cfg:19") != std::string::npos);
  CHECK(message(kBase + "[sweep]\nalpha = 40, 10\n").find("t.cfg:19") != std::string::npos);
  CHECK(message(kBase + "[extra]\n").find("t.cfg:18: unknown section [extra]") != std::string::npos);
  std::string typo = kBase;
  typo.replace(typo.find("eta0"), 4, "eta9");
  CHECK(message(typo).find("t.cfg:12") != std::string::npos);
  std::string noq = kBase;
  noq.erase(noq.find("q = 2\n"), 6);
  CHECK(message(noq).find("'q'") != std::string::npos);
  std::string lad = kBase;
  lad.replace(lad.find("alpha = 10"), 10, "ladder = 40, 10");
  CHECK(message(lad).find("ascending") != std::string::npos);
  CHECK(message(kBase + "[potential]\n").size() > 0);
}

TEST_CASE("q < 2 without mollification needs the regularizing coefficients in 2D") {
  const std::string two = R"([domain]
dim = 2
[boundary]
rho_B = 1
[initial]
rho = uniform
[potential]
mu0 = 1
q = 1.5
[scheme]
resolution = 8
[congestion]
alpha = 10
)";
  CHECK(message(two).find("mu1") != std::string::npos);
  std::string ok = two;
  ok.replace(ok.find("q = 1.5"), 7, "q = 1.5\ndelta = 1e-2");
  CHECK(message(ok).empty());
}
