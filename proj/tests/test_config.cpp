#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "topo1d/config.hpp"
#include "topo1d/errors.hpp"

using namespace topo1d;

namespace {
RunConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is, "test.cfg");
}

const char* kPair = R"(
# two crystals
[options]
polarization = Hpar
delta = 1e-6

[structure A]
layer = 3.8 0 1 0 0.42
layer = 1 0 1 0 0.58
origin = symmetric

[structure B]
label = other
layer = 4.2 0.05 1 0 0.38   # lossy
layer = 1 0 1 0 0.62
origin = symmetric-alt

[stack]
left = A
right = B
periods_left = 5
periods_right = 7

[grid]
kmin = 2.4
kmax = 2.6
step = 0.01
)";
}  // namespace

TEST_CASE("full config") {
  const RunConfig c = parse(kPair);
  CHECK(c.pol == Polarization::Hpar);
  CHECK(c.delta == 1e-6);
  REQUIRE(c.structures.size() == 2);
  CHECK(c.structures[0].cell.label() == "A");
  CHECK(c.structures[1].cell.label() == "other");
  CHECK(is_inversion_symmetric(c.structure("A")));
  CHECK(c.structure("A").layers().front().eps == cplx{3.8});
  CHECK(c.structure("B").layers().front().eps == cplx{1.0});
  CHECK(c.structure("B").layers()[1].eps == cplx{4.2, 0.05});
  const StackConfig st = c.stack_config();
  CHECK(st.periodsA == 5);
  CHECK(st.periodsB == 7);
  const auto grid = c.grid.k0_grid();
  REQUIRE(grid.size() == 21);
  CHECK(grid.front() == doctest::Approx(2.4 * 2.0 * std::numbers::pi));
}

TEST_CASE("defaults without optional sections") {
  const RunConfig c = parse("[structure X]\nlayer = 2 0 1 0 1\n");
  CHECK(c.pol == Polarization::Epar);
  CHECK_FALSE(c.stack);
  CHECK_FALSE(c.phasediag);
  CHECK_THROWS_AS(c.stack_config(), ConfigError);
  CHECK(c.grid.k0_grid().front() > 0.0);
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(parse("[structure A]\n"), ConfigError);
  CHECK_THROWS_AS(parse("[structure A]\nlayer = 2 0 1 0 0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse("[structure A]\nlayer = 2 0 1 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("[structure A]\nlayer = 2 0 1 0 1\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse("[options]\nspeed = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[nonsense]\n"), ConfigError);
  CHECK_THROWS_AS(parse("key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[options]\npolarization = X\n"), ConfigError);
  CHECK_THROWS_AS(parse("[options]\ndelta = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[grid]\nstep = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse("[grid]\nstep = 0.1\nstep = 0.2\n"), ConfigError);
  CHECK_THROWS_AS(parse("[structure A]\nlayer = 2 0 1 0 1\n[stack]\nleft = A\nright = Z\n"), ConfigError);
  CHECK_THROWS_AS(parse("[structure A]\nlayer = 2 0 1 0 0.3\nlayer = 3 0 1 0 0.3\nlayer = 1 0 1 0 0.4\n"
                        "origin = symmetric\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse("[phasediag]\nh1_max = 1.2\n"), ConfigError);
}

TEST_CASE("error messages carry the line number") {
  try {
    parse("[options]\n\nfoo = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("test.cfg:3:") == 0);
  }
}

TEST_CASE("phase diagram section") {
  const RunConfig c = parse("[phasediag]\neps1_steps = 5\nh1_steps = 4\ntarget_min = 1\ntarget_max = 2\n");
  REQUIRE(c.phasediag);
  CHECK(c.phasediag->eps1Steps == 5);
  CHECK(c.phasediag->targetMin == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(c.phasediag->minFraction == 0.1);
}

TEST_CASE("explicit numeric origins") {
  const RunConfig c = parse("[structure A]\nlayer = 3.8 0 1 0 0.42\nlayer = 1 0 1 0 0.58\norigin = 0.21\n");
  CHECK(is_inversion_symmetric(c.structure("A")));
}
