#include "doctest.h"
#include "helpers.hpp"

#include <string>

#include "wavezar/config.hpp"

using namespace wavezar;

namespace {

const std::string kMinimal = R"(
[domain]
dimension = 1
x = 0 1

[boundary]
left = dirichlet
right = neumann

[grid]
nodes = 51
)";

std::string with(const std::string& extra) { return kMinimal + extra; }

void expect_error(const std::string& text, const std::string& fragment) {
  try {
    parse_config_text(text);
    FAIL("accepted: " << text);
  } catch (const ConfigError& e) {
    INFO(e.what());
    CHECK(std::string(e.what()).find(fragment) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("minimal config takes the documented defaults") {
  const ExperimentConfig c = parse_config_text(kMinimal);
  CHECK(c.safety == 0.9);
  CHECK(c.stride == 10);
  CHECK(c.seed == 42);
  CHECK_FALSE(c.dt.has_value());
  CHECK(c.t_final == 10.0);
  CHECK(c.nonlinearity == "zero");
  CHECK_FALSE(c.truncation_level.has_value());
  CHECK(c.ensemble == 20);
  CHECK(c.k_list == std::vector<int>{1, 2, 4, 8, 16});
  CHECK(c.damping.region.size() == 1);
  CHECK(c.nodes == std::vector<int>{51});
}

TEST_CASE("uniqueness range violation names the nonlinearity validator") {
  expect_error(with("[nonlinearity]\nname = cubic\nmode = uniqueness\ndimension = 3\n"), "nonlinearity.validate");
  CHECK_NOTHROW(parse_config_text(with("[nonlinearity]\nname = cubic\nmode = uniqueness\n")));
}

TEST_CASE("region outside the domain is reported by sample_damping") {
  expect_error(with("[damping]\nregion = 0.8 1.3\n"), "sample_damping");
}

TEST_CASE("parse errors") {
  expect_error(with("[grid]\nspacing = 3\n"), "unknown key");
  expect_error(with("[mystery]\nx = 1\n"), "unknown section");
  expect_error(with("[time]\nt_final = ten\n"), "expected a number");
  expect_error(with("[time]\nstride = 2.5\n"), "expected an integer");
  expect_error(with("[time]\ndt = 0.5\n"), "CFL");
  expect_error(with("[nonlinearity]\nk = 0\n"), "k must be >= 1");
  expect_error(with("[analysis]\nk_list = 4 2\n"), "ascend");
  expect_error(with("[damping]\nprofile = gaussian\n"), "indicator or smooth-bump");
  expect_error(with("[damping]\na0 = 0\n"), "sample_damping");
  expect_error(with("[domain]\ndiagnostic = maybe\n"), "true or false");
  expect_error("[domain]\ndimension = 1\n", "domain.x");
  expect_error(with("[grid]\nnodes = 2\n"), "duplicate");
  expect_error("[domain]\ndimension = 1\nx = 0 1\n[boundary]\nleft = dirichlet\nright = dirichlet\n[grid]\nnodes = 9\n",
               "build_mesh");
  expect_error("[domain]\ndimension = 1\nx = 0 1\n[boundary]\nleft = robin\nright = neumann\n[grid]\nnodes = 9\n",
               "unknown condition");
  expect_error("dimension = 1\n", "outside any section");
  expect_error(with("[analysis]\nray_origins = 4\n"), "control_time");
}

TEST_CASE("2D config with split faces, frame region and overrides") {
  const std::string text = R"(
[domain]
dimension = 2
x = 0 2
y = 0 1
[boundary]
left = dirichlet 0 0.5, neumann 0.5 1
right = neumann
bottom = dirichlet
top = neumann
[damping]
region = frame 0.1
a0 = 0.5
amplitude = 2
profile = smooth-bump
margin = 0.05
[nonlinearity]
name = power
p = 2.5
k = 3
[grid]
nodes = 21 11
[time]
dt = 0.01
stride = 4
[analysis]
seed = 18446744073709551615
fit_start = 1.5
fit_end = 9
k_list = 1 3
)";
  const ExperimentConfig c = parse_config_text(text);
  CHECK(c.domain.partition.segments().size() == 5);
  CHECK(c.damping.region.size() == 4);
  CHECK(c.damping.region[1].axes[0].lo == doctest::Approx(1.9));
  CHECK(c.damping.profile == DampingProfile::SmoothBump);
  CHECK(c.truncation_level == 3);
  CHECK(c.p == 2.5);
  CHECK(*c.dt == 0.01);
  CHECK(c.seed == 18446744073709551615ULL);
  CHECK(*c.fit_start == 1.5);
  CHECK(c.truncated_nonlinearity()->level() == 3);
}

TEST_CASE("render then parse reproduces the config") {
  for (const char* rel : {"configs/reference_1d.ini", "configs/pipeline_1d.ini", "configs/strip_2d.ini",
                          "configs/frame_2d.ini"}) {
    const ExperimentConfig a = th::load(rel);
    const std::string text = render_config(a);
    const ExperimentConfig b = parse_config_text(text);
    CHECK(render_config(b) == text);
  }
}

TEST_CASE("render covers split faces and multi-box regions") {
  const std::string text = R"(
[domain]
dimension = 2
x = 0 1
y = 0 1
[boundary]
left = dirichlet 0 0.25, neumann 0.25 1
right = neumann
bottom = dirichlet
top = dirichlet
[damping]
region = 0 0.2 0 1; 0.7 1 0.1 0.3
[grid]
nodes = 9 9
[time]
dt = 0.05
)";
  const ExperimentConfig a = parse_config_text(text);
  const std::string r = render_config(a);
  CHECK(r.find("left = dirichlet 0 0.25, neumann 0.25 1") != std::string::npos);
  CHECK(r.find("region = 0 0.2 0 1; 0.7 1 0.1 0.3") != std::string::npos);
  CHECK(render_config(parse_config_text(r)) == r);
}

TEST_CASE("parse_config reads files") {
  CHECK_THROWS_AS(parse_config("/nonexistent/wavezar.ini"), ConfigError);
  CHECK(th::load("configs/reference_1d.ini").nodes == std::vector<int>{201});
}
