#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>

#include "barostoch/config.hpp"

using namespace barostoch;

namespace {

const std::string kData = BAROSTOCH_TEST_DATA;

const char* kMinimal = R"([grid]
n_cells = 32
length = 2

[pressure]
gamma = 2
coeff = 1

[viscosity]
mu_shear = 0.01

[initial]
profile = uniform
rho = 1.5

[run]
T = 0.5
)";

bool mentions(const ConfigError& e, const std::string& key) {
  return std::any_of(e.problems().begin(), e.problems().end(),
                     [&](const std::string& p) { return p.rfind(key, 0) == 0; });
}

ConfigError error_of(const std::string& text, bool low = false) {
  try {
    parse_config_string(text, low);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "expected ConfigError";
  return ConfigError({});
}

}  // namespace

TEST(Config, ParsesSampleFile) {
  const auto c = load_config(kData + "/small.ini");
  EXPECT_EQ(c.n_cells, 64);
  EXPECT_EQ(c.gamma, 2.0);
  EXPECT_EQ(c.eta_bulk, 0.001);
  EXPECT_EQ(c.modes, 3);
  ASSERT_EQ(c.layers.size(), 1u);
  EXPECT_EQ(c.layers[0].sizes, (std::vector<double>{0.3, -0.3}));
  EXPECT_EQ(c.layers[0].radius, 0.1);
  EXPECT_EQ(c.profile, "gaussian-bump");
  EXPECT_EQ(c.horizon, 0.25);
  EXPECT_EQ(c.outputs(), (std::vector<double>{0.125, 0.25}));
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.ensemble, 4);
}

TEST(Config, DefaultsAndOutputs) {
  const auto c = parse_config_string(kMinimal);
  EXPECT_EQ(c.modes, 1);
  EXPECT_EQ(c.cfl, 0.5);
  EXPECT_EQ(c.outputs(), (std::vector<double>{0.5}));
  EXPECT_TRUE(c.layers.empty());
}

TEST(Config, MissingGammaNamesKey) {
  try {
    load_config(kData + "/missing_gamma.ini");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_TRUE(mentions(e, "pressure.gamma"));
    EXPECT_NE(std::string(e.what()).find("pressure.gamma"), std::string::npos);
  }
}

TEST(Config, ReportsEveryProblem) {
  std::string text = kMinimal;
  text.replace(text.find("n_cells = 32"), 12, "n_cells = 2");
  text.replace(text.find("mu_shear = 0.01"), 15, "mu_shear = -1");
  text += "cfl = 3\noutput_times = 0.4,0.2\n";
  const auto e = error_of(text);
  EXPECT_TRUE(mentions(e, "grid.n_cells"));
  EXPECT_TRUE(mentions(e, "viscosity.mu_shear"));
  EXPECT_TRUE(mentions(e, "run.cfl"));
  EXPECT_TRUE(mentions(e, "run.output_times"));
  EXPECT_GE(e.problems().size(), 4u);
}

TEST(Config, RejectsUnknownKeysAndSections) {
  EXPECT_TRUE(mentions(error_of(std::string(kMinimal) + "colour = red\n"), "run.colour"));
  EXPECT_TRUE(mentions(error_of(std::string(kMinimal) + "[extra]\nx = 1\n"), "extra"));
  EXPECT_TRUE(mentions(error_of(std::string(kMinimal) + "cfl = fast\n"), "run.cfl"));
}

TEST(Config, LayerKeys) {
  const std::string good = std::string(kMinimal) +
                           "[noise]\nlayer0_sizes = 0.5\nlayer0_masses = 2\n"
                           "layer0_radius = 0.25\nlayer0_compensated = true\n";
  const auto c = parse_config_string(good);
  ASSERT_EQ(c.layers.size(), 1u);
  EXPECT_TRUE(c.layers[0].compensated);
  EXPECT_NO_THROW(c.levy_spec().validate());
  const auto e = error_of(std::string(kMinimal) +
                          "[noise]\nlayer0_sizes = 0.5,1\nlayer0_masses = 2\nlayer0_radius = 1\n");
  EXPECT_TRUE(mentions(e, "noise.layer0_masses"));
}

TEST(Config, LowGammaNeedsOverride) {
  std::string text = kMinimal;
  text.replace(text.find("gamma = 2"), 9, "gamma = 1.4");
  EXPECT_TRUE(mentions(error_of(text), "pressure.gamma"));
  const auto c = parse_config_string(text, true);
  EXPECT_EQ(c.gamma, 1.4);
  EXPECT_NO_THROW(c.pressure_law());
  text.replace(text.find("gamma = 1.4"), 11, "gamma = 1.0");
  EXPECT_TRUE(mentions(error_of(text, true), "pressure.gamma"));
}

TEST(Config, SerializeRoundTrips) {
  auto c = load_config(kData + "/small.ini");
  c.widths = {0.1, 0.05};
  c.jump_time = 0.1;
  c.u_amp = 0.1 + 0.2;  // not exactly representable in short form
  const auto back = parse_config_string(serialize(c));
  EXPECT_EQ(back, c);
  EXPECT_EQ(serialize(back), serialize(c));
}

TEST(Config, DigestIgnoresSeedOnly) {
  auto a = load_config(kData + "/small.ini");
  auto b = a;
  b.seed = 12345;
  EXPECT_EQ(config_digest(a), config_digest(b));
  b.mu_shear *= 2.0;
  EXPECT_NE(config_digest(a), config_digest(b));
  EXPECT_EQ(hex_digest(0x1234).size(), 16u);
  EXPECT_EQ(hex_digest(0x1234), "0000000000001234");
}

TEST(Config, InitialDataUniform) {
  const auto c = parse_config_string(kMinimal);
  const auto d = make_initial_data(c);
  ASSERT_EQ(d.rho.size(), 32u);
  EXPECT_NEAR(d.mass, 1.5 * 2.0, 1e-14);
  // P(1.5) = 1.5^2 - 1.5 = 0.75 per unit length, u = 0.
  EXPECT_NEAR(d.energy, 0.75 * 2.0, 1e-13);
}

TEST(Config, InitialDataBumpAndRiemann) {
  auto c = parse_config_string(kMinimal);
  c.profile = "gaussian-bump";
  c.rho = 1.0;
  c.amplitude = 0.5;
  c.width = 0.05;
  const auto d = make_initial_data(c);
  // Bump integral 0.5 * width * L * sqrt(2 pi); tails beyond [0, L] negligible.
  EXPECT_NEAR(d.mass, 2.0 + 0.5 * 0.05 * 2.0 * std::sqrt(2.0 * std::numbers::pi), 1e-6);
  c.profile = "riemann";
  const auto r = make_initial_data(c);
  EXPECT_NEAR(r.mass, 0.5 * 2.0 * (1.0 + 0.125), 1e-14);
  for (const double m : r.m) EXPECT_EQ(m, 0.0);
}
