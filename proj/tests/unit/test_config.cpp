#include <gtest/gtest.h>

#include "heterotomo/config.hpp"
#include "heterotomo/errors.hpp"

using namespace heterotomo;

namespace {

std::string key_path_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key_path();
  }
  return "<no error>";
}

}  // namespace

TEST(Config, Defaults) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c.design.n, 100);
  EXPECT_EQ(c.design.r, 5);
  EXPECT_EQ(c.design.s, 10);
  EXPECT_DOUBLE_EQ(c.design.sigma, 0.1);
  EXPECT_DOUBLE_EQ(c.kernel.gamma, 256.0);
  EXPECT_DOUBLE_EQ(c.solver.nu, 1.0 / 256);
  EXPECT_DOUBLE_EQ(c.solver.eta, 1.0 / 256);
  EXPECT_EQ(c.solver.k_components, 20);
  EXPECT_EQ(c.phantom.build().digest(), PhantomModel::default_model().digest());
}

TEST(Config, KeyValueText) {
  const RunConfig c = parse_config(R"(# comment
[design]
n = 12
r = 3        ; trailing comment
noise_law = power
kappa = 1.5
location_dist = "arcsine"

[solver]
eig_method = lanczos
covariance = false
)");
  EXPECT_EQ(c.design.n, 12);
  EXPECT_EQ(c.design.r, 3);
  EXPECT_EQ(c.design.noise_law, NoiseLaw::power);
  EXPECT_DOUBLE_EQ(c.design.kappa, 1.5);
  EXPECT_EQ(c.design.location_dist, LocationDist::arcsine);
  EXPECT_EQ(c.solver.eig_method, EigMethod::lanczos);
  EXPECT_FALSE(c.solver.covariance);
}

TEST(Config, JsonAndRoundTrip) {
  const RunConfig c = parse_config(R"({"design": {"n": 7, "r": [2, 3, 2, 2, 3, 2, 2]}, "kernel": {"gamma": 64}})");
  EXPECT_EQ(c.design.tilts_of(1), 3);
  EXPECT_DOUBLE_EQ(c.kernel.gamma, 64.0);
  const RunConfig back = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
}

TEST(Config, CustomPhantom) {
  const RunConfig c = parse_config(R"({"phantom": {"preset": "custom",
    "bumps": [{"center": [0, 0], "dispersion": [[0.1, 0], [0, 0.1]]}],
    "mean": [2], "cov": [[0.5]]}})");
  const PhantomModel m = c.phantom.build();
  EXPECT_EQ(m.size(), 1);
  EXPECT_DOUBLE_EQ(m.cov()(0, 0), 0.5);
}

TEST(Config, ErrorsCarryKeyPaths) {
  EXPECT_EQ(key_path_of("[design]\nsigmaa = 0.1\n"), "design.sigmaa");
  EXPECT_EQ(key_path_of("[bogus]\nx = 1\n"), "bogus");
  EXPECT_EQ(key_path_of("[design]\nn = \"many\"\n"), "design.n");
  EXPECT_EQ(key_path_of("[kernel]\ngamma = -1\n"), "kernel.gamma");
  EXPECT_EQ(key_path_of("[solver]\neig_method = qr\n"), "solver.eig_method");
  EXPECT_EQ(key_path_of(R"({"design": {"noise_law": "cubic"}})"), "design.noise_law");
  EXPECT_EQ(key_path_of("[design]\nsigma = -0.5\n"), "design.sigma");
  EXPECT_EQ(key_path_of("n = 3\n"), "n");
}
