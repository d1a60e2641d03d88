#include "zdyn/cli/config.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace zdyn::cli {
namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.ini");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, FullExample) {
  const auto cfg = parse(R"(
# comment line
[game]
matrix = [[1, 0.5], [-0.2, 2]]   ; trailing comment

[scheme]
preset = custom
p = 1.5, -0.5, 0
q = 2, -2, 0.5

[eta]
sweep_lo = -0.7
sweep_hi = 0.7
sweep_count = 15

[sim]
steps = 1000
init_seed = 9
guard = 1e10
enabled = false

[boundary]
lo = 0.1
hi = 0.9
method = both
width = 1e-5

[output]
dir = results
format = csv+svg
)");
  ASSERT_TRUE(cfg.game.literal.has_value());
  EXPECT_EQ(*cfg.game.literal, (Matrix{{1, 0.5}, {-0.2, 2}}));
  EXPECT_EQ(cfg.scheme.preset, "custom");
  EXPECT_EQ(cfg.scheme.p, (std::vector<double>{1.5, -0.5, 0}));
  EXPECT_EQ(cfg.scheme.q, (std::vector<double>{2, -2, 0.5}));
  EXPECT_EQ(cfg.eta.kind, EtaSpec::Kind::Sweep);
  const auto grid = cfg.eta.grid();
  ASSERT_EQ(grid.size(), 15u);
  EXPECT_EQ(grid.front(), -0.7);
  EXPECT_EQ(grid.back(), 0.7);
  EXPECT_NEAR(grid[7], 0.0, 1e-15);
  EXPECT_EQ(cfg.sim.steps, 1000u);
  EXPECT_EQ(cfg.sim.init_seed, 9u);
  EXPECT_EQ(cfg.sim.guard, 1e10);
  EXPECT_FALSE(cfg.sim.enabled);
  EXPECT_TRUE(cfg.boundary.present);
  EXPECT_EQ(cfg.boundary.method, "both");
  EXPECT_EQ(cfg.boundary.width, 1e-5);
  EXPECT_EQ(cfg.output.dir, "results");
  EXPECT_EQ(cfg.output.format, "csv+svg");
}

TEST(Config, Defaults) {
  const auto cfg = parse("[game]\nmatrix = [[1]]\n[eta]\nvalue = 0.5\n");
  EXPECT_TRUE(cfg.scheme.is_ogda());
  EXPECT_EQ(cfg.scheme.p, (std::vector<double>{1, 0}));
  EXPECT_EQ(cfg.scheme.q, (std::vector<double>{2, -1}));
  EXPECT_EQ(cfg.eta.values, (std::vector<double>{0.5}));
  EXPECT_EQ(cfg.sim.steps, 400u);
  EXPECT_TRUE(cfg.sim.enabled);
  EXPECT_FALSE(cfg.boundary.present);
  EXPECT_EQ(cfg.output.format, "csv");
  const auto init = cfg.sim.initial_states(1, 2);
  EXPECT_EQ(init, (std::vector<JointState>{{1, 1}, {1, 1}}));
}

TEST(Config, GdaPreset) {
  const auto cfg = parse("[game]\nmatrix = [[1]]\n[scheme]\npreset = gda\n");
  EXPECT_EQ(cfg.scheme.p, (std::vector<double>{1}));
  EXPECT_EQ(cfg.scheme.q, (std::vector<double>{1}));
}

TEST(Config, RandomGameIsReproducible) {
  const auto cfg = parse("[game]\nrandom_dim = 4\nseed = 42\ndet_guard = 0.01\n");
  const GameMatrix a = cfg.game.build();
  const GameMatrix b = cfg.game.build();
  EXPECT_EQ(a.matrix(), b.matrix());
  EXPECT_EQ(a.dim(), 4u);
  EXPECT_GE(std::abs(a.determinant()), 0.01);
  // A different seed gives a different matrix.
  const auto other = parse("[game]\nrandom_dim = 4\nseed = 43\n");
  EXPECT_NE(other.game.build().matrix(), a.matrix());
}

TEST(Config, InitialStates) {
  auto cfg = parse("[game]\nmatrix = [[1]]\n[sim]\ninit = 1, 2, 3, 4\n");
  EXPECT_EQ(cfg.sim.initial_states(1, 2), (std::vector<JointState>{{1, 2}, {3, 4}}));
  EXPECT_THROW(cfg.sim.initial_states(1, 3), ConfigError);
  cfg = parse("[game]\nmatrix = [[1]]\n[sim]\ninit_seed = 5\n");
  const auto a = cfg.sim.initial_states(2, 3);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a, cfg.sim.initial_states(2, 3));
  for (const auto& w : a)
    for (double v : w) {
      EXPECT_GE(v, -1.0);
      EXPECT_LT(v, 1.0);
    }
}

TEST(Config, DiagnosticsNameLineAndField) {
  EXPECT_EQ(error_of("[game]\nmatrix = [[1]]\n[eta]\nsweep_lo = 0.5\nsweep_hi = 0.1\nsweep_count = 4\n"),
            "test.ini:5: [eta] sweep_hi: sweep range needs sweep_lo < sweep_hi");
  EXPECT_EQ(error_of("[game]\nmatrix = [[1]]\n[eta]\nsweep_lo = 0.1\nsweep_hi = 0.5\nsweep_count = 1\n"),
            "test.ini:6: [eta] sweep_count: sweep needs at least 2 points");
  EXPECT_EQ(error_of("[game]\nmatrix = [[1]]\n[eta]\nvalue = abc\n"),
            "test.ini:4: [eta] value: expected a number, got 'abc'");
  EXPECT_EQ(error_of("[game]\nmatrix = [[1]]\n[sim]\nstepz = 4\n"), "test.ini:4: [sim] unknown key 'stepz'");
  EXPECT_EQ(error_of("[game]\nmatrix = [[1, 2], [3]]\n"),
            "test.ini:2: [game] matrix: matrix literal: rows have different lengths");
  EXPECT_EQ(error_of("[game]\nmatrix = [[1, 2]]\n"), "test.ini:2: [game] matrix: matrix must be square");
  EXPECT_EQ(error_of("[game]\nmatrix = [[1]]\n[scheme]\npreset = adam\n"),
            "test.ini:4: [scheme] preset: expected gda, ogda or custom, got 'adam'");
  EXPECT_EQ(error_of("[game]\nmatrix [[1]]\n"), "test.ini:2: expected 'key = value'");
  EXPECT_EQ(error_of("[weird]\nx = 1\n"), "test.ini: unknown section [weird]");
}

TEST(Config, StructuralErrors) {
  EXPECT_FALSE(error_of("[eta]\nvalue = 1\n").empty());                                  // no [game]
  EXPECT_FALSE(error_of("[game]\nmatrix = [[1]]\nrandom_dim = 2\n").empty());            // both game kinds
  EXPECT_FALSE(error_of("[game]\nmatrix = [[1]]\nseed = 3\n").empty());                  // seed on a literal
  EXPECT_FALSE(error_of("[game]\nmatrix = [[1]]\n[eta]\nvalue = 1\nlist = 1, 2\n").empty());
  EXPECT_FALSE(error_of("[game]\nmatrix = [[1]]\n[eta]\nsweep_lo = 0.1\n").empty());   // incomplete sweep
  EXPECT_FALSE(error_of("[game]\nmatrix = [[1]]\n[scheme]\npreset = custom\np = 1\n").empty());
  EXPECT_FALSE(error_of("[game]\nmatrix = [[1]]\n[scheme]\npreset = custom\np = 1\nq = 1, 2\n").empty());
  EXPECT_FALSE(error_of("[game]\nmatrix = [[1]]\n[scheme]\np = 1\n").empty());           // p without custom
  EXPECT_FALSE(error_of("[game]\nmatrix = [[1]]\n[game]\n").empty());                   // duplicate section
  EXPECT_FALSE(error_of("[game]\nmatrix = [[1]]\nmatrix = [[2]]\n").empty());           // duplicate key
  EXPECT_FALSE(error_of("[game]\nmatrix = [[1]]\n[boundary]\nlo = 0.5\nhi = 0.1\n").empty());
  EXPECT_FALSE(error_of("[game]\nmatrix = [[1]]\n[boundary]\nlo = 0.1\nhi = 0.5\nmethod = guess\n").empty());
  EXPECT_FALSE(error_of("[game]\nmatrix = [[1]]\n[output]\nformat = png\n").empty());
  EXPECT_FALSE(error_of("[game]\nmatrix = [[1]]\n[sim]\ninit = 1, 1\ninit_seed = 2\n").empty());
  EXPECT_FALSE(error_of("[game]\nmatrix = [[1]]\n[sim]\nguard = -1\n").empty());
  EXPECT_FALSE(error_of("[game]\nmatrix = [[1]]\n[sim]\nenabled = maybe\n").empty());
  EXPECT_FALSE(error_of("[game]\nrandom_dim = 0\nseed = 1\n").empty());
  EXPECT_FALSE(error_of("key = 1\n").empty());                                            // outside a section
}

TEST(Config, RandomGameWithoutSeedFailsOnBuild) {
  const auto cfg = parse("[game]\nrandom_dim = 2\n");
  EXPECT_THROW(cfg.game.build(), ConfigError);
}

TEST(SplitMix, ReferenceOutputs) {
  // Reference values of the published SplitMix64 generator for seed 1234567.
  SplitMix64 rng(1234567);
  EXPECT_EQ(rng.next(), 6457827717110365317ULL);
  EXPECT_EQ(rng.next(), 3203168211198807973ULL);
  EXPECT_EQ(rng.next(), 9817491932198370423ULL);
  EXPECT_EQ(rng.next(), 4593380528125082431ULL);
  EXPECT_EQ(rng.next(), 16408922859458223821ULL);
}

TEST(SplitMix, UniformRange) {
  SplitMix64 rng(0);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace zdyn::cli
