#include "doctest.h"
#include "fixtures.hpp"
#include "lpsim/config.hpp"
#include "lpsim/error.hpp"

using namespace lpsim;

TEST_CASE("config text parses keys, comments and whitespace") {
  const Config cfg = Config::from_text(
      "# header comment\n"
      "n_gen = 50\n"
      "  cell_size_m=2.5   # trailing comment\n"
      "\n"
      "viewshed_weights_file = some dir/weights.txt\n"
      "d_max_m = a=b\n");
  CHECK(cfg.get_int("n_gen", 0) == 50);
  CHECK(cfg.get_double("cell_size_m", 0) == 2.5);
  CHECK(cfg.get_string("viewshed_weights_file", "") == "some dir/weights.txt");
  // Only the first '=' splits; the rest belongs to the value.
  CHECK(cfg.get_string("d_max_m", "") == "a=b");
  CHECK(cfg.has("n_gen"));
  CHECK_FALSE(cfg.has("workers"));
}

TEST_CASE("malformed config lines are rejected") {
  CHECK_THROWS_AS(Config::from_text("novalue\n"), ConfigError);
  CHECK_THROWS_AS(Config::from_text("= 5\n"), ConfigError);
}

TEST_CASE("set overrides file values") {
  Config cfg = Config::from_text("n_gen = 10\n");
  cfg.set("n_gen", "99");
  cfg.set("workers", "4");
  CHECK(cfg.get_int("n_gen", 0) == 99);
  CHECK(cfg.get_int("workers", 0) == 4);
}

TEST_CASE("canonical_text is sorted and newline-terminated") {
  Config cfg;
  cfg.set("workers", "2");
  cfg.set("n_gen", "10");
  cfg.set("cell_size_m", "5");
  CHECK(cfg.canonical_text() == "cell_size_m=5\nn_gen=10\nworkers=2\n");
}

TEST_CASE("typed getters fall back when missing and reject junk") {
  const Config cfg = Config::from_text("n_gen = ten\nseed = -1\n");
  CHECK(cfg.get_double("absent_key_never_set", 3.5) == 3.5);
  CHECK_THROWS_AS(cfg.get_int("n_gen", 0), ConfigError);
  CHECK_THROWS_AS(cfg.get_u64("seed", 0), ConfigError);  // negative is not u64
}

TEST_CASE("validate_keys accepts the registry and rejects strangers") {
  Config good;
  good.set("n_gen", "10");
  good.set("seed", "1");
  good.set("gp_out_cell_size_m", "20");
  good.set("viewshed_weights_file", "w.txt");
  CHECK_NOTHROW(good.validate_keys());

  Config bad;
  bad.set("n_gne", "10");  // typo must be caught, not silently ignored
  CHECK_THROWS_AS(bad.validate_keys(), ConfigError);
}

TEST_CASE("params defaults match the solo-hiker profile") {
  const Params p = Params::from_config(Config{});
  CHECK(p.cell_size_m == 5.0);
  CHECK(p.d_max_m == 10000.0);
  CHECK(p.eye_height_m == 1.6);
  CHECK(p.mix_paths == 42.0);
  CHECK(p.mix_buildings == 30.0);
  CHECK(p.mix_trees == 4.0);
  CHECK(p.mix_water == 1.0);
  CHECK(p.catchment_bound == 8000.0);
  CHECK(p.lambda_max == 5);
  CHECK(p.k_nearest == 3);
  CHECK(p.viewshed_radius_m == 300.0);
  CHECK(p.viewshed_cadence_steps == 10);
  CHECK(p.sigma_xx == 10000.0);
  CHECK(p.sigma_xy == 0.0);
  CHECK(p.sigma_yy == 10000.0);
  CHECK(p.paths_per_start == 200);
  CHECK(p.speed_kmh == 3.87);
  CHECK(p.mobility_shape == 0.8);
  CHECK(p.mobility_loc_h == 0.0);
  CHECK(p.mobility_scale_h == 0.77);
  CHECK(p.m_samples == 820);
  CHECK(p.pdm_cell_size_m == 0.0);
  CHECK(p.gp_iters == 500);
  CHECK(p.gp_lr == 0.05);
  CHECK(p.gp_out_cell_size_m == 20.0);
}

TEST_CASE("params read overrides and validate ranges") {
  Config cfg = Config::from_text("n_gen = 7\ncell_size_m = 2\nmix_trees = 0\n");
  const Params p = Params::from_config(cfg);
  CHECK(p.n_gen == 7);
  CHECK(p.cell_size_m == 2.0);
  CHECK(p.mix_trees == 0.0);

  CHECK_THROWS_AS(Params::from_config(Config::from_text("cell_size_m = 0\n")), ConfigError);
  CHECK_THROWS_AS(Params::from_config(Config::from_text("n_gen = 0\n")), ConfigError);
  CHECK_THROWS_AS(Params::from_config(Config::from_text("m_samples = 0\n")), ConfigError);
  CHECK_THROWS_AS(Params::from_config(Config::from_text("mix_paths = -1\n")), ConfigError);
  CHECK_THROWS_AS(Params::from_config(Config::from_text(
                      "mix_paths = 0\nmix_buildings = 0\nmix_trees = 0\nmix_water = 0\n")),
                  ConfigError);
  CHECK_THROWS_AS(Params::from_config(Config::from_text("speed_kmh = 0\n")), ConfigError);
  CHECK_THROWS_AS(Params::from_config(Config::from_text("k_nearest = 0\n")), ConfigError);
  // Unknown keys fail validation inside from_config too.
  CHECK_THROWS_AS(Params::from_config(Config::from_text("made_up = 1\n")), ConfigError);
}

TEST_CASE("the behavior mix normalizes its weights") {
  Params p;
  const BehaviorMix def = p.mix();
  CHECK(def.paths == doctest::Approx(42.0 / 77.0).epsilon(1e-12));
  CHECK(def.buildings == doctest::Approx(30.0 / 77.0).epsilon(1e-12));
  CHECK(def.trees == doctest::Approx(4.0 / 77.0).epsilon(1e-12));
  CHECK(def.water == doctest::Approx(1.0 / 77.0).epsilon(1e-12));
  CHECK(def.paths + def.buildings + def.trees + def.water == doctest::Approx(1.0).epsilon(1e-12));

  p.mix_paths = 1;
  p.mix_buildings = 1;
  p.mix_trees = 0;
  p.mix_water = 2;
  const BehaviorMix custom = p.mix();
  CHECK(custom.paths == doctest::Approx(0.25));
  CHECK(custom.water == doctest::Approx(0.5));
  CHECK(custom.trees == doctest::Approx(0.0));
}

TEST_CASE("config files load from disk and report missing files") {
  fixtures::TempDir tmp("config");
  fixtures::write_file(tmp.file("c.txt"), "seed = 11\nn_gen = 3\n");
  const Config cfg = Config::from_file(tmp.file("c.txt"));
  CHECK(cfg.get_u64("seed", 0) == 11);
  CHECK_THROWS_AS(Config::from_file(tmp.file("absent.txt")), MissingInputError);
}
