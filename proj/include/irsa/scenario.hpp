#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace irsa {

using Position = std::array<double, 3>;

double distance(const Position& a, const Position& b);
double db_to_linear(double db);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

struct SolverTolerances {
  double eps_altern = 1e-4;
  double eps_fixedpoint = 1e-6;
  int max_iters_altern = 50;
  // Beamforming/reflection sweeps inside one outer iteration.
  double eps_inner = 1e-7;
  int max_iters_inner = 500;
  int max_iters_fixedpoint = 100;
  int max_iters_dual = 200;
  double dual_step_a = 0.1;
  double fixedpoint_damping = 0.5;
  // Dual loop stops after this many consecutive unchanged associations.
  int dual_stable_iters = 5;
  double exhaustive_cap = 1e6;
};

// Parametric placement used when explicit positions are not given: tiles on a
// line at `bs_irs_distance` from the BS, spaced `tile_spacing` apart; user k
// sits `user_offset` in front of tile k mod I.
struct LineLayout {
  double bs_irs_distance = 400.0;
  double tile_spacing = 2.5;
  double user_offset = 0.25;
  // When either is positive, users are redrawn for every channel realization:
  // x gains a uniform extra offset in [0, user_drop_x], y a uniform shift in
  // [-user_drop_y, user_drop_y] around the home tile.
  double user_drop_x = 0.0;
  double user_drop_y = 0.0;
};

struct MlOptions {
  std::size_t samples = 10000;
  std::vector<std::size_t> hidden = {10, 10, 10};
  double train_fraction = 0.7;
  double val_fraction = 0.2;
  int max_epochs = 200;
  int max_val_fail = 6;
  double mu_init = 1e-3;
  double mu_max = 1e10;
  int restarts = 5;  // independent initializations; the lowest validation loss is kept
  bool repair_quotas = false;
};

// Raw configuration as written in the config file (dB / dBm at this boundary).
struct ScenarioConfig {
  std::size_t K = 4;
  std::size_t M = 8;
  std::size_t I = 4;
  std::size_t Nx = 0;  // 0: derive from Lx / dx
  std::size_t Ny = 0;
  double wavelength = 0.01;
  double Lx = 0.1;
  double Ly = 0.1;
  double dx = 0.005;
  double dy = 0.005;
  double Pt_dbm = 40.0;
  double Bk_hz = 20e6;
  double N0_dbm_hz = -174.0;
  double NF_db = 6.0;

  // Explicit geometry; empty tile/user lists select `layout`.
  Position bs_position = {0.0, 0.0, 0.0};
  std::vector<Position> tile_positions;
  std::vector<Position> user_positions;
  LineLayout layout;
  // One entry per user, or a single entry applied to all users.
  std::vector<double> direct_blockage_db = {25.0};

  std::uint64_t rng_seed = 1;
  SolverTolerances tol;
  MlOptions ml;
};

// Checked scenario with derived quantities in linear units. Immutable.
struct ValidatedScenario {
  ScenarioConfig config;

  std::size_t K = 0, M = 0, I = 0, Nx = 0, Ny = 0, N = 0;
  double wavelength = 0.0;
  double Lx = 0.0, Ly = 0.0;
  double Pt_watts = 0.0;
  double bandwidth_hz = 0.0;
  double noise_watts = 0.0;  // sigma_k^2, identical for all users

  Position bs;
  std::vector<Position> tiles;
  std::vector<Position> users;
  std::vector<double> direct_shadowing;  // linear power gain per user, <= 1

  std::vector<double> dist_direct;                  // [k]
  std::vector<double> dist_bs_tile;                 // [i]
  std::vector<std::vector<double>> dist_tile_user;  // [i][k]

  std::vector<std::size_t> quotas;  // N_k
  SolverTolerances tol;
};

// Minimum tile count so the reflected free-space loss matches the direct one.
std::size_t required_tiles(double wavelength, double d_bs_tile, double d_tile_user, double d_direct, double Lx,
                           double Ly);

double noise_power(double bandwidth_hz, double n0_watts_per_hz, double noise_figure_linear);

// Minimum tile count per user from its best tile; surplus goes round-robin.
std::vector<std::size_t> derive_quotas(const ValidatedScenario& scn);

ValidatedScenario validate_config(const ScenarioConfig& cfg);

ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& cfg);
ScenarioConfig load_config(const std::string& path);

// Scenario of one channel realization: `scn` itself unless the layout drops
// users at random, in which case the users are placed from `seed`.
ValidatedScenario realization_scenario(const ValidatedScenario& scn, std::uint64_t seed);

// Copy of `cfg` with I tiles; users beyond I are dropped so quotas stay feasible.
ScenarioConfig with_tile_count(ScenarioConfig cfg, std::size_t tiles);
ScenarioConfig with_users_and_tiles(ScenarioConfig cfg, std::size_t users, std::size_t tiles);

}  // namespace irsa
