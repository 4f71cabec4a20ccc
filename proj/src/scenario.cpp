#include "irsa/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "irsa/error.hpp"
#include "irsa/rng.hpp"

namespace irsa {

double distance(const Position& a, const Position& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

std::size_t required_tiles(double wavelength, double d_bs_tile, double d_tile_user, double d_direct, double Lx,
                           double Ly) {
  const std::array<std::pair<const char*, double>, 6> args = {{{"wavelength", wavelength},
                                                                {"d_bs_tile", d_bs_tile},
                                                                {"d_tile_user", d_tile_user},
                                                                {"d_direct", d_direct},
                                                                {"Lx", Lx},
                                                                {"Ly", Ly}}};
  for (const auto& [name, v] : args)
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameter(name, "must be positive");
  const double ratio = wavelength * d_bs_tile * d_tile_user / (Lx * Ly * d_direct);
  // Absorb round-off so exact integer ratios are not pushed up by one.
  const double tiles = std::ceil(ratio * (1.0 - 1e-12));
  return std::max<std::size_t>(1, static_cast<std::size_t>(tiles));
}

double noise_power(double bandwidth_hz, double n0_watts_per_hz, double noise_figure_linear) {
  if (!(bandwidth_hz > 0.0)) throw InvalidParameter("Bk_hz", "must be positive");
  if (!(n0_watts_per_hz > 0.0)) throw InvalidParameter("N0", "must be positive");
  if (!(noise_figure_linear > 0.0)) throw InvalidParameter("NF", "must be positive");
  return bandwidth_hz * n0_watts_per_hz * noise_figure_linear;
}

std::vector<std::size_t> derive_quotas(const ValidatedScenario& scn) {
  std::vector<std::size_t> quotas(scn.K, 1);
  for (std::size_t k = 0; k < scn.K; ++k) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < scn.I; ++i)
      best = std::min(best, required_tiles(scn.wavelength, scn.dist_bs_tile[i], scn.dist_tile_user[i][k],
                                           scn.dist_direct[k], scn.Lx, scn.Ly));
    quotas[k] = best;
  }
  std::size_t total = 0;
  for (auto q : quotas) total += q;
  if (total > scn.I)
    throw InfeasibleQuota("tile quotas need " + std::to_string(total) + " tiles but only " + std::to_string(scn.I) +
                          " exist (deficit " + std::to_string(total - scn.I) + ")");
  for (std::size_t k = 0; total < scn.I; k = (k + 1) % scn.K, ++total) ++quotas[k];
  return quotas;
}

namespace {

void require_positive(const char* field, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameter(field, "must be positive and finite");
}

void require_count(const char* field, std::size_t v) {
  if (v < 1) throw InvalidParameter(field, "must be at least 1");
}

std::size_t derive_units(const char* axis, std::size_t given, double length, double spacing) {
  const double ratio = length / spacing;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-6 * std::max(1.0, ratio) || rounded < 1.0)
    throw InvalidParameter("geometry", std::string(axis) + " tile length is not a whole number of unit spacings");
  const auto units = static_cast<std::size_t>(rounded);
  if (given != 0 && given != units)
    throw InvalidParameter("geometry", std::string("N") + axis + " = " + std::to_string(given) + " but L" + axis +
                                           "/d" + axis + " = " + std::to_string(units));
  return units;
}

}  // namespace

ValidatedScenario validate_config(const ScenarioConfig& cfg) {
  require_count("K", cfg.K);
  require_count("M", cfg.M);
  require_count("I", cfg.I);
  require_positive("wavelength", cfg.wavelength);
  require_positive("Lx", cfg.Lx);
  require_positive("Ly", cfg.Ly);
  require_positive("dx", cfg.dx);
  require_positive("dy", cfg.dy);
  require_positive("Bk_hz", cfg.Bk_hz);
  if (!std::isfinite(cfg.Pt_dbm)) throw InvalidParameter("Pt_dbm", "must be finite");
  if (!std::isfinite(cfg.N0_dbm_hz)) throw InvalidParameter("N0_dbm_hz", "must be finite");
  if (!std::isfinite(cfg.NF_db)) throw InvalidParameter("NF_db", "must be finite");

  const auto& t = cfg.tol;
  require_positive("eps_altern", t.eps_altern);
  require_positive("eps_fixedpoint", t.eps_fixedpoint);
  require_positive("eps_inner", t.eps_inner);
  require_positive("dual_step_a", t.dual_step_a);
  if (!(t.fixedpoint_damping > 0.0 && t.fixedpoint_damping <= 1.0))
    throw InvalidParameter("fixedpoint_damping", "must lie in (0, 1]");
  if (t.max_iters_altern < 1) throw InvalidParameter("max_iters_altern", "must be at least 1");
  if (t.max_iters_inner < 1) throw InvalidParameter("max_iters_inner", "must be at least 1");
  if (t.max_iters_fixedpoint < 1) throw InvalidParameter("max_iters_fixedpoint", "must be at least 1");
  if (t.max_iters_dual < 1) throw InvalidParameter("max_iters_dual", "must be at least 1");
  if (t.dual_stable_iters < 1) throw InvalidParameter("dual_stable_iters", "must be at least 1");

  ValidatedScenario s;
  s.config = cfg;
  s.K = cfg.K;
  s.M = cfg.M;
  s.I = cfg.I;
  s.Nx = derive_units("x", cfg.Nx, cfg.Lx, cfg.dx);
  s.Ny = derive_units("y", cfg.Ny, cfg.Ly, cfg.dy);
  s.N = s.Nx * s.Ny;
  s.wavelength = cfg.wavelength;
  s.Lx = cfg.Lx;
  s.Ly = cfg.Ly;
  s.Pt_watts = dbm_to_watts(cfg.Pt_dbm);
  s.bandwidth_hz = cfg.Bk_hz;
  s.noise_watts = noise_power(cfg.Bk_hz, dbm_to_watts(cfg.N0_dbm_hz), db_to_linear(cfg.NF_db));
  s.tol = cfg.tol;

  s.bs = cfg.bs_position;
  if (cfg.tile_positions.empty()) {
    require_positive("layout.bs_irs_distance", cfg.layout.bs_irs_distance);
    require_positive("layout.user_offset", cfg.layout.user_offset);
    if (!(cfg.layout.user_drop_x >= 0.0)) throw InvalidParameter("layout.user_drop_x", "must be non-negative");
    if (!(cfg.layout.user_drop_y >= 0.0)) throw InvalidParameter("layout.user_drop_y", "must be non-negative");
    if (!(cfg.layout.tile_spacing >= 0.0)) throw InvalidParameter("layout.tile_spacing", "must be non-negative");
    const double centre = 0.5 * static_cast<double>(s.I - 1);
    for (std::size_t i = 0; i < s.I; ++i)
      s.tiles.push_back({s.bs[0] + cfg.layout.bs_irs_distance,
                         s.bs[1] + (static_cast<double>(i) - centre) * cfg.layout.tile_spacing, s.bs[2]});
  } else {
    if (cfg.tile_positions.size() != s.I)
      throw InvalidParameter("tile_positions", "expected " + std::to_string(s.I) + " entries");
    s.tiles = cfg.tile_positions;
  }
  if (cfg.user_positions.empty()) {
    if (cfg.tile_positions.empty()) {
      for (std::size_t k = 0; k < s.K; ++k) {
        auto p = s.tiles[k % s.I];
        p[0] += cfg.layout.user_offset;
        s.users.push_back(p);
      }
    } else {
      throw InvalidParameter("user_positions", "required when tile_positions are given");
    }
  } else {
    if (cfg.user_positions.size() != s.K)
      throw InvalidParameter("user_positions", "expected " + std::to_string(s.K) + " entries");
    s.users = cfg.user_positions;
  }

  if (cfg.direct_blockage_db.size() != 1 && cfg.direct_blockage_db.size() != s.K)
    throw InvalidParameter("direct_blockage_db", "expected 1 or K entries");
  for (std::size_t k = 0; k < s.K; ++k) {
    const double db = cfg.direct_blockage_db.size() == 1 ? cfg.direct_blockage_db[0] : cfg.direct_blockage_db[k];
    if (!(db >= 0.0) || !std::isfinite(db)) throw InvalidParameter("direct_blockage_db", "must be finite and >= 0");
    s.direct_shadowing.push_back(db_to_linear(-db));
  }

  for (std::size_t k = 0; k < s.K; ++k) {
    s.dist_direct.push_back(distance(s.bs, s.users[k]));
    if (!(s.dist_direct[k] > 0.0)) throw InvalidParameter("user_positions", "user coincides with the BS");
  }
  for (std::size_t i = 0; i < s.I; ++i) {
    s.dist_bs_tile.push_back(distance(s.bs, s.tiles[i]));
    if (!(s.dist_bs_tile[i] > 0.0)) throw InvalidParameter("tile_positions", "tile coincides with the BS");
    std::vector<double> row;
    for (std::size_t k = 0; k < s.K; ++k) {
      row.push_back(distance(s.tiles[i], s.users[k]));
      if (!(row.back() > 0.0)) throw InvalidParameter("user_positions", "user coincides with a tile");
    }
    s.dist_tile_user.push_back(std::move(row));
  }

  s.quotas = derive_quotas(s);
  return s;
}

namespace {

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter(key, e.what());
  }
}

}  // namespace

ScenarioConfig config_from_json(const nlohmann::json& j) {
  ScenarioConfig c;
  if (!j.is_object()) throw InvalidParameter("config", "top level must be an object");
  for (const auto& [key, _] : j.items())
    if (key != "system" && key != "geometry" && key != "solver" && key != "ml")
      throw InvalidParameter(key, "unknown section");

  const auto sys = j.value("system", nlohmann::json::object());
  read_opt(sys, "K", c.K);
  read_opt(sys, "M", c.M);
  read_opt(sys, "I", c.I);
  read_opt(sys, "Nx", c.Nx);
  read_opt(sys, "Ny", c.Ny);
  read_opt(sys, "wavelength_m", c.wavelength);
  read_opt(sys, "Lx", c.Lx);
  read_opt(sys, "Ly", c.Ly);
  read_opt(sys, "dx", c.dx);
  read_opt(sys, "dy", c.dy);
  read_opt(sys, "Pt_dbm", c.Pt_dbm);
  read_opt(sys, "Bk_hz", c.Bk_hz);
  read_opt(sys, "N0_dbm_hz", c.N0_dbm_hz);
  read_opt(sys, "NF_db", c.NF_db);
  read_opt(sys, "seed", c.rng_seed);

  const auto geo = j.value("geometry", nlohmann::json::object());
  read_opt(geo, "bs", c.bs_position);
  read_opt(geo, "tiles", c.tile_positions);
  read_opt(geo, "users", c.user_positions);
  if (geo.contains("direct_blockage_db")) {
    const auto& b = geo.at("direct_blockage_db");
    if (b.is_array())
      read_opt(geo, "direct_blockage_db", c.direct_blockage_db);
    else
      c.direct_blockage_db = {b.get<double>()};
  }
  if (geo.contains("layout")) {
    const auto& l = geo.at("layout");
    read_opt(l, "bs_irs_distance_m", c.layout.bs_irs_distance);
    read_opt(l, "tile_spacing_m", c.layout.tile_spacing);
    read_opt(l, "user_offset_m", c.layout.user_offset);
    read_opt(l, "user_drop_x_m", c.layout.user_drop_x);
    read_opt(l, "user_drop_y_m", c.layout.user_drop_y);
  }

  const auto sol = j.value("solver", nlohmann::json::object());
  read_opt(sol, "eps_altern", c.tol.eps_altern);
  read_opt(sol, "eps_fixedpoint", c.tol.eps_fixedpoint);
  read_opt(sol, "max_iters_altern", c.tol.max_iters_altern);
  read_opt(sol, "eps_inner", c.tol.eps_inner);
  read_opt(sol, "max_iters_inner", c.tol.max_iters_inner);
  read_opt(sol, "max_iters_fixedpoint", c.tol.max_iters_fixedpoint);
  read_opt(sol, "max_iters_dual", c.tol.max_iters_dual);
  read_opt(sol, "dual_step_a", c.tol.dual_step_a);
  read_opt(sol, "fixedpoint_damping", c.tol.fixedpoint_damping);
  read_opt(sol, "dual_stable_iters", c.tol.dual_stable_iters);
  read_opt(sol, "exhaustive_cap", c.tol.exhaustive_cap);

  const auto ml = j.value("ml", nlohmann::json::object());
  read_opt(ml, "samples", c.ml.samples);
  read_opt(ml, "hidden", c.ml.hidden);
  read_opt(ml, "train_fraction", c.ml.train_fraction);
  read_opt(ml, "val_fraction", c.ml.val_fraction);
  read_opt(ml, "max_epochs", c.ml.max_epochs);
  read_opt(ml, "max_val_fail", c.ml.max_val_fail);
  read_opt(ml, "mu_init", c.ml.mu_init);
  read_opt(ml, "mu_max", c.ml.mu_max);
  read_opt(ml, "restarts", c.ml.restarts);
  read_opt(ml, "repair_quotas", c.ml.repair_quotas);
  return c;
}

nlohmann::json config_to_json(const ScenarioConfig& c) {
  nlohmann::json j;
  j["system"] = {{"K", c.K},         {"M", c.M},           {"I", c.I},           {"Nx", c.Nx},
                 {"Ny", c.Ny},       {"wavelength_m", c.wavelength}, {"Lx", c.Lx}, {"Ly", c.Ly},
                 {"dx", c.dx},       {"dy", c.dy},         {"Pt_dbm", c.Pt_dbm}, {"Bk_hz", c.Bk_hz},
                 {"N0_dbm_hz", c.N0_dbm_hz}, {"NF_db", c.NF_db}, {"seed", c.rng_seed}};
  j["geometry"] = {{"bs", c.bs_position},
                   {"tiles", c.tile_positions},
                   {"users", c.user_positions},
                   {"direct_blockage_db", c.direct_blockage_db},
                   {"layout",
                    {{"bs_irs_distance_m", c.layout.bs_irs_distance},
                     {"tile_spacing_m", c.layout.tile_spacing},
                     {"user_offset_m", c.layout.user_offset},
                     {"user_drop_x_m", c.layout.user_drop_x},
                     {"user_drop_y_m", c.layout.user_drop_y}}}};
  j["solver"] = {{"eps_altern", c.tol.eps_altern},
                 {"eps_fixedpoint", c.tol.eps_fixedpoint},
                 {"max_iters_altern", c.tol.max_iters_altern},
                 {"eps_inner", c.tol.eps_inner},
                 {"max_iters_inner", c.tol.max_iters_inner},
                 {"max_iters_fixedpoint", c.tol.max_iters_fixedpoint},
                 {"max_iters_dual", c.tol.max_iters_dual},
                 {"dual_step_a", c.tol.dual_step_a},
                 {"fixedpoint_damping", c.tol.fixedpoint_damping},
                 {"dual_stable_iters", c.tol.dual_stable_iters},
                 {"exhaustive_cap", c.tol.exhaustive_cap}};
  j["ml"] = {{"samples", c.ml.samples},
             {"hidden", c.ml.hidden},
             {"train_fraction", c.ml.train_fraction},
             {"val_fraction", c.ml.val_fraction},
             {"max_epochs", c.ml.max_epochs},
             {"max_val_fail", c.ml.max_val_fail},
             {"mu_init", c.ml.mu_init},
             {"mu_max", c.ml.mu_max},
             {"restarts", c.ml.restarts},
             {"repair_quotas", c.ml.repair_quotas}};
  return j;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("config", "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter("config", std::string("parse error: ") + e.what());
  }
  return config_from_json(j);
}

ValidatedScenario realization_scenario(const ValidatedScenario& scn, std::uint64_t seed) {
  const ScenarioConfig& base = scn.config;
  const LineLayout& lay = base.layout;
  if ((lay.user_drop_x <= 0.0 && lay.user_drop_y <= 0.0) || !base.user_positions.empty() ||
      !base.tile_positions.empty())
    return scn;
  ScenarioConfig cfg = base;
  const Substream rng(seed, Stream::UserDrop);
  cfg.tile_positions = scn.tiles;
  cfg.user_positions = scn.users;
  for (std::size_t k = 0; k < scn.K; ++k) {
    const auto [ux, uy] = rng.uniform2(static_cast<std::uint32_t>(k), 0, 0);
    cfg.user_positions[k][0] += ux * lay.user_drop_x;
    cfg.user_positions[k][1] += (2.0 * uy - 1.0) * lay.user_drop_y;
  }
  ValidatedScenario out = validate_config(cfg);
  out.config = base;
  return out;
}

ScenarioConfig with_users_and_tiles(ScenarioConfig cfg, std::size_t users, std::size_t tiles) {
  if (tiles < 1) throw InvalidParameter("I", "must be at least 1");
  if (users < 1) throw InvalidParameter("K", "must be at least 1");
  if (!cfg.tile_positions.empty()) {
    if (tiles > cfg.tile_positions.size()) throw InvalidParameter("tile_positions", "not enough explicit tiles");
    cfg.tile_positions.resize(tiles);
  }
  if (!cfg.user_positions.empty()) {
    if (users > cfg.user_positions.size()) throw InvalidParameter("user_positions", "not enough explicit users");
    cfg.user_positions.resize(users);
  }
  if (cfg.direct_blockage_db.size() > 1) {
    if (users > cfg.direct_blockage_db.size())
      throw InvalidParameter("direct_blockage_db", "not enough per-user entries");
    cfg.direct_blockage_db.resize(users);
  }
  cfg.K = users;
  cfg.I = tiles;
  return cfg;
}

ScenarioConfig with_tile_count(ScenarioConfig cfg, std::size_t tiles) {
  return with_users_and_tiles(cfg, std::min(cfg.K, tiles), tiles);
}

}  // namespace irsa
