#include "irsa/cli/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "irsa/error.hpp"
#include "irsa/io.hpp"
#include "irsa/ml/dataset.hpp"
#include "irsa/ml/surrogate.hpp"
#include "irsa/rng.hpp"

namespace irsa::cli {

namespace {

const std::vector<double> kConvergencePowers = {30.0, 35.0, 40.0};
const std::vector<double> kComparePowers = {30.0, 35.0, 40.0, 45.0, 50.0};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string power_tag(double dbm) {
  std::string s = num(dbm);
  for (auto& ch : s)
    if (ch == '.') ch = 'p';
  return s;
}

nlohmann::json options_json(const Options& o, const ScenarioConfig& cfg) {
  nlohmann::json j = {{"config", config_to_json(cfg)}, {"pt_dbm", o.pt_dbm}, {"realizations", o.realizations}};
  std::vector<std::string> cases;
  for (auto c : o.cases) cases.push_back(case_name(c));
  j["cases"] = cases;
  return j;
}

std::string path_in(const Options& o, const std::string& name) {
  return (std::filesystem::path(o.out) / name).string();
}

void require(const std::string& path) {
  if (!std::filesystem::exists(path)) throw MissingArtifact(path);
}

}  // namespace

ScenarioConfig resolve_config(const Options& opts) {
  ScenarioConfig cfg = opts.config_path.empty() ? ScenarioConfig{} : load_config(opts.config_path);
  if (opts.blockage_db) cfg.direct_blockage_db = {*opts.blockage_db};
  if (opts.tiles_override) cfg = with_tile_count(cfg, *opts.tiles_override);
  if (opts.samples) cfg.ml.samples = *opts.samples;
  if (opts.hidden) cfg.ml.hidden = *opts.hidden;
  if (opts.repair_quotas) cfg.ml.repair_quotas = *opts.repair_quotas;
  return cfg;
}

void cmd_convergence(const Options& opts, std::ostream& log) {
  Options o = opts;
  if (!o.tiles_override) o.tiles_override = 1;
  if (o.pt_dbm.empty()) o.pt_dbm = kConvergencePowers;
  const ScenarioConfig base = resolve_config(o);
  RunManifest manifest("convergence", o.config_path, {o.seed}, o.out, options_json(o, base));

  for (double pt : o.pt_dbm) {
    ScenarioConfig cfg = base;
    cfg.Pt_dbm = pt;
    const std::uint64_t seed = mix_seed(o.seed, 0);
    const ValidatedScenario scn = realization_scenario(validate_config(cfg), seed);
    const ChannelSet ch = draw_channels(scn, seed);
    const Solution sol = alternate(ch, scn);
    const double baseline = run_case(ch, scn, CaseId::VI).report.sum_rate;

    std::ostringstream csv;
    csv << "P_t_dbm,iteration,sum_rate,no_irs_sum_rate\n";
    for (std::size_t t = 0; t < sol.trace.size(); ++t)
      csv << num(pt) << ',' << t << ',' << num(sol.trace[t]) << ',' << num(baseline) << '\n';
    manifest.write_csv("convergence_" + power_tag(pt) + "dBm.csv", csv.str());
    log << "P_t=" << num(pt) << " dBm: " << sol.iterations << " iterations, sum rate " << num(sol.trace.back())
        << " bit/s, no-IRS " << num(baseline) << " bit/s\n";
  }
  manifest.finish();
}

void cmd_compare(const Options& opts, std::ostream& log) {
  Options o = opts;
  if (o.pt_dbm.empty()) o.pt_dbm = kComparePowers;
  if (o.cases.empty()) o.cases.assign(std::begin(kAllCases), std::end(kAllCases));
  if (o.realizations == 0) throw InvalidParameter("realizations", "must be at least 1");
  const ScenarioConfig base = resolve_config(o);
  RunManifest manifest("compare", o.config_path, {o.seed}, o.out, options_json(o, base));

  std::ostringstream rows, summary;
  rows << "case,P_t_dbm,realization,sum_rate,sum_upper,sum_intf,iterations\n";
  summary << "case,P_t_dbm,mean_sum_rate,std_error,realizations\n";
  for (double pt : o.pt_dbm) {
    ScenarioConfig cfg = base;
    cfg.Pt_dbm = pt;
    const ValidatedScenario scn = validate_config(cfg);
    std::vector<CaseId> cases;
    for (auto c : o.cases) {
      if (c == CaseId::I && std::pow(double(scn.K), double(scn.I)) > scn.tol.exhaustive_cap) {
        log << "skipping case I: K^I exceeds the exhaustive-search cap\n";
        continue;
      }
      cases.push_back(c);
    }
    const MonteCarloResult mc = monte_carlo(scn, o.realizations, cases, o.seed);
    for (const auto& r : mc.records)
      rows << case_name(r.c) << ',' << num(pt) << ',' << r.realization << ',' << num(r.sum_rate) << ','
           << num(r.sum_upper) << ',' << num(r.sum_intf) << ',' << r.iterations << '\n';
    for (const auto& s : mc.summary) {
      summary << case_name(s.c) << ',' << num(pt) << ',' << num(s.mean) << ',' << num(s.std_error) << ',' << s.n
              << '\n';
      log << "P_t=" << num(pt) << " dBm case " << case_name(s.c) << ": " << num(s.mean / 1e6) << " Mbit/s\n";
    }
  }
  manifest.write_csv("compare_realizations.csv", rows.str());
  manifest.write_csv("compare_summary.csv", summary.str());
  manifest.finish();
}

void cmd_ml(const std::string& sub, const Options& opts, std::ostream& log) {
  const ScenarioConfig cfg = resolve_config(opts);
  const ValidatedScenario scn = validate_config(cfg);
  const std::string csv_path = path_in(opts, "dataset.csv");
  const std::string meta_path = path_in(opts, "dataset_meta.json");
  const std::string model_path = path_in(opts, "model.json");
  nlohmann::json inputs = {{"config", config_to_json(cfg)}, {"subcommand", sub}};

  auto load = [&] {
    require(csv_path);
    require(meta_path);
    auto ds = ml::load_dataset(csv_path, meta_path);
    if (ds.fingerprint != ml::scenario_fingerprint(scn) && sub != "train")
      log << "warning: dataset was generated for a different scenario\n";
    return ds;
  };
  auto with_hashes = [&](std::initializer_list<std::string> paths) {
    for (const auto& p : paths) inputs[std::filesystem::path(p).filename().string()] = git_blob_hash(read_file(p));
  };

  if (sub == "gen") {
    RunManifest manifest("ml gen", opts.config_path, {opts.seed}, opts.out, inputs);
    const auto ds = ml::generate_dataset(scn, cfg.ml.samples, opts.seed);
    manifest.write_csv("dataset.csv", ml::dataset_csv(ds));
    manifest.write("dataset_meta.json", ml::dataset_metadata(ds).dump(1) + "\n");
    manifest.finish();
    log << "dataset: " << ds.samples.size() << " samples (" << ds.train.size() << '/' << ds.val.size() << '/'
        << ds.test.size() << "), " << ds.redraws << " redraws\n";
  } else if (sub == "train") {
    const auto ds = load();
    with_hashes({csv_path, meta_path});
    RunManifest manifest("ml train", opts.config_path, {opts.seed}, opts.out, inputs);
    const auto res = ml::train_surrogate(ds, cfg.ml.hidden, cfg.ml, opts.seed);
    std::ostringstream hist;
    hist << "epoch,train_mse,val_mse,mu\n";
    for (const auto& e : res.lm.history)
      hist << e.epoch << ',' << num(e.train_mse) << ',' << num(e.val_mse) << ',' << num(e.mu) << '\n';
    manifest.write("model.json", res.model.to_json().dump() + "\n");
    manifest.write_csv("train_history.csv", hist.str());
    manifest.finish();
    log << "kept restart " << res.restart + 1 << " of " << res.restart_val_mse.size() << ": trained "
        << res.lm.history.size() - 1 << " epochs, stop: " << ml::stop_name(res.lm.stop) << ", best validation mse "
        << num(res.lm.best_val_mse) << '\n';
  } else if (sub == "eval" || sub == "bench") {
    require(model_path);
    const auto ds = load();
    const auto model = ml::FnnModel::load(model_path);
    with_hashes({csv_path, meta_path, model_path});
    RunManifest manifest("ml " + sub, opts.config_path, {opts.seed}, opts.out, inputs);
    const bool repair = cfg.ml.repair_quotas;
    nlohmann::json report;
    if (sub == "eval") {
      const auto r = ml::evaluate_surrogate(model, ds, ds.test, scn, repair);
      report = {{"samples", r.n}, {"accuracy_percent", r.accuracy}, {"mean_rate_gap", r.mean_rate_gap},
                {"inference_seconds", r.inference_seconds}, {"repair_quotas", repair}};
      log << "accuracy " << num(r.accuracy) << "%, mean rate gap " << num(r.mean_rate_gap) << '\n';
    } else {
      std::vector<std::size_t> all(ds.samples.size());
      for (std::size_t s = 0; s < all.size(); ++s) all[s] = s;
      const auto r = ml::bench(model, ds, all, scn, repair);
      report = {{"samples", r.n},
                {"algorithm1_seconds", r.algorithm1_seconds},
                {"surrogate_seconds", r.surrogate_seconds},
                {"speedup", r.speedup},
                {"algorithm1_self_accuracy_percent", r.algorithm1_self_accuracy},
                {"algorithm1_label_accuracy_percent", r.algorithm1_label_accuracy},
                {"surrogate_accuracy_percent", r.surrogate_accuracy}};
      log << "association solver " << num(r.algorithm1_seconds * 1e3) << " ms, surrogate "
          << num(r.surrogate_seconds * 1e3) << " ms, speedup " << num(r.speedup) << "x\n";
    }
    manifest.write(sub + "_report.json", report.dump(2) + "\n");
    manifest.finish();
  } else {
    throw InvalidParameter("ml", "unknown subcommand '" + sub + "'");
  }
}

namespace {

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* field) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      if constexpr (std::is_floating_point_v<T>) {
        out.push_back(std::stod(item, &used));
      } else {
        if (!item.empty() && item[0] == '-') throw std::invalid_argument("negative");
        out.push_back(static_cast<T>(std::stoull(item, &used)));
      }
      if (used != item.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw InvalidParameter(field, "cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw InvalidParameter(field, "empty list");
  return out;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Infeasible:
    case ErrorKind::Numerical: return kInfeasible;
    case ErrorKind::MissingArtifact: return kMissingArtifact;
    default: return kUsage;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-tile IRS association, beamforming and reflection solver"};
  app.require_subcommand(1);
  Options o;
  std::string pt_list, case_list, hidden_list, repair_text;
  std::optional<std::size_t> tiles, samples;
  std::optional<double> blockage;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config_path, "scenario JSON file");
    cmd->add_option("--seed", o.seed, "base seed");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--tiles-override", tiles, "number of tiles");
    cmd->add_option("--blockage-db", blockage, "direct-link blockage for every user (dB)");
  };
  auto* conv = app.add_subcommand("convergence", "alternating-optimizer traces per transmit power");
  common(conv);
  conv->add_option("--pt-dbm", pt_list, "comma-separated transmit powers (dBm)");

  auto* cmp = app.add_subcommand("compare", "Monte-Carlo comparison of cases I-VII");
  common(cmp);
  cmp->add_option("--pt-dbm", pt_list, "comma-separated transmit powers (dBm)");
  cmp->add_option("--realizations", o.realizations, "channel realizations per power");
  cmp->add_option("--cases", case_list, "comma-separated case names (I..VII)");

  auto* mlc = app.add_subcommand("ml", "surrogate pipeline");
  std::string sub;
  mlc->add_option("subcommand", sub, "gen, train, eval or bench")->required();
  common(mlc);
  mlc->add_option("--samples", samples, "dataset size");
  mlc->add_option("--hidden", hidden_list, "hidden layer sizes, e.g. 10,10,10");
  mlc->add_option("--repair-quotas", repair_text, "true or false");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (!pt_list.empty()) o.pt_dbm = parse_list<double>(pt_list, "pt-dbm");
    if (!case_list.empty()) {
      std::stringstream ss(case_list);
      std::string item;
      while (std::getline(ss, item, ',')) o.cases.push_back(parse_case(item));
    }
    if (!hidden_list.empty()) o.hidden = parse_list<std::size_t>(hidden_list, "hidden");
    if (!repair_text.empty()) {
      if (repair_text == "true" || repair_text == "1") o.repair_quotas = true;
      else if (repair_text == "false" || repair_text == "0") o.repair_quotas = false;
      else throw InvalidParameter("repair-quotas", "expected true or false");
    }
    o.tiles_override = tiles;
    o.samples = samples;
    o.blockage_db = blockage;

    if (*conv) cmd_convergence(o, out);
    else if (*cmp) cmd_compare(o, out);
    else cmd_ml(sub, o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON: " << e.what() << '\n';
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

}  // namespace irsa::cli
