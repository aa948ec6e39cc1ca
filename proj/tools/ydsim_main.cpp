#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ydsim/dynamics.hpp"
#include "ydsim/ensembles.hpp"
#include "ydsim/experiment.hpp"
#include "ydsim/oracle.hpp"
#include "ydsim/pde.hpp"
#include "ydsim/serialize.hpp"

namespace {

using nlohmann::json;
using namespace ydsim;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

json base_metadata(std::uint64_t seed, const std::string& config_dump) {
  return json{{"version", "0.1.0"},
              {"seed", seed},
              {"rng_algorithm", Xoshiro256ss::kAlgorithmId},
              {"config_hash", fnv1a_hex(config_dump)}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --- epsilon ----------------------------------------------------------

int cmd_epsilon(std::int64_t n_scale, const std::string& stat_name) {
  const Statistics stat = statistics_from_name(stat_name);
  SeriesControl ctl;
  const double eps = solve_epsilon(n_scale, stat, ctl);
  const double target = static_cast<double>(n_scale) * static_cast<double>(n_scale);
  const double residual = mean_area(EnsembleParams(eps, stat), ctl) - target;
  json out{{"N", n_scale},
           {"statistics", stat_name},
           {"epsilon", eps},
           {"N_times_one_minus_epsilon", static_cast<double>(n_scale) * (1.0 - eps)},
           {"residual", residual}};
  out["meta"] = base_metadata(0, out.dump());
  std::cout << out.dump() << "\n";
  return kExitOk;
}

// --- sample -----------------------------------------------------------

int cmd_sample(std::int64_t n_scale, double eps_flag, const std::string& stat_name, int count,
               std::uint64_t seed) {
  const Statistics stat = statistics_from_name(stat_name);
  SeriesControl ctl;
  const double eps = eps_flag > 0.0 ? eps_flag : solve_epsilon(n_scale, stat, ctl);
  Xoshiro256ss rng(seed);
  json meta = base_metadata(seed, json{{"N", n_scale}, {"eps", eps}, {"count", count}}.dump());
  std::cout << json{{"meta", meta}, {"epsilon", eps}}.dump() << "\n";
  for (int i = 0; i < count; ++i) {
    if (stat == Statistics::U)
      std::cout << to_json(sample_partition(EnsembleParams(eps, stat), rng)).dump() << "\n";
    else
      std::cout << to_json(sample_strict_partition(EnsembleParams(eps, stat), rng)).dump()
                << "\n";
  }
  return kExitOk;
}

// --- simulate ---------------------------------------------------------

int cmd_simulate(const std::string& process_name_str, std::int64_t n_scale, double eps_flag,
                 double horizon, std::vector<double> record_times, std::uint64_t seed,
                 std::vector<std::string> observable_names, double grid_min, double grid_h,
                 std::size_t grid_n, const std::string& out_path,
                 const std::string& binary_out_path, const std::string& initial_json) {
  SimRun run;
  run.process = process_from_name(process_name_str);
  run.n_scale = n_scale;
  const Statistics stat =
      (run.process == ProcessKind::PartitionU || run.process == ProcessKind::ExclusionZ)
          ? Statistics::U
          : Statistics::RU;
  SeriesControl ctl;
  run.epsilon = eps_flag >= 0.0 ? eps_flag : solve_epsilon(n_scale, stat, ctl);
  run.horizon = horizon;
  if (record_times.empty()) record_times = {0.0, horizon};
  run.record_times = std::move(record_times);
  run.seed = seed;

  SimState initial;
  if (!initial_json.empty()) {
    const json j = json::parse(initial_json);
    switch (run.process) {
      case ProcessKind::PartitionU: initial = partition_from_json(j); break;
      case ProcessKind::StrictRU: initial = strict_partition_from_json(j); break;
      case ProcessKind::ExclusionZ: initial = config_z_from_json(j); break;
      case ProcessKind::ExclusionN: initial = config_n_from_json(j); break;
    }
  } else {
    // stationary sample, mapped into the requested picture
    Xoshiro256ss init_rng(SplitMix64(seed).next());
    if (stat == Statistics::U) {
      const Partition p = sample_partition(EnsembleParams(run.epsilon, stat), init_rng);
      if (run.process == ProcessKind::PartitionU)
        initial = p;
      else
        initial = partition_to_config_z(p);
    } else {
      const StrictPartition q =
          sample_strict_partition(EnsembleParams(run.epsilon, stat), init_rng);
      if (run.process == ProcessKind::StrictRU)
        initial = q;
      else
        initial = strict_to_config_n(q);
    }
  }

  const GridSpec grid{grid_min, grid_h, grid_n};
  std::vector<ObservableSpec> specs;
  for (const auto& name : observable_names) {
    if (name == "area") specs.push_back({ObservableKind::Area, {}});
    else if (name == "rows") specs.push_back({ObservableKind::RowCount, {}});
    else if (name == "total_mass") specs.push_back({ObservableKind::TotalMass, {}});
    else if (name == "boundary_occupation")
      specs.push_back({ObservableKind::BoundaryOccupation, {}});
    else if (name == "boundary_time_integral")
      specs.push_back({ObservableKind::BoundaryTimeIntegral, {}});
    else if (name == "scaled_height") specs.push_back({ObservableKind::ScaledHeight, grid});
    else if (name == "hopf_cole") specs.push_back({ObservableKind::HopfCole, grid});
    else throw std::invalid_argument("unknown observable: " + name);
  }

  const ObservableSeries series = simulate(run, initial, specs);
  json meta = base_metadata(
      seed, json{{"process", process_name_str}, {"N", n_scale}, {"eps", run.epsilon}}.dump());
  meta["epsilon"] = run.epsilon;
  meta["event_count"] = series.event_count;
  const std::string payload = json{{"meta", meta}}.dump() + "\n" + series_to_jsonl(series);
  if (out_path.empty())
    std::cout << payload;
  else
    write_text(out_path, payload);
  if (!binary_out_path.empty()) {
    std::ofstream bin(binary_out_path, std::ios::binary);
    if (!bin) throw std::invalid_argument("cannot open output file: " + binary_out_path);
    write_binary_series(series, bin);
  }
  return kExitOk;
}

// --- pde --------------------------------------------------------------

int cmd_pde(const std::string& equation, const std::string& initial, double horizon,
            PdeConfig cfg, const std::string& out_path) {
  GridField psi0(0, 1, {0.0});
  const bool is_u = equation == "bhydro" || equation == "burgers";
  constexpr double kH = 1e-3;
  if (initial == "vershik") {
    psi0 = is_u ? vershik_u_field(0.05, kH, 7951) : vershik_r_field(kH, 10001);
  } else if (initial.rfind("perturbed-vershik-", 0) == 0) {
    const int variant = std::stoi(initial.substr(initial.size() - 1));
    psi0 = is_u ? perturbed_vershik_u(variant, 0.05, kH, 7951)
                : perturbed_vershik_r(variant, kH, 10001);
  } else if (initial.rfind("csv:", 0) == 0) {
    psi0 = grid_field_from_csv(slurp(initial.substr(4)));
  } else {
    throw std::invalid_argument("unknown initial profile: " + initial);
  }

  GridField result(0, 1, {0.0});
  if (equation == "bhydro") {
    result = solve_bhydro(psi0, horizon, cfg);
  } else if (equation == "fhydro") {
    result = solve_fhydro(psi0, horizon, cfg);
  } else if (equation == "burgers") {
    result = solve_burgers_z(phi_u(psi0), horizon, cfg);
  } else if (equation == "omega") {
    result = solve_omega(hopf_cole_macro(phi_u(psi0), ModelConstants::beta()), horizon, cfg);
  } else {
    throw std::invalid_argument("unknown equation: " + equation);
  }
  const std::string csv = grid_field_to_csv(result);
  if (out_path.empty())
    std::cout << csv;
  else
    write_text(out_path, csv);
  return kExitOk;
}

// --- vershik ----------------------------------------------------------

int cmd_vershik(const std::string& stat_name, double umin, double umax, double h,
                const std::string& out_dir) {
  const Statistics stat = statistics_from_name(stat_name);
  const auto n = static_cast<std::size_t>(std::llround((umax - umin) / h)) + 1;
  const GridField curve =
      stat == Statistics::U ? vershik_u_field(umin, h, n) : vershik_r_field(h, n);
  const GridField residual = residual_stationary(
      curve, stat == Statistics::U ? LimitEquation::BHydro : LimitEquation::FHydro);
  json report{{"statistics", stat_name},
              {"max_abs_residual", sup_norm(residual.values)},
              {"grid_h", h}};
  if (out_dir.empty()) {
    std::cout << report.dump() << "\n";
  } else {
    std::filesystem::create_directories(out_dir);
    write_text(out_dir + "/curve.csv", grid_field_to_csv(curve));
    write_text(out_dir + "/residual.csv", grid_field_to_csv(residual));
    write_text(out_dir + "/report.json", report.dump() + "\n");
    std::cout << report.dump() << "\n";
  }
  return kExitOk;
}

// --- oracle -----------------------------------------------------------

int cmd_oracle(const std::string& stat_name, std::int64_t cap, std::int64_t eps_num,
               std::int64_t eps_den) {
  const Statistics stat = statistics_from_name(stat_name);
  const double eps = static_cast<double>(eps_num) / static_cast<double>(eps_den);
  const auto chain = oracle::build_truncated_chain(stat, cap, eps);
  const bool balanced = oracle::detailed_balance_exact(chain, eps_num, eps_den);
  const auto pi = oracle::stationary_distribution(chain);
  // compare against normalized eps^area
  double z = 0.0;
  for (auto area : chain.state_area) z += std::pow(eps, static_cast<double>(area));
  double max_rel = 0.0;
  for (std::size_t s = 0; s < chain.size(); ++s) {
    const double expected = std::pow(eps, static_cast<double>(chain.state_area[s])) / z;
    max_rel = std::max(max_rel, std::abs(pi[s] - expected) / expected);
  }
  json out{{"statistics", stat_name},
           {"cap", cap},
           {"epsilon", eps},
           {"states", chain.size()},
           {"transitions", chain.transitions.size()},
           {"detailed_balance_exact", balanced},
           {"stationary_max_rel_error", max_rel}};
  std::cout << out.dump() << "\n";
  return balanced && max_rel <= 1e-10 ? kExitOk : kExitNumericalError;
}

// --- converge ---------------------------------------------------------

int cmd_converge(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
                 const std::string& out_dir_override, int threads_override) {
  ExperimentConfig cfg;
  if (!config_path.empty()) cfg = config_from_json(json::parse(slurp(config_path)));
  if (has_seed) cfg.master_seed = seed_override;
  if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
  if (threads_override > 0) cfg.threads = threads_override;
  cfg.validate();

  const auto rows = run_convergence(cfg);
  json out{{"meta", run_metadata(cfg)},
           {"config", config_to_json(cfg)},
           {"rows", rows_to_json(rows)}};
  if (cfg.out_dir.empty()) {
    std::cout << out.dump() << "\n";
  } else {
    std::filesystem::create_directories(cfg.out_dir);
    write_text(cfg.out_dir + "/convergence.csv", rows_to_csv(rows));
    write_text(cfg.out_dir + "/convergence.json", out.dump() + "\n");
    std::cout << out["meta"].dump() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Young-diagram dynamics simulator and limit-equation toolkit"};
  app.require_subcommand(1);

  // epsilon
  auto* sc_eps = app.add_subcommand("epsilon", "solve the mean-area relation for epsilon(N)");
  std::int64_t eps_n = 100;
  std::string eps_stat = "U";
  sc_eps->add_option("--N", eps_n, "scale parameter N")->required();
  sc_eps->add_option("--stat", eps_stat, "statistics: U or RU");

  // sample
  auto* sc_sample = app.add_subcommand("sample", "draw grandcanonical samples");
  std::int64_t sample_n = 16;
  double sample_eps = -1.0;
  std::string sample_stat = "U";
  int sample_count = 1;
  std::uint64_t sample_seed = 1;
  sc_sample->add_option("--N", sample_n, "scale N (used when --epsilon is not given)");
  sc_sample->add_option("--epsilon", sample_eps, "explicit epsilon in (0,1)");
  sc_sample->add_option("--stat", sample_stat, "statistics: U or RU");
  sc_sample->add_option("--count", sample_count, "number of samples");
  sc_sample->add_option("--seed", sample_seed, "rng seed");

  // simulate
  auto* sc_sim = app.add_subcommand("simulate", "run an event-driven trajectory");
  std::string sim_process = "partition-u";
  std::int64_t sim_n = 16;
  double sim_eps = -1.0;
  double sim_t = 1.0;
  std::vector<double> sim_records;
  std::uint64_t sim_seed = 1;
  std::vector<std::string> sim_observables{"area"};
  double sim_grid_min = 0.0, sim_grid_h = 0.01;
  std::size_t sim_grid_n = 600;
  std::string sim_out, sim_binary_out, sim_initial;
  sc_sim->add_option("--process", sim_process,
                     "partition-u | strict-ru | exclusion-z | exclusion-n");
  sc_sim->add_option("--N", sim_n, "scale N (speed N^2)");
  sc_sim->add_option("--epsilon", sim_eps, "epsilon (default: solve epsilon(N))");
  sc_sim->add_option("--T", sim_t, "macroscopic horizon");
  sc_sim->add_option("--records", sim_records, "record times (default 0 and T)");
  sc_sim->add_option("--seed", sim_seed, "rng seed");
  sc_sim->add_option("--observables", sim_observables,
                     "area rows total_mass boundary_occupation boundary_time_integral "
                     "scaled_height hopf_cole");
  sc_sim->add_option("--grid-min", sim_grid_min, "field observable grid start");
  sc_sim->add_option("--grid-h", sim_grid_h, "field observable grid spacing");
  sc_sim->add_option("--grid-n", sim_grid_n, "field observable grid size");
  sc_sim->add_option("--out", sim_out, "write JSON-lines to this file");
  sc_sim->add_option("--binary-out", sim_binary_out, "also write the binary column format");
  sc_sim->add_option("--initial", sim_initial, "initial state as JSON (default: sample)");

  // pde
  auto* sc_pde = app.add_subcommand("pde", "solve a limit equation");
  std::string pde_eq = "bhydro", pde_init = "vershik", pde_out;
  double pde_t = 1.0;
  PdeConfig pde_cfg;
  std::string pde_scheme = "semi-implicit";
  sc_pde->set_help_flag("--help", "print help");
  sc_pde->add_option("--equation", pde_eq, "bhydro | fhydro | burgers | omega");
  sc_pde->add_option("--initial", pde_init,
                     "vershik | perturbed-vershik-{1,2,3} | csv:<path>");
  sc_pde->add_option("--T", pde_t, "horizon");
  sc_pde->add_option("--h", pde_cfg.h, "solver grid spacing");
  sc_pde->add_option("--dt", pde_cfg.dt, "time step");
  sc_pde->add_option("--L", pde_cfg.domain_length, "domain truncation length");
  sc_pde->add_option("--scheme", pde_scheme, "semi-implicit | explicit");
  sc_pde->add_option("--out", pde_out, "output CSV path");

  // vershik
  auto* sc_ver = app.add_subcommand("vershik", "emit limit-shape curves and residuals");
  std::string ver_stat = "U", ver_out;
  double ver_umin = 0.05, ver_umax = 8.0, ver_h = 1e-3;
  sc_ver->set_help_flag("--help", "print help");
  sc_ver->add_option("--stat", ver_stat, "statistics: U or RU");
  sc_ver->add_option("--umin", ver_umin, "left edge (U statistics)");
  sc_ver->add_option("--umax", ver_umax, "right edge");
  sc_ver->add_option("--h", ver_h, "grid spacing");
  sc_ver->add_option("--out", ver_out, "output directory");

  // oracle
  auto* sc_oracle = app.add_subcommand("oracle", "exact small-scale stationarity report");
  std::string oracle_stat = "U";
  std::int64_t oracle_cap = 8, oracle_num = 1, oracle_den = 2;
  sc_oracle->add_option("--stat", oracle_stat, "statistics: U or RU");
  sc_oracle->add_option("--M", oracle_cap, "area cap");
  sc_oracle->add_option("--eps-num", oracle_num, "epsilon numerator");
  sc_oracle->add_option("--eps-den", oracle_den, "epsilon denominator");

  // converge
  auto* sc_conv = app.add_subcommand("converge", "hydrodynamic convergence study");
  std::string conv_config, conv_out;
  std::uint64_t conv_seed = 0;
  int conv_threads = 0;
  sc_conv->add_option("--config", conv_config, "experiment config JSON path");
  auto* seed_opt = sc_conv->add_option("--seed", conv_seed, "master seed override");
  sc_conv->add_option("--out", conv_out, "output directory override");
  sc_conv->add_option("--threads", conv_threads, "worker thread override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*sc_eps) return cmd_epsilon(eps_n, eps_stat);
    if (*sc_sample)
      return cmd_sample(sample_n, sample_eps, sample_stat, sample_count, sample_seed);
    if (*sc_sim)
      return cmd_simulate(sim_process, sim_n, sim_eps, sim_t, sim_records, sim_seed,
                          sim_observables, sim_grid_min, sim_grid_h, sim_grid_n, sim_out,
                          sim_binary_out, sim_initial);
    if (*sc_pde) {
      if (pde_scheme == "explicit")
        pde_cfg.scheme = Scheme::Explicit;
      else if (pde_scheme != "semi-implicit")
        throw std::invalid_argument("unknown scheme: " + pde_scheme);
      return cmd_pde(pde_eq, pde_init, pde_t, pde_cfg, pde_out);
    }
    if (*sc_ver) return cmd_vershik(ver_stat, ver_umin, ver_umax, ver_h, ver_out);
    if (*sc_oracle) return cmd_oracle(oracle_stat, oracle_cap, oracle_num, oracle_den);
    if (*sc_conv)
      return cmd_converge(conv_config, conv_seed, seed_opt->count() > 0, conv_out,
                          conv_threads);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalError;
  }
  return kExitConfigError;
}
