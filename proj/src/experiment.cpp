#include "ydsim/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ydsim/serialize.hpp"

namespace ydsim {

const char* initial_kind_name(InitialKind k) {
  switch (k) {
    case InitialKind::StationarySample: return "stationary-sample";
    case InitialKind::Vershik: return "vershik";
    case InitialKind::PerturbedVershik: return "perturbed-vershik";
    case InitialKind::ProfileCsv: return "profile-csv";
  }
  return "?";
}

InitialKind initial_kind_from_name(const std::string& name) {
  if (name == "stationary-sample") return InitialKind::StationarySample;
  if (name == "vershik") return InitialKind::Vershik;
  if (name == "perturbed-vershik") return InitialKind::PerturbedVershik;
  if (name == "profile-csv") return InitialKind::ProfileCsv;
  throw std::invalid_argument("unknown initial condition: " + name);
}

void ExperimentConfig::validate() const {
  if (n_list.empty()) throw std::invalid_argument("config: n_list must be non-empty");
  for (auto n : n_list)
    if (n < 1) throw std::invalid_argument("config: every N must be >= 1");
  if (replicas < 1) throw std::invalid_argument("config: replicas must be >= 1");
  if (record_times.empty()) throw std::invalid_argument("config: record_times must be non-empty");
  double prev = 0.0;
  for (double t : record_times) {
    if (t <= 0.0 || t < prev)
      throw std::invalid_argument("config: record_times must be positive and sorted");
    prev = t;
  }
  if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
  if (initial == InitialKind::PerturbedVershik && (perturb_variant < 1 || perturb_variant > 3))
    throw std::invalid_argument("config: perturb_variant must be 1, 2 or 3");
  if (initial == InitialKind::ProfileCsv && profile_csv.empty())
    throw std::invalid_argument("config: profile_csv path required");
  if (family_id != "bump3-v1")
    throw std::invalid_argument("config: unknown test-function family " + family_id);
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  return nlohmann::json{
      {"schema_version", 1},
      {"statistics", statistics_name(cfg.statistics)},
      {"n_list", cfg.n_list},
      {"replicas", cfg.replicas},
      {"record_times", cfg.record_times},
      {"initial", initial_kind_name(cfg.initial)},
      {"perturb_variant", cfg.perturb_variant},
      {"profile_csv", cfg.profile_csv},
      {"family_id", cfg.family_id},
      {"pde",
       {{"domain_length", cfg.pde.domain_length},
        {"h", cfg.pde.h},
        {"dt", cfg.pde.dt},
        {"scheme", cfg.pde.scheme == Scheme::SemiImplicit ? "semi-implicit" : "explicit"}}},
      {"master_seed", cfg.master_seed},
      {"out_dir", cfg.out_dir},
      {"threads", cfg.threads}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (j.value("schema_version", 1) != 1)
    throw std::invalid_argument("config: unsupported schema version");
  ExperimentConfig cfg;
  cfg.statistics = statistics_from_name(j.value("statistics", "U"));
  if (j.contains("n_list")) cfg.n_list = j.at("n_list").get<std::vector<std::int64_t>>();
  cfg.replicas = j.value("replicas", cfg.replicas);
  if (j.contains("record_times"))
    cfg.record_times = j.at("record_times").get<std::vector<double>>();
  cfg.initial = initial_kind_from_name(j.value("initial", "stationary-sample"));
  cfg.perturb_variant = j.value("perturb_variant", cfg.perturb_variant);
  cfg.profile_csv = j.value("profile_csv", cfg.profile_csv);
  cfg.family_id = j.value("family_id", cfg.family_id);
  if (j.contains("pde")) {
    const auto& p = j.at("pde");
    cfg.pde.domain_length = p.value("domain_length", cfg.pde.domain_length);
    cfg.pde.h = p.value("h", cfg.pde.h);
    cfg.pde.dt = p.value("dt", cfg.pde.dt);
    const std::string scheme = p.value("scheme", "semi-implicit");
    if (scheme == "semi-implicit")
      cfg.pde.scheme = Scheme::SemiImplicit;
    else if (scheme == "explicit")
      cfg.pde.scheme = Scheme::Explicit;
    else
      throw std::invalid_argument("config: unknown scheme " + scheme);
  }
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.validate();
  return cfg;
}

nlohmann::json run_metadata(const ExperimentConfig& cfg) {
  return nlohmann::json{{"version", "0.1.0"},
                        {"seed", cfg.master_seed},
                        {"rng_algorithm", Xoshiro256ss::kAlgorithmId},
                        {"config_hash", fnv1a_hex(config_to_json(cfg).dump())}};
}

namespace {

double bump_normalization() {
  static const double value = adaptive_simpson(
      [](double s) {
        const double d = 1.0 - s * s;
        return d > 0.0 ? std::exp(-1.0 / d) : 0.0;
      },
      -1.0, 1.0, 1e-14);
  return value;
}

TestFunction make_bump(double lo, double hi) {
  const double norm = bump_normalization();
  return {lo, hi, [lo, hi, norm](double u) {
            const double s = (2.0 * u - lo - hi) / (hi - lo);
            const double d = 1.0 - s * s;
            if (d <= 0.0) return 0.0;
            return std::exp(-1.0 / d) * 2.0 / ((hi - lo) * norm);
          }};
}

}  // namespace

const std::vector<TestFunction>& test_function_family() {
  static const std::vector<TestFunction> family{
      make_bump(0.2, 1.0), make_bump(0.5, 2.0), make_bump(1.0, 4.0)};
  return family;
}

double weak_distance(const GridField& height, const GridField& reference) {
  if (height.size() != reference.size() || std::abs(height.xmin - reference.xmin) > 1e-12 ||
      std::abs(height.h - reference.h) > 1e-15)
    throw std::invalid_argument("weak_distance: fields must share a common grid");
  double worst = 0.0;
  for (const auto& f : test_function_family()) {
    if (f.support_lo < height.xmin - 1e-12 || f.support_hi > height.xmax() + 1e-12)
      throw std::invalid_argument("weak_distance: test-function support exceeds the grid");
    CompensatedSum acc;
    for (std::size_t k = 0; k + 1 < height.size(); ++k) {
      const double u0 = height.x(k);
      const double u1 = height.x(k + 1);
      const double g0 = f.eval(u0) * (height.values[k] - reference.values[k]);
      const double g1 = f.eval(u1) * (height.values[k + 1] - reference.values[k + 1]);
      acc.add(0.5 * height.h * (g0 + g1));
    }
    worst = std::max(worst, std::abs(acc.value()));
  }
  return worst;
}

namespace {

std::vector<std::int64_t> quantile_parts(const GridField& psi0, std::int64_t n_scale) {
  const double scale = static_cast<double>(n_scale);
  std::vector<double> us(psi0.size()), psis(psi0.size());
  for (std::size_t k = 0; k < psi0.size(); ++k) {
    us[k] = psi0.x(k);
    psis[k] = psi0.values[k];
  }
  MonotoneInterpolant inverse(us, psis);  // strictly decreasing values
  const double psi_top = psi0.values.front();
  const double psi_bot = psi0.values.back();
  const auto rows = static_cast<std::int64_t>(std::ceil(scale * psi_top));
  std::vector<std::int64_t> parts;
  parts.reserve(static_cast<std::size_t>(rows));
  for (std::int64_t i = 1; i <= rows; ++i) {
    const double target = (static_cast<double>(i) - 0.5) / scale;
    double u;
    if (target >= psi_top)
      u = psi0.xmin;  // quantile past the left edge of the grid
    else if (target <= psi_bot)
      u = psi0.xmax();
    else
      u = inverse.inverse(target);
    auto p = static_cast<std::int64_t>(std::llround(scale * u));
    if (!parts.empty()) p = std::min(p, parts.back());  // clamp non-increasing
    if (p < 1) break;
    parts.push_back(p);
  }
  return parts;
}

}  // namespace

Partition build_initial_microstate_u(const GridField& psi0, std::int64_t n_scale) {
  if (!is_class_xu(psi0))
    throw std::invalid_argument("build_initial_microstate: profile fails the class predicate");
  return Partition::from_parts(quantile_parts(psi0, n_scale));
}

StrictPartition build_initial_microstate_r(const GridField& psi0, std::int64_t n_scale) {
  if (!is_class_xr(psi0))
    throw std::invalid_argument("build_initial_microstate: profile fails the class predicate");
  auto parts = quantile_parts(psi0, n_scale);
  // strictness repair: duplicates are decremented downward
  for (std::size_t i = 1; i < parts.size(); ++i)
    if (parts[i] >= parts[i - 1]) parts[i] = parts[i - 1] - 1;
  while (!parts.empty() && parts.back() < 1) parts.pop_back();
  return StrictPartition::from_parts(std::move(parts));
}

SimState build_initial_microstate(const GridField& psi0, std::int64_t n_scale,
                                  Statistics statistics) {
  if (statistics == Statistics::U) return build_initial_microstate_u(psi0, n_scale);
  return build_initial_microstate_r(psi0, n_scale);
}

std::uint64_t run_seed_for(std::uint64_t master, std::int64_t n_scale) {
  SplitMix64 sm(master ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(n_scale)));
  return sm.next();
}

std::uint64_t replica_seed(std::uint64_t run_seed, int replica_index) {
  return run_seed ^ static_cast<std::uint64_t>(replica_index);
}

namespace {

GridField load_profile(const ExperimentConfig& cfg) {
  constexpr double kH = 1e-3;
  switch (cfg.initial) {
    case InitialKind::ProfileCsv: {
      std::ifstream in(cfg.profile_csv);
      if (!in) throw std::invalid_argument("cannot open profile CSV: " + cfg.profile_csv);
      std::stringstream buffer;
      buffer << in.rdbuf();
      return grid_field_from_csv(buffer.str());
    }
    case InitialKind::PerturbedVershik:
      return cfg.statistics == Statistics::U
                 ? perturbed_vershik_u(cfg.perturb_variant, 0.05, kH, 7951)
                 : perturbed_vershik_r(cfg.perturb_variant, kH, 10001);
    default:
      return cfg.statistics == Statistics::U ? vershik_u_field(0.05, kH, 7951)
                                             : vershik_r_field(kH, 10001);
  }
}

struct ReplicaOutcome {
  std::vector<double> distances;  // per record time
  std::uint64_t events = 0;
  bool failed = false;
};

}  // namespace

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  const GridSpec comparison{0.15, 1e-3, 4101};  // covers every bump support

  const GridField psi0 = load_profile(cfg);
  // matched PDE references, shared across N
  std::vector<GridField> references;
  references.reserve(cfg.record_times.size());
  for (double t : cfg.record_times) {
    const GridField solved = cfg.statistics == Statistics::U
                                 ? solve_bhydro(psi0, t, cfg.pde)
                                 : solve_fhydro(psi0, t, cfg.pde);
    references.push_back(resample(solved, comparison.xmin, comparison.h, comparison.n));
  }

  SeriesControl ctl;
  std::vector<ConvergenceRow> rows;
  for (const std::int64_t n_scale : cfg.n_list) {
    const auto t_start = std::chrono::steady_clock::now();
    const double eps = solve_epsilon(n_scale, cfg.statistics, ctl);
    const std::uint64_t run_seed = run_seed_for(cfg.master_seed, n_scale);

    std::vector<ReplicaOutcome> outcomes(static_cast<std::size_t>(cfg.replicas));
    std::atomic<int> next_replica{0};
    const auto worker = [&]() {
      while (true) {
        const int r = next_replica.fetch_add(1);
        if (r >= cfg.replicas) break;
        auto& outcome = outcomes[static_cast<std::size_t>(r)];
        try {
          const std::uint64_t rseed = replica_seed(run_seed, r);
          SimState initial;
          if (cfg.initial == InitialKind::StationarySample) {
            Xoshiro256ss init_rng(rseed);
            if (cfg.statistics == Statistics::U)
              initial = sample_partition(EnsembleParams(eps, Statistics::U), init_rng);
            else
              initial = sample_strict_partition(EnsembleParams(eps, Statistics::RU), init_rng);
          } else {
            initial = build_initial_microstate(psi0, n_scale, cfg.statistics);
          }
          SimRun run;
          run.n_scale = n_scale;
          run.epsilon = eps;
          run.horizon = cfg.record_times.back();
          run.record_times = cfg.record_times;
          run.seed = SplitMix64(rseed).next();  // trajectory stream
          run.process = cfg.statistics == Statistics::U ? ProcessKind::PartitionU
                                                        : ProcessKind::StrictRU;
          const ObservableSeries series =
              simulate(run, initial, {{ObservableKind::ScaledHeight, comparison}});
          outcome.events = series.event_count;
          for (std::size_t ti = 0; ti < cfg.record_times.size(); ++ti) {
            const GridField height(comparison.xmin, comparison.h,
                                   series.fields.front().rows[ti]);
            outcome.distances.push_back(weak_distance(height, references[ti]));
          }
        } catch (const std::exception&) {
          outcome.failed = true;
        }
      }
    };
    {
      const int n_workers = std::min(cfg.threads, cfg.replicas);
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(n_workers));
      for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    const auto t_end = std::chrono::steady_clock::now();
    const double wall = std::chrono::duration<double>(t_end - t_start).count();

    for (std::size_t ti = 0; ti < cfg.record_times.size(); ++ti) {
      ConvergenceRow row;
      row.n_scale = n_scale;
      row.time = cfg.record_times[ti];
      row.epsilon = eps;
      row.wall_seconds = wall;
      std::vector<double> distances;
      for (const auto& outcome : outcomes) {
        if (outcome.failed) {
          ++row.failed_replicas;
          continue;
        }
        distances.push_back(outcome.distances[ti]);
        row.total_events += outcome.events;
      }
      if (distances.empty())
        throw NumericalError("run_convergence: every replica failed");
      row.median_distance = median(distances);
      row.iqr_distance = interquartile_range(distances);
      rows.push_back(row);
    }
  }
  return rows;
}

std::string rows_to_csv(const std::vector<ConvergenceRow>& rows) {
  std::string out =
      "N,t,epsilon,median_weak_distance,iqr_weak_distance,wall_seconds,total_events,"
      "failed_replicas\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n_scale);
    out += ',';
    out += format_double(r.time);
    out += ',';
    out += format_double(r.epsilon);
    out += ',';
    out += format_double(r.median_distance);
    out += ',';
    out += format_double(r.iqr_distance);
    out += ',';
    out += format_double(r.wall_seconds);
    out += ',';
    out += std::to_string(r.total_events);
    out += ',';
    out += std::to_string(r.failed_replicas);
    out += '\n';
  }
  return out;
}

nlohmann::json rows_to_json(const std::vector<ConvergenceRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"N", r.n_scale},
                   {"t", r.time},
                   {"epsilon", r.epsilon},
                   {"median_weak_distance", r.median_distance},
                   {"iqr_weak_distance", r.iqr_distance},
                   {"wall_seconds", r.wall_seconds},
                   {"total_events", r.total_events},
                   {"failed_replicas", r.failed_replicas}});
  return arr;
}

}  // namespace ydsim
