#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ydsim/dynamics.hpp"
#include "ydsim/ensembles.hpp"
#include "ydsim/grid.hpp"
#include "ydsim/pde.hpp"

namespace ydsim {

enum class InitialKind { StationarySample, Vershik, PerturbedVershik, ProfileCsv };

const char* initial_kind_name(InitialKind k);
InitialKind initial_kind_from_name(const std::string& name);

// A convergence experiment: for each N, sample or build matched initial
// data, run replicas at speed N^2, and measure weak distances between the
// scaled heights and the matched PDE solution at the record times.
struct ExperimentConfig {
  Statistics statistics = Statistics::U;
  std::vector<std::int64_t> n_list{32, 64};
  int replicas = 8;
  std::vector<double> record_times{0.25, 0.5, 1.0};
  InitialKind initial = InitialKind::StationarySample;
  int perturb_variant = 1;           // PerturbedVershik only
  std::string profile_csv;           // ProfileCsv only
  std::string family_id = "bump3-v1";
  PdeConfig pde{};
  std::uint64_t master_seed = 1;
  std::string out_dir;
  int threads = 1;

  void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

// version / seed / rng id / config hash block echoed into every output.
nlohmann::json run_metadata(const ExperimentConfig& cfg);

struct ConvergenceRow {
  std::int64_t n_scale = 0;
  double time = 0.0;
  double epsilon = 0.0;
  double median_distance = 0.0;
  double iqr_distance = 0.0;
  double wall_seconds = 0.0;
  std::uint64_t total_events = 0;
  int failed_replicas = 0;
};

// Fixed versioned test-function family ("bump3-v1"): three smooth bumps of
// unit integral supported on [0.2,1], [0.5,2] and [1,4].
struct TestFunction {
  double support_lo;
  double support_hi;
  std::function<double(double)> eval;
};
const std::vector<TestFunction>& test_function_family();

// max over the family of |int f (a - b)|, trapezoid on the common grid of
// a and b; the grid must cover every support.
double weak_distance(const GridField& height, const GridField& reference);

// Quantile construction of a microstate whose scaled height tracks psi0:
// p_i = round(N psi0^{-1}((i - 1/2)/N)), clamped non-increasing; the RU
// variant repairs duplicates by decrementing them downward.
Partition build_initial_microstate_u(const GridField& psi0, std::int64_t n_scale);
StrictPartition build_initial_microstate_r(const GridField& psi0, std::int64_t n_scale);
SimState build_initial_microstate(const GridField& psi0, std::int64_t n_scale,
                                  Statistics statistics);

// Deterministic replica seeding: per-N run seed, then the documented
// xor rule for replica streams.
std::uint64_t run_seed_for(std::uint64_t master, std::int64_t n_scale);
std::uint64_t replica_seed(std::uint64_t run_seed, int replica_index);

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg);

std::string rows_to_csv(const std::vector<ConvergenceRow>& rows);
nlohmann::json rows_to_json(const std::vector<ConvergenceRow>& rows);

}  // namespace ydsim
