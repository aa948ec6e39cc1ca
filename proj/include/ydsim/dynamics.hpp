#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ydsim/diagrams.hpp"
#include "ydsim/ensembles.hpp"
#include "ydsim/grid.hpp"
#include "ydsim/rng.hpp"

namespace ydsim {

// Directions of a single generator transition. Up/Down move a diagram row
// (equivalently an exclusion particle jumping right/left); Create and
// Annihilate are the reservoir moves at the boundary.
enum class MoveKind { Up, Down, Create, Annihilate };

// target is a row index (partition pictures) or the left site of the
// exchanged edge / the boundary site (exclusion pictures).
struct Move {
  std::int64_t target;
  MoveKind kind;
  double rate;
  friend bool operator==(const Move&, const Move&) = default;
};

struct MoveList {
  std::vector<Move> entries;
  double total_rate = 0.0;
};

// All transitions out of a state, in canonical order: rate-eps moves
// (row/site ascending, creation last), then rate-1 moves (row/site
// ascending, annihilation last). Every entry applied to the state yields a
// valid state of the same statistics.
MoveList enumerate_moves_u(const Partition& p, double eps);
MoveList enumerate_moves_r(const StrictPartition& q, double eps);
MoveList enumerate_moves_z(const ConfigZ& c, double eps);
MoveList enumerate_moves_n(const ConfigN& c, double eps);

Partition apply_move(const Partition& p, const Move& m);
StrictPartition apply_move(const StrictPartition& q, const Move& m);
ConfigZ apply_move(const ConfigZ& c, const Move& m);
ConfigN apply_move(const ConfigN& c, const Move& m);

// Index of the entry selected by a point r in [0, total_rate), by
// cumulative scan in entry order.
std::size_t select_move(const MoveList& moves, double r);

// One exact jump of the chain accelerated by speed_factor: waiting time is
// exponential with rate total_rate * speed_factor, the move is chosen with
// probability rate / total_rate. Throws NumericalError on an absorbing
// state (total_rate == 0, possible only at eps == 0).
template <typename State>
std::pair<State, double> step(const State& state, const MoveList& moves, UnitSource& rng,
                              double speed_factor);

enum class ProcessKind { PartitionU, StrictRU, ExclusionZ, ExclusionN };

const char* process_name(ProcessKind k);
ProcessKind process_from_name(const std::string& name);

using SimState = std::variant<Partition, StrictPartition, ConfigZ, ConfigN>;

std::int64_t state_area(const SimState& s);
std::int64_t state_rows(const SimState& s);

struct GridSpec {
  double xmin = 0.0;
  double h = 1.0;
  std::size_t n = 0;
};

enum class ObservableKind {
  Area,
  RowCount,
  TotalMass,
  BoundaryOccupation,
  BoundaryTimeIntegral,
  ScaledHeight,
  HopfCole,
};

struct ObservableSpec {
  ObservableKind kind;
  GridSpec grid{};  // used by ScaledHeight and HopfCole
};

// A simulation request: process at generator speed N^2 with parameter
// epsilon, run to the horizon, sampled at the given record times.
struct SimRun {
  std::int64_t n_scale = 1;
  double epsilon = 0.5;
  double horizon = 1.0;
  std::vector<double> record_times;
  std::uint64_t seed = 0;
  ProcessKind process = ProcessKind::PartitionU;
  std::uint64_t event_cap = 1'000'000'000;

  void validate() const;
};

struct FieldChannel {
  std::string name;
  GridSpec grid;
  std::vector<std::vector<double>> rows;  // one row per record time
};

struct ObservableSeries {
  std::vector<double> times;
  std::vector<std::pair<std::string, std::vector<double>>> scalars;
  std::vector<FieldChannel> fields;
  std::uint64_t event_count = 0;
  std::string rng_algorithm;
};

// Exact event-driven trajectory; snapshots of the requested observables at
// every record time. Bitwise reproducible for a fixed (run, initial).
// The initial state type must match run.process.
ObservableSeries simulate(const SimRun& run, const SimState& initial,
                          const std::vector<ObservableSpec>& observables);

// --- observables ------------------------------------------------------

GridField scaled_height_field(const Partition& p, std::int64_t n_scale, const GridSpec& g);
GridField scaled_height_field(const StrictPartition& q, std::int64_t n_scale, const GridSpec& g);
GridField scaled_height_field(const SimState& s, std::int64_t n_scale, const GridSpec& g);

// Mass of the scaled empirical measure on the window [a, b].
double empirical_mass(const ConfigZ& c, std::int64_t n_scale, double a, double b);
double empirical_mass(const ConfigN& c, std::int64_t n_scale, double a, double b);

// Scaled total particle number X = (1/N) sum_x eta(x).
double total_mass(const ConfigN& c, std::int64_t n_scale);

int boundary_occupation(const ConfigN& c);

// Interpolated microscopic Hopf-Cole profile: at u the value is
// exp{ -(log eps) [ sum_{y > floor(Nu)} eta(y)
//                   + 1{u >= 1/N} (floor(Nu) + 1 - Nu) eta(floor(Nu)) ] }.
// Non-increasing in u, >= 1, and equal to 1 beyond the last particle.
GridField hopf_cole_profile(const ConfigN& c, double eps, std::int64_t n_scale,
                            const GridSpec& g);

// (1/(t2-t1)) int_{t1}^{t2} eta_s(1) ds, read off the exact occupation-time
// channel of a recorded series; t1 and t2 must be record times.
double time_averaged_boundary(const ObservableSeries& series, double t1, double t2);

// N^2 L applied to the total mass X at a fixed state (sum over the move
// list of rate times increment, accelerated); used to validate the drift
// identity N(1 - 2 eta(1)) - beta_N (1 - eta(1)) with beta_N = N(1 - eps).
double generator_drift_of_total_mass(const ConfigN& c, double eps, std::int64_t n_scale);

// --- engines ----------------------------------------------------------
// In-place event kernels used by simulate(); exposed so tests can compare
// the incremental bookkeeping against enumerate_moves_* recomputation.

class UPartitionEngine {
 public:
  UPartitionEngine(const Partition& init, double eps);
  double total_rate() const;
  void apply_selected(double r);
  Partition snapshot() const;
  std::int64_t block_count() const { return static_cast<std::int64_t>(blocks_.size()); }

 private:
  void up_move(std::size_t b);
  void down_move(std::size_t b);
  void create_row();

  std::vector<PartBlock> blocks_;
  double eps_;
};

class RStrictEngine {
 public:
  RStrictEngine(const StrictPartition& init, double eps);
  double total_rate() const;
  void apply_selected(double r);
  StrictPartition snapshot() const;
  std::int64_t up_count() const { return n_up_; }
  std::int64_t down_count() const { return n_down_; }
  bool create_allowed() const { return create_ok_; }

 private:
  bool up_ok(std::size_t i) const;
  bool down_ok(std::size_t i) const;
  void refresh(std::size_t i);
  void refresh_window(std::size_t i);
  void resize_flags();

  std::vector<std::int64_t> parts_;  // strictly decreasing
  std::vector<std::uint8_t> up_flag_, down_flag_;
  std::int64_t n_up_ = 0, n_down_ = 0;
  bool create_ok_ = true;
  double eps_;
};

class ZExclusionEngine {
 public:
  ZExclusionEngine(const ConfigZ& init, double eps);
  double total_rate() const;
  void apply_selected(double r);
  ConfigZ snapshot() const;
  std::int64_t right_edge_count() const { return static_cast<std::int64_t>(right_edges_.size()); }
  std::int64_t left_edge_count() const { return static_cast<std::int64_t>(left_edges_.size()); }

 private:
  bool occupied(std::int64_t x) const;
  void set_occupied(std::int64_t x, bool occ);
  void refresh_edge(std::int64_t x);
  void swap_edge(std::int64_t x, bool right_jump);

  std::vector<std::int64_t> holes_;       // sorted, <= 0
  std::vector<std::int64_t> particles_;   // sorted, >= 1
  std::vector<std::int64_t> right_edges_; // x with eta(x)=1, eta(x+1)=0
  std::vector<std::int64_t> left_edges_;  // x with eta(x)=0, eta(x+1)=1
  double eps_;
};

class NExclusionEngine {
 public:
  NExclusionEngine(const ConfigN& init, double eps);
  double total_rate() const;
  void apply_selected(double r);
  ConfigN snapshot() const;
  int boundary_occupation() const { return site_one_ ? 1 : 0; }
  std::int64_t right_edge_count() const { return static_cast<std::int64_t>(right_edges_.size()); }
  std::int64_t left_edge_count() const { return static_cast<std::int64_t>(left_edges_.size()); }

 private:
  bool occupied(std::int64_t x) const;
  void set_occupied(std::int64_t x, bool occ);
  void refresh_edge(std::int64_t x);
  void swap_edge(std::int64_t x, bool right_jump);
  void flip_boundary();

  std::vector<std::int64_t> occupied_;    // sorted, >= 1
  std::vector<std::int64_t> right_edges_;
  std::vector<std::int64_t> left_edges_;
  bool site_one_ = false;
  double eps_;
};

}  // namespace ydsim
