#include "ydsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace ydsim {

namespace {

void require_rate_parameter(double eps) {
  if (!(eps >= 0.0 && eps < 1.0))
    throw std::invalid_argument("jump-rate parameter must satisfy 0 <= eps < 1");
}

// Both statistics only ever produce rates eps and 1; summing the two
// categories keeps the total exactly reproducible from the counts.
double category_total(double eps, std::int64_t n_eps, std::int64_t n_unit) {
  return eps * static_cast<double>(n_eps) + static_cast<double>(n_unit);
}

}  // namespace

MoveList enumerate_moves_u(const Partition& p, double eps) {
  require_rate_parameter(eps);
  MoveList ml;
  const auto& blocks = p.blocks();
  ml.entries.reserve(2 * blocks.size() + 1);
  std::int64_t first_row = 1;
  std::vector<std::pair<std::int64_t, std::int64_t>> block_rows;  // (last row, value)
  block_rows.reserve(blocks.size());
  for (const auto& b : blocks) {
    // the top row of every block can always grow: the previous part is
    // strictly larger (or p_0 = infinity)
    ml.entries.push_back({first_row, MoveKind::Up, eps});
    block_rows.emplace_back(first_row + b.mult - 1, b.value);
    first_row += b.mult;
  }
  ml.entries.push_back({p.row_count() + 1, MoveKind::Create, eps});
  for (const auto& [last_row, value] : block_rows)
    ml.entries.push_back({last_row, value == 1 ? MoveKind::Annihilate : MoveKind::Down, 1.0});
  const auto d = static_cast<std::int64_t>(blocks.size());
  ml.total_rate = category_total(eps, d + 1, d);
  return ml;
}

MoveList enumerate_moves_r(const StrictPartition& q, double eps) {
  require_rate_parameter(eps);
  MoveList ml;
  const auto& parts = q.parts();
  const auto rows = static_cast<std::int64_t>(parts.size());
  std::int64_t n_eps = 0, n_unit = 0;
  for (std::int64_t i = 1; i <= rows; ++i) {
    const std::int64_t above = i == 1 ? -1 : parts[i - 2];  // -1 stands for infinity
    if (i == 1 || above > parts[i - 1] + 1) {
      ml.entries.push_back({i, MoveKind::Up, eps});
      ++n_eps;
    }
  }
  if (rows == 0 || parts.back() > 1) {
    ml.entries.push_back({rows + 1, MoveKind::Create, eps});
    ++n_eps;
  }
  for (std::int64_t i = 1; i <= rows; ++i) {
    const std::int64_t below = i < rows ? parts[i] : 0;
    if (parts[i - 1] == 1) {
      ml.entries.push_back({i, MoveKind::Annihilate, 1.0});
      ++n_unit;
    } else if (parts[i - 1] > below + 1) {
      ml.entries.push_back({i, MoveKind::Down, 1.0});
      ++n_unit;
    }
  }
  ml.total_rate = category_total(eps, n_eps, n_unit);
  return ml;
}

MoveList enumerate_moves_z(const ConfigZ& c, double eps) {
  require_rate_parameter(eps);
  MoveList ml;
  const std::int64_t lo = c.holes_left().empty() ? 0 : c.holes_left().front() - 1;
  const std::int64_t hi = c.particles_right().empty() ? 0 : c.particles_right().back();
  std::int64_t n_eps = 0, n_unit = 0;
  std::vector<std::int64_t> left_targets;
  for (std::int64_t x = lo; x <= hi; ++x) {
    const bool here = c.occupied(x);
    const bool next = c.occupied(x + 1);
    if (here && !next) {
      ml.entries.push_back({x, MoveKind::Up, eps});
      ++n_eps;
    } else if (!here && next) {
      left_targets.push_back(x);
      ++n_unit;
    }
  }
  for (std::int64_t x : left_targets) ml.entries.push_back({x, MoveKind::Down, 1.0});
  ml.total_rate = category_total(eps, n_eps, n_unit);
  return ml;
}

MoveList enumerate_moves_n(const ConfigN& c, double eps) {
  require_rate_parameter(eps);
  MoveList ml;
  std::int64_t n_eps = 0, n_unit = 0;
  const auto& occ = c.occupied_sites();
  for (std::int64_t x : occ) {
    if (!c.occupied(x + 1)) {
      ml.entries.push_back({x, MoveKind::Up, eps});
      ++n_eps;
    }
  }
  const bool site_one = c.occupied(1);
  if (!site_one) {
    ml.entries.push_back({1, MoveKind::Create, eps});
    ++n_eps;
  }
  for (std::int64_t y : occ) {
    if (y >= 2 && !c.occupied(y - 1)) {
      ml.entries.push_back({y - 1, MoveKind::Down, 1.0});
      ++n_unit;
    }
  }
  if (site_one) {
    ml.entries.push_back({1, MoveKind::Annihilate, 1.0});
    ++n_unit;
  }
  ml.total_rate = category_total(eps, n_eps, n_unit);
  return ml;
}

Partition apply_move(const Partition& p, const Move& m) {
  auto parts = p.parts();
  const auto rows = static_cast<std::int64_t>(parts.size());
  const std::int64_t i = m.target;
  switch (m.kind) {
    case MoveKind::Up: {
      if (i < 1 || i > rows) throw std::invalid_argument("up move: row index out of range");
      const std::int64_t above = i == 1 ? parts[0] + 1 : parts[i - 2];
      if (!(above > parts[i - 1])) throw std::invalid_argument("up move blocked");
      parts[i - 1] += 1;
      break;
    }
    case MoveKind::Create:
      if (i != rows + 1) throw std::invalid_argument("creation must target row n+1");
      parts.push_back(1);
      break;
    case MoveKind::Down:
    case MoveKind::Annihilate: {
      if (i < 1 || i > rows) throw std::invalid_argument("down move: row index out of range");
      const std::int64_t below = i < rows ? parts[i] : 0;
      if (!(parts[i - 1] > below)) throw std::invalid_argument("down move blocked");
      parts[i - 1] -= 1;
      if (parts[i - 1] == 0) parts.pop_back();
      break;
    }
  }
  return Partition::from_parts(std::move(parts));
}

StrictPartition apply_move(const StrictPartition& q, const Move& m) {
  auto parts = q.parts();
  const auto rows = static_cast<std::int64_t>(parts.size());
  const std::int64_t i = m.target;
  switch (m.kind) {
    case MoveKind::Up: {
      if (i < 1 || i > rows) throw std::invalid_argument("up move: row index out of range");
      if (i > 1 && !(parts[i - 2] > parts[i - 1] + 1))
        throw std::invalid_argument("up move blocked (gap condition)");
      parts[i - 1] += 1;
      break;
    }
    case MoveKind::Create:
      if (i != rows + 1) throw std::invalid_argument("creation must target row n+1");
      if (rows > 0 && parts.back() == 1) throw std::invalid_argument("creation blocked: site 1 occupied");
      parts.push_back(1);
      break;
    case MoveKind::Down:
    case MoveKind::Annihilate: {
      if (i < 1 || i > rows) throw std::invalid_argument("down move: row index out of range");
      const std::int64_t below = i < rows ? parts[i] : 0;
      if (parts[i - 1] == 1) {
        parts.pop_back();
      } else if (parts[i - 1] > below + 1) {
        parts[i - 1] -= 1;
      } else {
        throw std::invalid_argument("down move blocked (gap condition)");
      }
      break;
    }
  }
  return StrictPartition::from_parts(std::move(parts));
}

namespace {

ConfigZ swap_config_z(const ConfigZ& c, std::int64_t x, bool right_jump) {
  auto holes = c.holes_left();
  auto particles = c.particles_right();
  const auto set_site = [&](std::int64_t site, bool occ) {
    if (site <= 0) {
      auto it = std::lower_bound(holes.begin(), holes.end(), site);
      if (occ) {
        if (it == holes.end() || *it != site)
          throw std::invalid_argument("exchange move blocked");
        holes.erase(it);
      } else {
        if (it != holes.end() && *it == site)
          throw std::invalid_argument("exchange move blocked");
        holes.insert(it, site);
      }
    } else {
      auto it = std::lower_bound(particles.begin(), particles.end(), site);
      if (occ) {
        if (it != particles.end() && *it == site)
          throw std::invalid_argument("exchange move blocked");
        particles.insert(it, site);
      } else {
        if (it == particles.end() || *it != site)
          throw std::invalid_argument("exchange move blocked");
        particles.erase(it);
      }
    }
  };
  if (right_jump) {
    if (!(c.occupied(x) && !c.occupied(x + 1))) throw std::invalid_argument("right jump blocked");
    set_site(x, false);
    set_site(x + 1, true);
  } else {
    if (!(!c.occupied(x) && c.occupied(x + 1))) throw std::invalid_argument("left jump blocked");
    set_site(x + 1, false);
    set_site(x, true);
  }
  return ConfigZ::from_deviations(std::move(holes), std::move(particles));
}

}  // namespace

ConfigZ apply_move(const ConfigZ& c, const Move& m) {
  switch (m.kind) {
    case MoveKind::Up:
      return swap_config_z(c, m.target, true);
    case MoveKind::Down:
      return swap_config_z(c, m.target, false);
    default:
      throw std::invalid_argument("Z-configuration has no reservoir moves");
  }
}

ConfigN apply_move(const ConfigN& c, const Move& m) {
  auto occ = c.occupied_sites();
  const auto set_site = [&](std::int64_t site, bool value) {
    auto it = std::lower_bound(occ.begin(), occ.end(), site);
    const bool present = it != occ.end() && *it == site;
    if (value == present) throw std::invalid_argument("exclusion move blocked");
    if (value)
      occ.insert(it, site);
    else
      occ.erase(it);
  };
  switch (m.kind) {
    case MoveKind::Up:
      if (!(c.occupied(m.target) && !c.occupied(m.target + 1)))
        throw std::invalid_argument("right jump blocked");
      set_site(m.target, false);
      set_site(m.target + 1, true);
      break;
    case MoveKind::Down:
      if (m.target < 1 || !(!c.occupied(m.target) && c.occupied(m.target + 1)))
        throw std::invalid_argument("left jump blocked");
      set_site(m.target + 1, false);
      set_site(m.target, true);
      break;
    case MoveKind::Create:
      if (m.target != 1) throw std::invalid_argument("creation targets site 1");
      set_site(1, true);
      break;
    case MoveKind::Annihilate:
      if (m.target != 1) throw std::invalid_argument("annihilation targets site 1");
      set_site(1, false);
      break;
  }
  return ConfigN::from_occupied(std::move(occ));
}

std::size_t select_move(const MoveList& moves, double r) {
  double acc = 0.0;
  std::size_t last_positive = moves.entries.size();
  for (std::size_t k = 0; k < moves.entries.size(); ++k) {
    const double rate = moves.entries[k].rate;
    acc += rate;
    if (rate > 0.0) {
      last_positive = k;
      if (r < acc) return k;
    }
  }
  if (last_positive == moves.entries.size())
    throw NumericalError("select_move: no move with positive rate");
  return last_positive;  // rounding spill at the upper end
}

template <typename State>
std::pair<State, double> step(const State& state, const MoveList& moves, UnitSource& rng,
                              double speed_factor) {
  if (!(moves.total_rate > 0.0))
    throw NumericalError("step: absorbing state (total rate is zero)");
  const double wait = exponential_variate(rng, moves.total_rate * speed_factor);
  const double r = rng.next_unit() * moves.total_rate;
  const Move& chosen = moves.entries[select_move(moves, r)];
  return {apply_move(state, chosen), wait};
}

template std::pair<Partition, double> step(const Partition&, const MoveList&, UnitSource&, double);
template std::pair<StrictPartition, double> step(const StrictPartition&, const MoveList&,
                                                 UnitSource&, double);
template std::pair<ConfigZ, double> step(const ConfigZ&, const MoveList&, UnitSource&, double);
template std::pair<ConfigN, double> step(const ConfigN&, const MoveList&, UnitSource&, double);

const char* process_name(ProcessKind k) {
  switch (k) {
    case ProcessKind::PartitionU: return "partition-u";
    case ProcessKind::StrictRU: return "strict-ru";
    case ProcessKind::ExclusionZ: return "exclusion-z";
    case ProcessKind::ExclusionN: return "exclusion-n";
  }
  return "?";
}

ProcessKind process_from_name(const std::string& name) {
  if (name == "partition-u") return ProcessKind::PartitionU;
  if (name == "strict-ru") return ProcessKind::StrictRU;
  if (name == "exclusion-z") return ProcessKind::ExclusionZ;
  if (name == "exclusion-n") return ProcessKind::ExclusionN;
  throw std::invalid_argument("unknown process: " + name);
}

std::int64_t state_area(const SimState& s) {
  struct Visitor {
    std::int64_t operator()(const Partition& p) const { return p.area(); }
    std::int64_t operator()(const StrictPartition& q) const { return q.area(); }
    std::int64_t operator()(const ConfigZ& c) const { return config_z_to_partition(c).area(); }
    std::int64_t operator()(const ConfigN& c) const {
      std::int64_t a = 0;
      for (std::int64_t x : c.occupied_sites()) a += x;
      return a;
    }
  };
  return std::visit(Visitor{}, s);
}

std::int64_t state_rows(const SimState& s) {
  struct Visitor {
    std::int64_t operator()(const Partition& p) const { return p.row_count(); }
    std::int64_t operator()(const StrictPartition& q) const { return q.row_count(); }
    std::int64_t operator()(const ConfigZ& c) const { return config_z_to_partition(c).row_count(); }
    std::int64_t operator()(const ConfigN& c) const { return c.particle_count(); }
  };
  return std::visit(Visitor{}, s);
}

void SimRun::validate() const {
  if (n_scale < 1) throw std::invalid_argument("SimRun: N must be >= 1");
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw std::invalid_argument("SimRun: epsilon must be in [0, 1)");
  if (!(horizon >= 0.0)) throw std::invalid_argument("SimRun: horizon must be >= 0");
  if (event_cap < 1) throw std::invalid_argument("SimRun: event cap must be >= 1");
  double prev = 0.0;
  for (double t : record_times) {
    if (t < prev || t < 0.0 || t > horizon)
      throw std::invalid_argument("SimRun: record times must be sorted within [0, horizon]");
    prev = t;
  }
}

// --- engines ----------------------------------------------------------

UPartitionEngine::UPartitionEngine(const Partition& init, double eps)
    : blocks_(init.blocks()), eps_(eps) {
  require_rate_parameter(eps);
}

double UPartitionEngine::total_rate() const {
  const auto d = static_cast<std::int64_t>(blocks_.size());
  return category_total(eps_, d + 1, d);
}

Partition UPartitionEngine::snapshot() const { return Partition::from_blocks(blocks_); }

void UPartitionEngine::apply_selected(double r) {
  const std::size_t d = blocks_.size();
  double acc = 0.0;
  if (eps_ > 0.0) {
    for (std::size_t b = 0; b < d; ++b) {
      acc += eps_;
      if (r < acc) {
        up_move(b);
        return;
      }
    }
    acc += eps_;
    if (r < acc) {
      create_row();
      return;
    }
  }
  for (std::size_t b = 0; b < d; ++b) {
    acc += 1.0;
    if (r < acc) {
      down_move(b);
      return;
    }
  }
  // rounding spill: fall back to the last positive-rate move
  if (d > 0)
    down_move(d - 1);
  else
    create_row();
}

void UPartitionEngine::up_move(std::size_t b) {
  auto& blk = blocks_[b];
  const std::int64_t v = blk.value;
  const bool merge_prev = b > 0 && blocks_[b - 1].value == v + 1;
  if (blk.mult == 1) {
    if (merge_prev) {
      blocks_[b - 1].mult += 1;
      blocks_.erase(blocks_.begin() + static_cast<std::ptrdiff_t>(b));
    } else {
      blk.value = v + 1;
    }
  } else {
    blk.mult -= 1;
    if (merge_prev)
      blocks_[b - 1].mult += 1;
    else
      blocks_.insert(blocks_.begin() + static_cast<std::ptrdiff_t>(b), PartBlock{v + 1, 1});
  }
}

void UPartitionEngine::down_move(std::size_t b) {
  auto& blk = blocks_[b];
  const std::int64_t v = blk.value;
  if (v == 1) {  // annihilation at the reservoir
    blk.mult -= 1;
    if (blk.mult == 0) blocks_.pop_back();
    return;
  }
  const bool merge_next = b + 1 < blocks_.size() && blocks_[b + 1].value == v - 1;
  if (blk.mult == 1) {
    if (merge_next) {
      blocks_[b + 1].mult += 1;
      blocks_.erase(blocks_.begin() + static_cast<std::ptrdiff_t>(b));
    } else {
      blk.value = v - 1;
    }
  } else {
    blk.mult -= 1;
    if (merge_next)
      blocks_[b + 1].mult += 1;
    else
      blocks_.insert(blocks_.begin() + static_cast<std::ptrdiff_t>(b + 1), PartBlock{v - 1, 1});
  }
}

void UPartitionEngine::create_row() {
  if (!blocks_.empty() && blocks_.back().value == 1)
    blocks_.back().mult += 1;
  else
    blocks_.push_back(PartBlock{1, 1});
}

RStrictEngine::RStrictEngine(const StrictPartition& init, double eps)
    : parts_(init.parts()), eps_(eps) {
  require_rate_parameter(eps);
  resize_flags();
  for (std::size_t i = 1; i <= parts_.size(); ++i) refresh(i);
  create_ok_ = parts_.empty() || parts_.back() > 1;
}

void RStrictEngine::resize_flags() {
  up_flag_.assign(parts_.size(), 0);
  down_flag_.assign(parts_.size(), 0);
  n_up_ = 0;
  n_down_ = 0;
}

bool RStrictEngine::up_ok(std::size_t i) const {
  return i == 1 || parts_[i - 2] > parts_[i - 1] + 1;
}

bool RStrictEngine::down_ok(std::size_t i) const {
  const std::int64_t below = i < parts_.size() ? parts_[i] : 0;
  return parts_[i - 1] == 1 || parts_[i - 1] > below + 1;
}

void RStrictEngine::refresh(std::size_t i) {
  const bool u = up_ok(i);
  const bool d = down_ok(i);
  n_up_ += static_cast<std::int64_t>(u) - up_flag_[i - 1];
  n_down_ += static_cast<std::int64_t>(d) - down_flag_[i - 1];
  up_flag_[i - 1] = u ? 1 : 0;
  down_flag_[i - 1] = d ? 1 : 0;
}

void RStrictEngine::refresh_window(std::size_t i) {
  for (std::size_t j = i > 1 ? i - 1 : 1; j <= i + 1 && j <= parts_.size(); ++j) refresh(j);
  create_ok_ = parts_.empty() || parts_.back() > 1;
}

double RStrictEngine::total_rate() const {
  return category_total(eps_, n_up_ + (create_ok_ ? 1 : 0), n_down_);
}

StrictPartition RStrictEngine::snapshot() const {
  return StrictPartition::from_parts(parts_);
}

void RStrictEngine::apply_selected(double r) {
  double acc = 0.0;
  enum class Fallback { None, Up, Create, Down } last = Fallback::None;
  std::size_t last_i = 0;
  const auto rows = parts_.size();
  if (eps_ > 0.0) {
    for (std::size_t i = 1; i <= rows; ++i) {
      if (!up_flag_[i - 1]) continue;
      acc += eps_;
      last = Fallback::Up;
      last_i = i;
      if (r < acc) break;
    }
    if (last == Fallback::Up && r < acc) {
      parts_[last_i - 1] += 1;
      refresh_window(last_i);
      return;
    }
    if (create_ok_) {
      acc += eps_;
      last = Fallback::Create;
      if (r < acc) {
        parts_.push_back(1);
        up_flag_.push_back(0);
        down_flag_.push_back(0);
        refresh_window(parts_.size());
        return;
      }
    }
  }
  for (std::size_t i = 1; i <= rows; ++i) {
    if (!down_flag_[i - 1]) continue;
    acc += 1.0;
    last = Fallback::Down;
    last_i = i;
    if (r < acc) break;
  }
  if (last == Fallback::Down || last == Fallback::None) {
    if (last == Fallback::None) throw NumericalError("RStrictEngine: no available move");
    // either selected or rounding spill onto the last down move
    if (parts_[last_i - 1] == 1) {
      // only the last part can equal 1; annihilation shrinks the state
      parts_.pop_back();
      n_up_ -= up_flag_.back();
      n_down_ -= down_flag_.back();
      up_flag_.pop_back();
      down_flag_.pop_back();
      if (!parts_.empty()) refresh_window(parts_.size());
      create_ok_ = parts_.empty() || parts_.back() > 1;
    } else {
      parts_[last_i - 1] -= 1;
      refresh_window(last_i);
    }
    return;
  }
  if (last == Fallback::Create) {  // spill onto creation
    parts_.push_back(1);
    up_flag_.push_back(0);
    down_flag_.push_back(0);
    refresh_window(parts_.size());
    return;
  }
  // spill onto the last up move
  parts_[last_i - 1] += 1;
  refresh_window(last_i);
}

ZExclusionEngine::ZExclusionEngine(const ConfigZ& init, double eps)
    : holes_(init.holes_left()), particles_(init.particles_right()), eps_(eps) {
  require_rate_parameter(eps);
  const std::int64_t lo = holes_.empty() ? 0 : holes_.front() - 1;
  const std::int64_t hi = particles_.empty() ? 0 : particles_.back();
  for (std::int64_t x = lo; x <= hi; ++x) refresh_edge(x);
}

bool ZExclusionEngine::occupied(std::int64_t x) const {
  if (x <= 0) return !std::binary_search(holes_.begin(), holes_.end(), x);
  return std::binary_search(particles_.begin(), particles_.end(), x);
}

void ZExclusionEngine::set_occupied(std::int64_t x, bool occ) {
  if (x <= 0) {
    auto it = std::lower_bound(holes_.begin(), holes_.end(), x);
    if (occ)
      holes_.erase(it);
    else
      holes_.insert(it, x);
  } else {
    auto it = std::lower_bound(particles_.begin(), particles_.end(), x);
    if (occ)
      particles_.insert(it, x);
    else
      particles_.erase(it);
  }
}

void ZExclusionEngine::refresh_edge(std::int64_t x) {
  const bool here = occupied(x);
  const bool next = occupied(x + 1);
  const auto sync = [x](std::vector<std::int64_t>& edges, bool want) {
    auto it = std::lower_bound(edges.begin(), edges.end(), x);
    const bool present = it != edges.end() && *it == x;
    if (want && !present) edges.insert(it, x);
    if (!want && present) edges.erase(it);
  };
  sync(right_edges_, here && !next);
  sync(left_edges_, !here && next);
}

double ZExclusionEngine::total_rate() const {
  return category_total(eps_, right_edge_count(), left_edge_count());
}

ConfigZ ZExclusionEngine::snapshot() const {
  return ConfigZ::from_deviations(holes_, particles_);
}

void ZExclusionEngine::swap_edge(std::int64_t x, bool right_jump) {
  if (right_jump) {
    set_occupied(x, false);
    set_occupied(x + 1, true);
  } else {
    set_occupied(x + 1, false);
    set_occupied(x, true);
  }
  refresh_edge(x - 1);
  refresh_edge(x);
  refresh_edge(x + 1);
}

void ZExclusionEngine::apply_selected(double r) {
  double acc = 0.0;
  if (eps_ > 0.0) {
    for (std::int64_t x : right_edges_) {
      acc += eps_;
      if (r < acc) {
        swap_edge(x, true);
        return;
      }
    }
  }
  for (std::int64_t x : left_edges_) {
    acc += 1.0;
    if (r < acc) {
      swap_edge(x, false);
      return;
    }
  }
  if (!left_edges_.empty())
    swap_edge(left_edges_.back(), false);
  else if (!right_edges_.empty())
    swap_edge(right_edges_.back(), true);
  else
    throw NumericalError("ZExclusionEngine: no available move");
}

NExclusionEngine::NExclusionEngine(const ConfigN& init, double eps)
    : occupied_(init.occupied_sites()), eps_(eps) {
  require_rate_parameter(eps);
  site_one_ = init.occupied(1);
  for (std::int64_t x : occupied_) {
    if (!occupied(x + 1)) right_edges_.push_back(x);
    if (x >= 2 && !occupied(x - 1)) left_edges_.push_back(x - 1);
  }
}

bool NExclusionEngine::occupied(std::int64_t x) const {
  return std::binary_search(occupied_.begin(), occupied_.end(), x);
}

void NExclusionEngine::set_occupied(std::int64_t x, bool occ) {
  auto it = std::lower_bound(occupied_.begin(), occupied_.end(), x);
  if (occ)
    occupied_.insert(it, x);
  else
    occupied_.erase(it);
  if (x == 1) site_one_ = occ;
}

void NExclusionEngine::refresh_edge(std::int64_t x) {
  if (x < 1) return;
  const bool here = occupied(x);
  const bool next = occupied(x + 1);
  const auto sync = [x](std::vector<std::int64_t>& edges, bool want) {
    auto it = std::lower_bound(edges.begin(), edges.end(), x);
    const bool present = it != edges.end() && *it == x;
    if (want && !present) edges.insert(it, x);
    if (!want && present) edges.erase(it);
  };
  sync(right_edges_, here && !next);
  sync(left_edges_, !here && next);
}

double NExclusionEngine::total_rate() const {
  return category_total(eps_, right_edge_count() + (site_one_ ? 0 : 1),
                        left_edge_count() + (site_one_ ? 1 : 0));
}

ConfigN NExclusionEngine::snapshot() const { return ConfigN::from_occupied(occupied_); }

void NExclusionEngine::swap_edge(std::int64_t x, bool right_jump) {
  if (right_jump) {
    set_occupied(x, false);
    set_occupied(x + 1, true);
  } else {
    set_occupied(x + 1, false);
    set_occupied(x, true);
  }
  refresh_edge(x - 1);
  refresh_edge(x);
  refresh_edge(x + 1);
}

void NExclusionEngine::flip_boundary() {
  set_occupied(1, !site_one_);
  refresh_edge(1);
}

void NExclusionEngine::apply_selected(double r) {
  double acc = 0.0;
  if (eps_ > 0.0) {
    for (std::int64_t x : right_edges_) {
      acc += eps_;
      if (r < acc) {
        swap_edge(x, true);
        return;
      }
    }
    if (!site_one_) {
      acc += eps_;
      if (r < acc) {
        flip_boundary();
        return;
      }
    }
  }
  for (std::int64_t x : left_edges_) {
    acc += 1.0;
    if (r < acc) {
      swap_edge(x, false);
      return;
    }
  }
  if (site_one_) {
    flip_boundary();  // selected or rounding spill (last unit-rate move)
    return;
  }
  if (!left_edges_.empty())
    swap_edge(left_edges_.back(), false);
  else if (!site_one_ && eps_ > 0.0)
    flip_boundary();
  else
    throw NumericalError("NExclusionEngine: no available move");
}

// --- simulate ---------------------------------------------------------

namespace {

struct EngineIface {
  virtual double total_rate() const = 0;
  virtual void apply_selected(double r) = 0;
  virtual SimState snapshot() const = 0;
  virtual int boundary_occupation() const { return 0; }
  virtual ~EngineIface() = default;
};

struct UHolder final : EngineIface {
  UPartitionEngine e;
  UHolder(const Partition& p, double eps) : e(p, eps) {}
  double total_rate() const override { return e.total_rate(); }
  void apply_selected(double r) override { e.apply_selected(r); }
  SimState snapshot() const override { return e.snapshot(); }
};

struct RHolder final : EngineIface {
  RStrictEngine e;
  RHolder(const StrictPartition& q, double eps) : e(q, eps) {}
  double total_rate() const override { return e.total_rate(); }
  void apply_selected(double r) override { e.apply_selected(r); }
  SimState snapshot() const override { return e.snapshot(); }
};

struct ZHolder final : EngineIface {
  ZExclusionEngine e;
  ZHolder(const ConfigZ& c, double eps) : e(c, eps) {}
  double total_rate() const override { return e.total_rate(); }
  void apply_selected(double r) override { e.apply_selected(r); }
  SimState snapshot() const override { return e.snapshot(); }
};

struct NHolder final : EngineIface {
  NExclusionEngine e;
  NHolder(const ConfigN& c, double eps) : e(c, eps) {}
  double total_rate() const override { return e.total_rate(); }
  void apply_selected(double r) override { e.apply_selected(r); }
  SimState snapshot() const override { return e.snapshot(); }
  int boundary_occupation() const override { return e.boundary_occupation(); }
};

std::unique_ptr<EngineIface> make_engine(const SimRun& run, const SimState& initial) {
  try {
    switch (run.process) {
      case ProcessKind::PartitionU:
        return std::make_unique<UHolder>(std::get<Partition>(initial), run.epsilon);
      case ProcessKind::StrictRU:
        return std::make_unique<RHolder>(std::get<StrictPartition>(initial), run.epsilon);
      case ProcessKind::ExclusionZ:
        return std::make_unique<ZHolder>(std::get<ConfigZ>(initial), run.epsilon);
      case ProcessKind::ExclusionN:
        return std::make_unique<NHolder>(std::get<ConfigN>(initial), run.epsilon);
    }
  } catch (const std::bad_variant_access&) {
    throw std::invalid_argument("simulate: initial state type does not match the process");
  }
  throw std::invalid_argument("simulate: unknown process");
}

const char* observable_name(ObservableKind k) {
  switch (k) {
    case ObservableKind::Area: return "area";
    case ObservableKind::RowCount: return "rows";
    case ObservableKind::TotalMass: return "total_mass";
    case ObservableKind::BoundaryOccupation: return "boundary_occupation";
    case ObservableKind::BoundaryTimeIntegral: return "boundary_time_integral";
    case ObservableKind::ScaledHeight: return "scaled_height";
    case ObservableKind::HopfCole: return "hopf_cole";
  }
  return "?";
}

bool is_field(ObservableKind k) {
  return k == ObservableKind::ScaledHeight || k == ObservableKind::HopfCole;
}

bool needs_exclusion_n(ObservableKind k) {
  switch (k) {
    case ObservableKind::TotalMass:
    case ObservableKind::BoundaryOccupation:
    case ObservableKind::BoundaryTimeIntegral:
    case ObservableKind::HopfCole:
      return true;
    default:
      return false;
  }
}

}  // namespace

ObservableSeries simulate(const SimRun& run, const SimState& initial,
                          const std::vector<ObservableSpec>& observables) {
  run.validate();
  for (std::size_t a = 0; a < observables.size(); ++a) {
    if (needs_exclusion_n(observables[a].kind) && run.process != ProcessKind::ExclusionN)
      throw std::invalid_argument("observable requires the exclusion process on N");
    if (is_field(observables[a].kind) && observables[a].grid.n < 1)
      throw std::invalid_argument("field observable needs a non-empty grid");
    for (std::size_t b = 0; b < a; ++b)
      if (observables[a].kind == observables[b].kind)
        throw std::invalid_argument("duplicate observable request");
  }

  auto engine = make_engine(run, initial);
  Xoshiro256ss rng(run.seed);
  const double speed =
      static_cast<double>(run.n_scale) * static_cast<double>(run.n_scale);

  ObservableSeries series;
  series.rng_algorithm = Xoshiro256ss::kAlgorithmId;
  for (const auto& spec : observables) {
    if (is_field(spec.kind))
      series.fields.push_back({observable_name(spec.kind), spec.grid, {}});
    else
      series.scalars.emplace_back(observable_name(spec.kind), std::vector<double>{});
  }

  double occupation_integral = 0.0;
  const auto emit = [&](double rt) {
    series.times.push_back(rt);
    const SimState snap = engine->snapshot();
    std::size_t si = 0, fi = 0;
    for (const auto& spec : observables) {
      if (is_field(spec.kind)) {
        GridField field = spec.kind == ObservableKind::ScaledHeight
                              ? scaled_height_field(snap, run.n_scale, spec.grid)
                              : hopf_cole_profile(std::get<ConfigN>(snap), run.epsilon,
                                                  run.n_scale, spec.grid);
        series.fields[fi++].rows.push_back(std::move(field.values));
      } else {
        double v = 0.0;
        switch (spec.kind) {
          case ObservableKind::Area: v = static_cast<double>(state_area(snap)); break;
          case ObservableKind::RowCount: v = static_cast<double>(state_rows(snap)); break;
          case ObservableKind::TotalMass:
            v = total_mass(std::get<ConfigN>(snap), run.n_scale);
            break;
          case ObservableKind::BoundaryOccupation:
            v = static_cast<double>(engine->boundary_occupation());
            break;
          case ObservableKind::BoundaryTimeIntegral: v = occupation_integral; break;
          default: break;
        }
        series.scalars[si++].second.push_back(v);
      }
    }
  };

  std::size_t ri = 0;
  double t = 0.0;
  double t_mark = 0.0;
  std::uint64_t events = 0;
  while (ri < run.record_times.size()) {
    const double rate = engine->total_rate();
    if (!(rate > 0.0)) {
      // absorbing state: every remaining record sees the frozen state
      while (ri < run.record_times.size()) {
        const double rt = run.record_times[ri++];
        occupation_integral +=
            static_cast<double>(engine->boundary_occupation()) * (rt - t_mark);
        t_mark = rt;
        emit(rt);
      }
      break;
    }
    const double dt = exponential_variate(rng, rate * speed);
    const double t_next = t + dt;
    while (ri < run.record_times.size() && run.record_times[ri] <= t_next) {
      const double rt = run.record_times[ri++];
      occupation_integral +=
          static_cast<double>(engine->boundary_occupation()) * (rt - t_mark);
      t_mark = rt;
      emit(rt);
    }
    if (ri >= run.record_times.size()) break;
    occupation_integral +=
        static_cast<double>(engine->boundary_occupation()) * (t_next - t_mark);
    t_mark = t_next;
    engine->apply_selected(rng.next_unit() * rate);
    if (++events > run.event_cap)
      throw NumericalError("simulate: event cap exceeded");
    t = t_next;
  }
  series.event_count = events;
  return series;
}

// --- observables ------------------------------------------------------

namespace {

template <typename Diagram>
GridField scaled_height_impl(const Diagram& d, std::int64_t n_scale, const GridSpec& g) {
  if (n_scale < 1) throw std::invalid_argument("scaled height: N must be >= 1");
  if (g.n < 1) throw std::invalid_argument("scaled height: empty grid");
  std::vector<double> vals(g.n);
  const double scale = static_cast<double>(n_scale);
  for (std::size_t k = 0; k < g.n; ++k) {
    const double u = g.xmin + static_cast<double>(k) * g.h;
    vals[k] = height_at(d, scale * u) / scale;
  }
  return GridField(g.xmin, g.h, std::move(vals));
}

}  // namespace

GridField scaled_height_field(const Partition& p, std::int64_t n_scale, const GridSpec& g) {
  return scaled_height_impl(p, n_scale, g);
}

GridField scaled_height_field(const StrictPartition& q, std::int64_t n_scale, const GridSpec& g) {
  return scaled_height_impl(q, n_scale, g);
}

GridField scaled_height_field(const SimState& s, std::int64_t n_scale, const GridSpec& g) {
  struct Visitor {
    std::int64_t n_scale;
    const GridSpec& g;
    GridField operator()(const Partition& p) const { return scaled_height_field(p, n_scale, g); }
    GridField operator()(const StrictPartition& q) const {
      return scaled_height_field(q, n_scale, g);
    }
    GridField operator()(const ConfigZ& c) const {
      return scaled_height_field(config_z_to_partition(c), n_scale, g);
    }
    GridField operator()(const ConfigN& c) const {
      return scaled_height_field(config_n_to_strict(c), n_scale, g);
    }
  };
  return std::visit(Visitor{n_scale, g}, s);
}

namespace {

std::int64_t count_in_range(const std::vector<std::int64_t>& sorted, std::int64_t lo,
                            std::int64_t hi) {
  if (lo > hi) return 0;
  auto a = std::lower_bound(sorted.begin(), sorted.end(), lo);
  auto b = std::upper_bound(sorted.begin(), sorted.end(), hi);
  return b - a;
}

}  // namespace

double empirical_mass(const ConfigZ& c, std::int64_t n_scale, double a, double b) {
  if (n_scale < 1) throw std::invalid_argument("empirical mass: N must be >= 1");
  const auto xa = static_cast<std::int64_t>(std::ceil(a * static_cast<double>(n_scale)));
  const auto xb = static_cast<std::int64_t>(std::floor(b * static_cast<double>(n_scale)));
  std::int64_t count = 0;
  const std::int64_t neg_hi = std::min<std::int64_t>(0, xb);
  if (xa <= neg_hi)
    count += (neg_hi - xa + 1) - count_in_range(c.holes_left(), xa, neg_hi);
  count += count_in_range(c.particles_right(), std::max<std::int64_t>(1, xa), xb);
  return static_cast<double>(count) / static_cast<double>(n_scale);
}

double empirical_mass(const ConfigN& c, std::int64_t n_scale, double a, double b) {
  if (n_scale < 1) throw std::invalid_argument("empirical mass: N must be >= 1");
  const auto xa = static_cast<std::int64_t>(std::ceil(a * static_cast<double>(n_scale)));
  const auto xb = static_cast<std::int64_t>(std::floor(b * static_cast<double>(n_scale)));
  return static_cast<double>(count_in_range(c.occupied_sites(), std::max<std::int64_t>(1, xa), xb)) /
         static_cast<double>(n_scale);
}

double total_mass(const ConfigN& c, std::int64_t n_scale) {
  if (n_scale < 1) throw std::invalid_argument("total mass: N must be >= 1");
  return static_cast<double>(c.particle_count()) / static_cast<double>(n_scale);
}

int boundary_occupation(const ConfigN& c) { return c.occupied(1) ? 1 : 0; }

GridField hopf_cole_profile(const ConfigN& c, double eps, std::int64_t n_scale,
                            const GridSpec& g) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("hopf-cole profile requires 0 < eps < 1");
  if (n_scale < 1) throw std::invalid_argument("hopf-cole profile: N must be >= 1");
  if (g.n < 1) throw std::invalid_argument("hopf-cole profile: empty grid");
  const double minus_log_eps = -std::log(eps);
  const double scale = static_cast<double>(n_scale);
  std::vector<double> vals(g.n);
  for (std::size_t k = 0; k < g.n; ++k) {
    const double u = g.xmin + static_cast<double>(k) * g.h;
    if (u < 0.0) throw std::invalid_argument("hopf-cole profile is defined on u >= 0");
    const double nu = scale * u;
    const auto fl = static_cast<std::int64_t>(std::floor(nu));
    double weight = static_cast<double>(c.tail_count(fl + 1));
    if (u >= 1.0 / scale && c.occupied(fl))
      weight += static_cast<double>(fl + 1) - nu;
    vals[k] = std::exp(minus_log_eps * weight);
  }
  return GridField(g.xmin, g.h, std::move(vals));
}

double time_averaged_boundary(const ObservableSeries& series, double t1, double t2) {
  if (!(t2 > t1)) throw std::invalid_argument("time averaged boundary: need t2 > t1");
  const std::vector<double>* integral = nullptr;
  for (const auto& [name, column] : series.scalars)
    if (name == "boundary_time_integral") integral = &column;
  if (integral == nullptr)
    throw std::invalid_argument("series does not record boundary_time_integral");
  const auto locate = [&](double t) -> std::size_t {
    for (std::size_t k = 0; k < series.times.size(); ++k)
      if (std::abs(series.times[k] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return k;
    throw std::invalid_argument("time averaged boundary: endpoint is not a record time");
  };
  const std::size_t i1 = locate(t1);
  const std::size_t i2 = locate(t2);
  return ((*integral)[i2] - (*integral)[i1]) / (t2 - t1);
}

double generator_drift_of_total_mass(const ConfigN& c, double eps, std::int64_t n_scale) {
  const MoveList moves = enumerate_moves_n(c, eps);
  const double x0 = total_mass(c, n_scale);
  double drift = 0.0;
  for (const auto& m : moves.entries)
    drift += m.rate * (total_mass(apply_move(c, m), n_scale) - x0);
  return drift * static_cast<double>(n_scale) * static_cast<double>(n_scale);
}

}  // namespace ydsim
