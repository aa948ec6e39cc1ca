#include "ydsim/diagrams.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace ydsim {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out))
    throw std::overflow_error("partition area overflows 64-bit range");
  return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out))
    throw std::overflow_error("partition area overflows 64-bit range");
  return out;
}

void require_sorted_unique(const std::vector<std::int64_t>& v, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i - 1] >= v[i])
      throw std::invalid_argument(std::string(what) + " must be sorted ascending without duplicates");
}

}  // namespace

Partition Partition::from_parts(std::vector<std::int64_t> parts) {
  std::sort(parts.begin(), parts.end(), std::greater<>());
  std::vector<PartBlock> blocks;
  for (std::int64_t v : parts) {
    if (v < 1) throw std::invalid_argument("partition parts must be >= 1");
    if (!blocks.empty() && blocks.back().value == v)
      ++blocks.back().mult;
    else
      blocks.push_back({v, 1});
  }
  return from_blocks(std::move(blocks));
}

Partition Partition::from_blocks(std::vector<PartBlock> blocks) {
  Partition p;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    if (b.value < 1 || b.mult < 1)
      throw std::invalid_argument("partition blocks need value >= 1 and mult >= 1");
    if (i > 0 && blocks[i - 1].value <= b.value)
      throw std::invalid_argument("partition blocks must have strictly decreasing values");
    p.area_ = checked_add(p.area_, checked_mul(b.value, b.mult));
    p.rows_ = checked_add(p.rows_, b.mult);
  }
  p.blocks_ = std::move(blocks);
  return p;
}

std::int64_t Partition::part(std::int64_t i) const {
  if (i < 1) throw std::invalid_argument("part index is 1-based");
  std::int64_t seen = 0;
  for (const auto& b : blocks_) {
    seen += b.mult;
    if (i <= seen) return b.value;
  }
  return 0;
}

std::vector<std::int64_t> Partition::parts() const {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(rows_));
  for (const auto& b : blocks_)
    out.insert(out.end(), static_cast<std::size_t>(b.mult), b.value);
  return out;
}

std::int64_t Partition::height_int(std::int64_t level) const {
  std::int64_t count = 0;
  for (const auto& b : blocks_) {
    if (b.value > level)
      count += b.mult;
    else
      break;
  }
  return count;
}

StrictPartition StrictPartition::from_parts(std::vector<std::int64_t> parts) {
  std::sort(parts.begin(), parts.end(), std::greater<>());
  StrictPartition q;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] < 1) throw std::invalid_argument("strict partition parts must be >= 1");
    if (i > 0 && parts[i - 1] == parts[i])
      throw std::invalid_argument("strict partition parts must be distinct");
    q.area_ = checked_add(q.area_, parts[i]);
  }
  q.parts_ = std::move(parts);
  return q;
}

std::int64_t StrictPartition::part(std::int64_t i) const {
  if (i < 1) throw std::invalid_argument("part index is 1-based");
  if (i > row_count()) return 0;
  return parts_[static_cast<std::size_t>(i - 1)];
}

std::int64_t StrictPartition::height_int(std::int64_t level) const {
  // parts_ is strictly decreasing, so the prefix of parts > level is
  // found by binary search.
  auto it = std::lower_bound(parts_.begin(), parts_.end(), level,
                             [](std::int64_t part, std::int64_t lv) { return part > lv; });
  return static_cast<std::int64_t>(it - parts_.begin());
}

namespace {

std::int64_t floor_level(double u) {
  if (!(u >= 0.0)) throw std::invalid_argument("height function argument must be >= 0");
  return static_cast<std::int64_t>(std::floor(u));
}

}  // namespace

double height_at(const Partition& p, double u) {
  // Integer parts: p_i > u iff p_i > floor(u), which makes the function
  // right continuous at the jumps.
  return static_cast<double>(p.height_int(floor_level(u)));
}

double height_at(const StrictPartition& q, double u) {
  return static_cast<double>(q.height_int(floor_level(u)));
}

double scaled_height(const Partition& p, std::int64_t n_scale, double u) {
  if (n_scale < 1) throw std::invalid_argument("scaling parameter must be >= 1");
  return height_at(p, static_cast<double>(n_scale) * u) / static_cast<double>(n_scale);
}

double scaled_height(const StrictPartition& q, std::int64_t n_scale, double u) {
  if (n_scale < 1) throw std::invalid_argument("scaling parameter must be >= 1");
  return height_at(q, static_cast<double>(n_scale) * u) / static_cast<double>(n_scale);
}

ConfigZ ConfigZ::from_deviations(std::vector<std::int64_t> holes_left,
                                 std::vector<std::int64_t> particles_right) {
  require_sorted_unique(holes_left, "holes_left");
  require_sorted_unique(particles_right, "particles_right");
  if (!holes_left.empty() && holes_left.back() > 0)
    throw std::invalid_argument("holes_left sites must be <= 0");
  if (!particles_right.empty() && particles_right.front() < 1)
    throw std::invalid_argument("particles_right sites must be >= 1");
  if (holes_left.size() != particles_right.size())
    throw std::invalid_argument("centering violated: |holes_left| != |particles_right|");
  ConfigZ c;
  c.holes_ = std::move(holes_left);
  c.particles_ = std::move(particles_right);
  return c;
}

bool ConfigZ::occupied(std::int64_t x) const {
  if (x <= 0) return !std::binary_search(holes_.begin(), holes_.end(), x);
  return std::binary_search(particles_.begin(), particles_.end(), x);
}

std::int64_t ConfigZ::zeta_minus(std::int64_t x) const {
  auto holes_upto = std::upper_bound(holes_.begin(), holes_.end(), x) - holes_.begin();
  if (x <= 0) return holes_upto;
  auto particles_upto = std::upper_bound(particles_.begin(), particles_.end(), x) - particles_.begin();
  return holes_upto + x - particles_upto;
}

std::int64_t ConfigZ::zeta_plus(std::int64_t x) const {
  auto particles_after =
      particles_.end() - std::upper_bound(particles_.begin(), particles_.end(), x);
  if (x >= 0) return particles_after;
  auto holes_in = std::lower_bound(holes_.begin(), holes_.end(), x + 1);
  std::int64_t holes_after = holes_.end() - holes_in;
  // occupied sites in [x+1, 0] plus every particle right of the origin
  return (-x) - holes_after + static_cast<std::int64_t>(particles_.size());
}

std::int64_t zeta_config(const ConfigZ& c, std::int64_t x, ZetaSign sign) {
  return sign == ZetaSign::Minus ? c.zeta_minus(x) : c.zeta_plus(x);
}

ConfigN ConfigN::from_occupied(std::vector<std::int64_t> occupied) {
  require_sorted_unique(occupied, "occupied");
  if (!occupied.empty() && occupied.front() < 1)
    throw std::invalid_argument("occupied sites must be >= 1");
  ConfigN c;
  c.occupied_ = std::move(occupied);
  return c;
}

bool ConfigN::occupied(std::int64_t x) const {
  return std::binary_search(occupied_.begin(), occupied_.end(), x);
}

std::int64_t ConfigN::tail_count(std::int64_t x) const {
  return occupied_.end() - std::lower_bound(occupied_.begin(), occupied_.end(), x);
}

ConfigZ partition_to_config_z(const Partition& p) {
  const std::int64_t rows = p.row_count();
  // Occupied sites are {p_i - i + 1}; rows beyond the last one contribute
  // the tail {1 - i : i > rows} which matches the step profile exactly.
  std::vector<std::int64_t> particles;
  std::vector<std::int64_t> occupied_nonpos;
  std::int64_t i = 1;
  for (const auto& b : p.blocks()) {
    for (std::int64_t k = 0; k < b.mult; ++k, ++i) {
      const std::int64_t x = b.value - i + 1;
      if (x >= 1)
        particles.push_back(x);
      else
        occupied_nonpos.push_back(x);
    }
  }
  // Holes are the unoccupied sites in [1 - rows, 0].
  std::vector<std::int64_t> holes;
  std::sort(occupied_nonpos.begin(), occupied_nonpos.end());
  auto it = occupied_nonpos.begin();
  for (std::int64_t x = 1 - rows; x <= 0; ++x) {
    if (it != occupied_nonpos.end() && *it == x)
      ++it;
    else
      holes.push_back(x);
  }
  std::sort(particles.begin(), particles.end());
  return ConfigZ::from_deviations(std::move(holes), std::move(particles));
}

Partition config_z_to_partition(const ConfigZ& c) {
  // p_i = zeta_minus(x_i) at the i-th occupied site from the right.
  std::vector<std::int64_t> parts;
  const auto& particles = c.particles_right();
  for (auto it = particles.rbegin(); it != particles.rend(); ++it)
    parts.push_back(c.zeta_minus(*it));
  const auto& holes = c.holes_left();
  if (!holes.empty()) {
    auto hole_it = holes.rbegin();
    std::int64_t holes_upto = static_cast<std::int64_t>(holes.size());
    for (std::int64_t x = 0; x >= holes.front() && holes_upto > 0; --x) {
      if (hole_it != holes.rend() && *hole_it == x) {
        ++hole_it;
        --holes_upto;
      } else {
        parts.push_back(holes_upto);
      }
    }
  }
  return Partition::from_parts(std::move(parts));
}

ConfigN strict_to_config_n(const StrictPartition& q) {
  std::vector<std::int64_t> occupied(q.parts().rbegin(), q.parts().rend());
  return ConfigN::from_occupied(std::move(occupied));
}

StrictPartition config_n_to_strict(const ConfigN& c) {
  std::vector<std::int64_t> parts(c.occupied_sites().rbegin(), c.occupied_sites().rend());
  return StrictPartition::from_parts(std::move(parts));
}

}  // namespace ydsim
