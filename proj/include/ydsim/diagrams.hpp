#pragma once

#include <cstdint>
#include <vector>

namespace ydsim {

// One maximal run of equal parts: `mult` rows of length `value`.
struct PartBlock {
  std::int64_t value = 0;
  std::int64_t mult = 0;
  friend bool operator==(const PartBlock&, const PartBlock&) = default;
};

// Integer partition with parts in non-increasing order, stored as
// distinct-value blocks so corner enumeration is O(#blocks). Values are
// immutable after construction; the dynamics engines keep their own
// mutable block vectors and convert at the boundary.
class Partition {
 public:
  Partition() = default;

  // Parts may arrive in any order; they are sorted non-increasing.
  // Rejects non-positive parts and areas overflowing 64-bit.
  static Partition from_parts(std::vector<std::int64_t> parts);

  // Blocks must have strictly decreasing values and positive multiplicities.
  static Partition from_blocks(std::vector<PartBlock> blocks);

  const std::vector<PartBlock>& blocks() const { return blocks_; }
  std::int64_t area() const { return area_; }
  std::int64_t row_count() const { return rows_; }
  bool empty() const { return blocks_.empty(); }

  // p_i with 1-based i; zero beyond the last row (the infinite zero tail).
  std::int64_t part(std::int64_t i) const;

  std::vector<std::int64_t> parts() const;

  // Number of parts strictly greater than level.
  std::int64_t height_int(std::int64_t level) const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<PartBlock> blocks_;  // strictly decreasing values
  std::int64_t area_ = 0;
  std::int64_t rows_ = 0;
};

// Partition into distinct parts, stored as a strictly decreasing list.
class StrictPartition {
 public:
  StrictPartition() = default;

  // Parts may arrive in any order; duplicates are rejected.
  static StrictPartition from_parts(std::vector<std::int64_t> parts);

  const std::vector<std::int64_t>& parts() const { return parts_; }
  std::int64_t area() const { return area_; }
  std::int64_t row_count() const { return static_cast<std::int64_t>(parts_.size()); }
  bool empty() const { return parts_.empty(); }
  std::int64_t part(std::int64_t i) const;
  std::int64_t height_int(std::int64_t level) const;

  friend bool operator==(const StrictPartition&, const StrictPartition&) = default;

 private:
  std::vector<std::int64_t> parts_;  // strictly decreasing
  std::int64_t area_ = 0;
};

// Height function of the diagram: sum_i 1{u < p_i}, right continuous and
// non-increasing in u.
double height_at(const Partition& p, double u);
double height_at(const StrictPartition& q, double u);

// (1/N) * height(N u).
double scaled_height(const Partition& p, std::int64_t n_scale, double u);
double scaled_height(const StrictPartition& q, std::int64_t n_scale, double u);

// Particle configuration on Z that differs from the step profile
// (all sites <= 0 occupied, all sites >= 1 empty) at finitely many sites.
// The two deviation sets always have equal cardinality: the number of
// vacated sites left of the origin equals the number of occupied sites
// right of it.
class ConfigZ {
 public:
  ConfigZ() = default;

  // Rejects unsorted/duplicate input, sites on the wrong side of the
  // origin, and deviation sets of unequal size.
  static ConfigZ from_deviations(std::vector<std::int64_t> holes_left,
                                 std::vector<std::int64_t> particles_right);

  const std::vector<std::int64_t>& holes_left() const { return holes_; }
  const std::vector<std::int64_t>& particles_right() const { return particles_; }
  bool occupied(std::int64_t x) const;
  bool is_vacuum() const { return holes_.empty(); }

  // Number of empty sites in (-inf, x].
  std::int64_t zeta_minus(std::int64_t x) const;
  // Number of particles in [x+1, inf).
  std::int64_t zeta_plus(std::int64_t x) const;

  friend bool operator==(const ConfigZ&, const ConfigZ&) = default;

 private:
  std::vector<std::int64_t> holes_;      // sorted ascending, all <= 0
  std::vector<std::int64_t> particles_;  // sorted ascending, all >= 1
};

enum class ZetaSign { Minus, Plus };

std::int64_t zeta_config(const ConfigZ& c, std::int64_t x, ZetaSign sign);

// Particle configuration on N = {1, 2, ...} with finitely many particles.
class ConfigN {
 public:
  ConfigN() = default;

  static ConfigN from_occupied(std::vector<std::int64_t> occupied);

  const std::vector<std::int64_t>& occupied_sites() const { return occupied_; }
  bool occupied(std::int64_t x) const;
  std::int64_t particle_count() const { return static_cast<std::int64_t>(occupied_.size()); }
  std::int64_t max_site() const { return occupied_.empty() ? 0 : occupied_.back(); }
  // Number of particles in [x, inf).
  std::int64_t tail_count(std::int64_t x) const;

  friend bool operator==(const ConfigN&, const ConfigN&) = default;

 private:
  std::vector<std::int64_t> occupied_;  // sorted ascending, all >= 1
};

// Exact bijection between partitions and Z-configurations: the occupied
// set of the image is {p_i - i + 1 : i in N} with the zero tail included.
ConfigZ partition_to_config_z(const Partition& p);
Partition config_z_to_partition(const ConfigZ& c);

// Exact bijection between strict partitions and N-configurations: the
// occupied set is the set of parts.
ConfigN strict_to_config_n(const StrictPartition& q);
StrictPartition config_n_to_strict(const ConfigN& c);

}  // namespace ydsim
