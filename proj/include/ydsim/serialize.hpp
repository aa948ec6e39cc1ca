#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ydsim/diagrams.hpp"
#include "ydsim/dynamics.hpp"
#include "ydsim/grid.hpp"

namespace ydsim {

// Shortest round-trip decimal form of a double.
std::string format_double(double x);

// FNV-1a 64-bit, as a 16-digit hex string; used for config hashes.
std::string fnv1a_hex(const std::string& data);

// States: partitions as arrays of parts in non-increasing order,
// configurations as objects with sorted integer arrays.
nlohmann::json to_json(const Partition& p);
nlohmann::json to_json(const StrictPartition& q);
nlohmann::json to_json(const ConfigZ& c);
nlohmann::json to_json(const ConfigN& c);
Partition partition_from_json(const nlohmann::json& j);
StrictPartition strict_partition_from_json(const nlohmann::json& j);
ConfigZ config_z_from_json(const nlohmann::json& j);
ConfigN config_n_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GridField& f);
GridField grid_field_from_json(const nlohmann::json& j);

// Two-column CSV with a "u,value" header.
std::string grid_field_to_csv(const GridField& f);
GridField grid_field_from_csv(const std::string& csv);

// One JSON-lines record {"t":..,"observable":..,"payload":..} per record
// time and channel; scalars carry a number, fields an array.
std::string series_to_jsonl(const ObservableSeries& series);

// Little-endian binary column format, one record per (time, channel):
// f64 time, u32 length, f64 values[length]; scalars have length 1 and
// channels appear in series order within each record time.
void write_binary_series(const ObservableSeries& series, std::ostream& out);

struct BinaryRecord {
  double time;
  std::vector<double> values;
};
std::vector<BinaryRecord> read_binary_series(std::istream& in);

}  // namespace ydsim
