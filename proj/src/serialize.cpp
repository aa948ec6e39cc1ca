#include "ydsim/serialize.hpp"

#include <charconv>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ydsim {

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf, 16);
}

nlohmann::json to_json(const Partition& p) { return nlohmann::json(p.parts()); }

nlohmann::json to_json(const StrictPartition& q) { return nlohmann::json(q.parts()); }

nlohmann::json to_json(const ConfigZ& c) {
  return nlohmann::json{{"holes_left", c.holes_left()},
                        {"particles_right", c.particles_right()}};
}

nlohmann::json to_json(const ConfigN& c) {
  return nlohmann::json{{"occupied", c.occupied_sites()}};
}

Partition partition_from_json(const nlohmann::json& j) {
  return Partition::from_parts(j.get<std::vector<std::int64_t>>());
}

StrictPartition strict_partition_from_json(const nlohmann::json& j) {
  return StrictPartition::from_parts(j.get<std::vector<std::int64_t>>());
}

ConfigZ config_z_from_json(const nlohmann::json& j) {
  return ConfigZ::from_deviations(j.at("holes_left").get<std::vector<std::int64_t>>(),
                                  j.at("particles_right").get<std::vector<std::int64_t>>());
}

ConfigN config_n_from_json(const nlohmann::json& j) {
  return ConfigN::from_occupied(j.at("occupied").get<std::vector<std::int64_t>>());
}

nlohmann::json to_json(const GridField& f) {
  return nlohmann::json{{"xmin", f.xmin}, {"h", f.h}, {"values", f.values}};
}

GridField grid_field_from_json(const nlohmann::json& j) {
  return GridField(j.at("xmin").get<double>(), j.at("h").get<double>(),
                   j.at("values").get<std::vector<double>>());
}

std::string grid_field_to_csv(const GridField& f) {
  std::string out = "u,value\n";
  for (std::size_t k = 0; k < f.size(); ++k) {
    out += format_double(f.x(k));
    out += ',';
    out += format_double(f.values[k]);
    out += '\n';
  }
  return out;
}

GridField grid_field_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
  std::vector<double> xs, ys;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("malformed CSV line: " + line);
    xs.push_back(std::stod(line.substr(0, comma)));
    ys.push_back(std::stod(line.substr(comma + 1)));
  }
  if (xs.size() < 2) throw std::invalid_argument("CSV needs at least two samples");
  const double h = xs[1] - xs[0];
  for (std::size_t k = 1; k < xs.size(); ++k)
    if (std::abs(xs[k] - xs[k - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw std::invalid_argument("CSV grid is not uniform");
  return GridField(xs.front(), h, std::move(ys));
}

std::string series_to_jsonl(const ObservableSeries& series) {
  std::string out;
  for (std::size_t t = 0; t < series.times.size(); ++t) {
    for (const auto& [name, column] : series.scalars) {
      nlohmann::json rec{{"t", series.times[t]}, {"observable", name}, {"payload", column[t]}};
      out += rec.dump();
      out += '\n';
    }
    for (const auto& channel : series.fields) {
      nlohmann::json rec{{"t", series.times[t]},
                         {"observable", channel.name},
                         {"payload", channel.rows[t]}};
      out += rec.dump();
      out += '\n';
    }
  }
  return out;
}

namespace {

void put_f64(std::ostream& out, double x) {
  static_assert(sizeof(double) == 8);
  char buf[8];
  std::memcpy(buf, &x, 8);
  out.write(buf, 8);
}

void put_u32(std::ostream& out, std::uint32_t x) {
  char buf[4];
  std::memcpy(buf, &x, 4);
  out.write(buf, 4);
}

}  // namespace

void write_binary_series(const ObservableSeries& series, std::ostream& out) {
  for (std::size_t t = 0; t < series.times.size(); ++t) {
    for (const auto& [name, column] : series.scalars) {
      put_f64(out, series.times[t]);
      put_u32(out, 1);
      put_f64(out, column[t]);
    }
    for (const auto& channel : series.fields) {
      put_f64(out, series.times[t]);
      put_u32(out, static_cast<std::uint32_t>(channel.rows[t].size()));
      for (double v : channel.rows[t]) put_f64(out, v);
    }
  }
}

std::vector<BinaryRecord> read_binary_series(std::istream& in) {
  std::vector<BinaryRecord> records;
  while (true) {
    char head[12];
    in.read(head, 12);
    if (in.gcount() == 0) break;
    if (in.gcount() != 12) throw std::invalid_argument("truncated binary series");
    BinaryRecord rec;
    std::uint32_t len = 0;
    std::memcpy(&rec.time, head, 8);
    std::memcpy(&len, head + 8, 4);
    rec.values.resize(len);
    if (len > 0) {
      in.read(reinterpret_cast<char*>(rec.values.data()),
              static_cast<std::streamsize>(8 * len));
      if (in.gcount() != static_cast<std::streamsize>(8 * len))
        throw std::invalid_argument("truncated binary series payload");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace ydsim
