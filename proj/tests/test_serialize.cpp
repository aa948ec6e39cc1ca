#include <doctest.h>

#include <sstream>

#include "ydsim/serialize.hpp"

using namespace ydsim;

TEST_SUITE_BEGIN("serialize");

TEST_CASE("state JSON round trips") {
  const auto p = Partition::from_parts({4, 4, 2, 1});
  CHECK(to_json(p).dump() == "[4,4,2,1]");
  CHECK(partition_from_json(to_json(p)) == p);

  const auto q = StrictPartition::from_parts({5, 3, 1});
  CHECK(to_json(q).dump() == "[5,3,1]");
  CHECK(strict_partition_from_json(to_json(q)) == q);

  const auto c = ConfigZ::from_deviations({-2, 0}, {1, 4});
  CHECK(config_z_from_json(to_json(c)) == c);

  const auto n = ConfigN::from_occupied({2, 3, 9});
  CHECK(config_n_from_json(to_json(n)) == n);
}

TEST_CASE("grid field CSV and JSON round trips") {
  const GridField f(-1.5, 0.25, {1.0, 0.5, 0.25, 0.125, 1.0 / 3.0});
  const GridField via_json = grid_field_from_json(to_json(f));
  CHECK(via_json == f);

  const std::string csv = grid_field_to_csv(f);
  CHECK(csv.rfind("u,value\n", 0) == 0);
  const GridField via_csv = grid_field_from_csv(csv);
  CHECK(via_csv.xmin == f.xmin);
  CHECK(via_csv.h == doctest::Approx(f.h).epsilon(1e-15));
  for (std::size_t k = 0; k < f.size(); ++k)
    CHECK(via_csv.values[k] == f.values[k]);  // exact via shortest round trip
  CHECK_THROWS_AS(grid_field_from_csv("u,value\n1,2\n9,3\n10,4\n"), std::invalid_argument);
}

TEST_CASE("format_double is shortest round trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(std::stod(format_double(M_PI)) == M_PI);
}

TEST_CASE("jsonl stream has one record per time and channel") {
  ObservableSeries s;
  s.times = {0.0, 1.0};
  s.scalars.emplace_back("area", std::vector<double>{3.0, 4.0});
  s.fields.push_back({"scaled_height", {0.0, 0.5, 2}, {{1.0, 0.5}, {1.5, 0.25}}});
  const std::string jsonl = series_to_jsonl(s);
  std::istringstream lines(jsonl);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("t"));
    CHECK(j.contains("observable"));
    CHECK(j.contains("payload"));
    ++count;
  }
  CHECK(count == 4);
}

TEST_CASE("binary column format round trips") {
  ObservableSeries s;
  s.times = {0.0, 0.5};
  s.scalars.emplace_back("total_mass", std::vector<double>{0.25, 0.75});
  s.fields.push_back({"hopf_cole", {0.0, 0.1, 3}, {{1.0, 1.5, 2.0}, {1.0, 1.25, 2.5}}});
  std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
  write_binary_series(s, buf);
  const auto records = read_binary_series(buf);
  REQUIRE(records.size() == 4);
  CHECK(records[0].time == 0.0);
  CHECK(records[0].values == std::vector<double>{0.25});
  CHECK(records[1].values == std::vector<double>{1.0, 1.5, 2.0});
  CHECK(records[2].time == 0.5);
  CHECK(records[3].values == std::vector<double>{1.0, 1.25, 2.5});

  std::stringstream truncated(std::ios::in | std::ios::out | std::ios::binary);
  truncated.write("\x01\x02\x03", 3);
  CHECK_THROWS_AS(read_binary_series(truncated), std::invalid_argument);
}

TEST_CASE("fnv hash is stable") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") != fnv1a_hex("b"));
  CHECK(fnv1a_hex("config").size() == 16);
}

TEST_SUITE_END();
