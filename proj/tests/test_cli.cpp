#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

const char* cli_path() { return std::getenv("YDSIM_CLI"); }

struct CommandResult {
  int exit_code;
  std::string out;
};

CommandResult run(const std::string& args) {
  const std::string cmd = std::string(cli_path()) + " " + args + " 2>/dev/null";
  std::array<char, 4096> chunk{};
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (std::fgets(chunk.data(), chunk.size(), pipe) != nullptr) out += chunk.data();
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("epsilon subcommand emits the solved parameter as JSON") {
  if (cli_path() == nullptr) return;  // suite requires the built binary
  const auto res = run("epsilon --N 50 --stat U");
  REQUIRE(res.exit_code == 0);
  const auto j = json::parse(res.out);
  CHECK(j.at("N") == 50);
  const double eps = j.at("epsilon").get<double>();
  CHECK(eps > 0.9);
  CHECK(eps < 1.0);
  CHECK(std::abs(j.at("residual").get<double>()) <= 1e-10 * 2500.0);
  CHECK(j.at("meta").at("rng_algorithm") == "xoshiro256ss-1.0/splitmix64");
}

TEST_CASE("identical seeds give identical outputs") {
  if (cli_path() == nullptr) return;
  const std::string args =
      "simulate --process strict-ru --N 12 --T 0.5 --seed 99 --records 0 0.5 "
      "--observables area rows";
  const auto a = run(args);
  const auto b = run(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  const auto c = run(
      "simulate --process strict-ru --N 12 --T 0.5 --seed 100 --records 0 0.5 "
      "--observables area rows");
  CHECK(a.out != c.out);
}

TEST_CASE("config errors exit with code 2") {
  if (cli_path() == nullptr) return;
  CHECK(run("epsilon --N 50 --stat X").exit_code == 2);
  CHECK(run("nonsense-subcommand").exit_code == 2);
  CHECK(run("simulate --process partition-u --N 0").exit_code == 2);
  CHECK(run("pde --equation nope").exit_code == 2);
}

TEST_CASE("sample subcommand is seeded and valid") {
  if (cli_path() == nullptr) return;
  const auto res = run("sample --epsilon 0.5 --stat RU --count 3 --seed 11");
  REQUIRE(res.exit_code == 0);
  std::istringstream lines(res.out);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    const auto j = json::parse(line);
    if (rows > 0) {
      // strictly decreasing parts
      for (std::size_t i = 1; i < j.size(); ++i)
        CHECK(j[i].get<long long>() < j[i - 1].get<long long>());
    }
    ++rows;
  }
  CHECK(rows == 4);  // meta line + 3 samples
}

TEST_CASE("vershik subcommand reports the residual") {
  if (cli_path() == nullptr) return;
  const auto res = run("vershik --stat RU --umin 0 --umax 10 --h 0.001");
  REQUIRE(res.exit_code == 0);
  const auto j = json::parse(res.out);
  CHECK(j.at("max_abs_residual").get<double>() <= 1e-3);
}

TEST_SUITE_END();
