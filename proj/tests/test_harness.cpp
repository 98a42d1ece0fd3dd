#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "qwalk/table.hpp"
#include "qwalk/lattice.hpp"

using namespace qwalk;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(QWALK_CLI_PATH) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace

TEST_CASE("angle parsing") {
  CHECK(parse_angle("3/2pi") == doctest::Approx(3.0 * kPi / 2.0));
  CHECK(parse_angle("3pi/2") == doctest::Approx(3.0 * kPi / 2.0));
  CHECK(parse_angle("pi") == doctest::Approx(kPi));
  CHECK(parse_angle("-pi/4") == doctest::Approx(-kPi / 4.0));
  CHECK(parse_angle("0.75pi") == doctest::Approx(0.75 * kPi));
  CHECK(parse_angle("1.5") == doctest::Approx(1.5));
  CHECK(parse_angle("pi/2") == doctest::Approx(kPi / 2.0));
  CHECK_THROWS_AS(parse_angle("pie"), std::invalid_argument);
  CHECK_THROWS_AS(parse_angle(""), std::invalid_argument);
}

TEST_CASE("result table round-trips through csv") {
  ResultTable t;
  t.command = "demo";
  t.add_meta("alpha", 0.1234567890123456789);
  t.add_meta("label", "x y");
  TableSection& s = t.add_section("data", {"a", "b"});
  s.rows.push_back({1.0, -0.3333333333333333});
  s.rows.push_back({2.0, 1e-17});
  const ResultTable back = parse_csv(t.to_csv());
  CHECK(back.command == t.command);
  REQUIRE(back.meta.size() == t.meta.size());
  CHECK(back.meta[1].second == t.meta[1].second);
  REQUIRE(back.sections.size() == 1);
  CHECK(back.sections[0].columns == t.sections[0].columns);
  REQUIRE(back.sections[0].rows.size() == 2);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c)
      CHECK(back.sections[0].rows[r][c] == t.sections[0].rows[r][c]);
}

TEST_CASE("cli: evolve basics and determinism") {
  const CliResult t0 = run_cli("evolve --steps 0");
  CHECK(t0.exit_code == 0);
  const ResultTable parsed = parse_csv(t0.out);
  REQUIRE(parsed.sections.size() == 1);
  REQUIRE(parsed.sections[0].rows.size() == 1);
  CHECK(parsed.sections[0].rows[0][0] == 0.0);
  CHECK(parsed.sections[0].rows[0][1] == 1.0);

  const std::string args =
      "evolve --sigma-plus 3/2pi --sigma-minus pi/2 --init 1,0,0,0 --steps 200 --rescale";
  const CliResult a = run_cli(args);
  const CliResult b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);  // byte-identical reruns
  CHECK(a.out.find("# command = evolve") == 0);
  CHECK(a.out.find("sigma_plus = 4.712388980384689") != std::string::npos);

  // Probabilities sum to one.
  const ResultTable tab = parse_csv(a.out);
  double total = 0.0;
  for (const auto& row : tab.sections[0].rows) total += row[1];
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("cli: json output carries the same rows") {
  const CliResult csv = run_cli("evolve --steps 4 --format csv");
  const CliResult json = run_cli("evolve --steps 4 --format json");
  CHECK(json.exit_code == 0);
  CHECK(json.out.find("\"command\": \"evolve\"") != std::string::npos);
  const ResultTable tab = parse_csv(csv.out);
  for (const auto& row : tab.sections[0].rows)
    CHECK(json.out.find(format_g17(row[1])) != std::string::npos);
}

TEST_CASE("cli: timeavg homogeneous analytic column is zero") {
  const CliResult r = run_cli(
      "timeavg --kind homogeneous --sigma-plus pi/2 --sigma-minus pi/2 --horizons 1 --window 6");
  CHECK(r.exit_code == 0);
  const ResultTable tab = parse_csv(r.out);
  REQUIRE(tab.sections.size() == 2);
  for (const auto& row : tab.sections[0].rows) CHECK(row[1] == 0.0);
  // T = 1 empirical average is the delta at the origin.
  for (const auto& row : tab.sections[1].rows)
    CHECK(row[1] == (row[0] == 0.0 ? 1.0 : 0.0));
}

TEST_CASE("cli: stationary emits four branches with divergence flags") {
  const CliResult r = run_cli(
      "stationary --sigma-plus 3/2pi --sigma-minus pi/2 --sqrt-branch 1 --window 5");
  CHECK(r.exit_code == 0);
  const ResultTable tab = parse_csv(r.out);
  REQUIRE(tab.sections.size() == 2);
  REQUIRE(tab.sections[0].rows.size() == 4);
  int divergent = 0;
  for (const auto& row : tab.sections[0].rows) divergent += row[5] == 1.0 ? 1 : 0;
  CHECK(divergent == 2);  // two of the four chiral branches diverge
}

TEST_CASE("cli: spectrum smoke run at N = 2") {
  const CliResult r = run_cli("spectrum --path-size 2 --kind homogeneous --sigma-plus 0 --sigma-minus 0");
  CHECK(r.exit_code == 0);
  const ResultTable tab = parse_csv(r.out);
  CHECK(tab.sections[0].rows.size() == 6);  // dim 4N-2
}

TEST_CASE("cli: topology reports the three worked cases") {
  const CliResult chiral = run_cli("topology --sigma-plus 3/2pi --sigma-minus pi/2");
  CHECK(chiral.exit_code == 0);
  const ResultTable t1 = parse_csv(chiral.out);
  const auto& nums = t1.sections[2].rows[0];
  CHECK(nums[0] == 1.0);  // symmetry holds
  CHECK(nums[2] == 1.0);  // nu right (1,0)
  CHECK(nums[3] == 0.0);
  CHECK(nums[4] == 0.0);  // nu left (0,1)
  CHECK(nums[5] == 1.0);
  CHECK(nums[8] == 1.0);  // one state predicted at each of +-i
  CHECK(nums[9] == 1.0);

  const CliResult broken = run_cli("topology --sigma-plus pi --sigma-minus pi/2");
  const ResultTable t2 = parse_csv(broken.out);
  CHECK(t2.sections[2].rows[0][0] == 0.0);

  const CliResult even = run_cli("topology --sigma-plus pi/2 --sigma-minus pi/2");
  const ResultTable t3 = parse_csv(even.out);
  CHECK(t3.sections[2].rows[0][8] == 0.0);
  CHECK(t3.sections[2].rows[0][9] == 0.0);
}

TEST_CASE("cli: perturb with zero trials emits metadata only") {
  const CliResult r = run_cli(
      "perturb --sigma-plus 3/2pi --sigma-minus pi/2 --path-size 20 --trials 0");
  CHECK(r.exit_code == 0);
  const ResultTable tab = parse_csv(r.out);
  CHECK(tab.sections[1].rows.empty());
  // Determinism with a pinned seed.
  const std::string args =
      "perturb --sigma-plus 3/2pi --sigma-minus pi/2 --path-size 20 --trials 3 --seed 5";
  CHECK(run_cli(args).out == run_cli(args).out);
}

TEST_CASE("cli: locallength marks divergences and symmetry") {
  const CliResult r = run_cli("locallength --grid 8");
  CHECK(r.exit_code == 0);
  const ResultTable tab = parse_csv(r.out);
  double at_pi = 0.0;
  for (const auto& row : tab.sections[0].rows) {
    if (row[0] == kPi) at_pi = row[2];
    if (row[2] == 0.0) {
      // finite entries obey xi(-sigma) = xi(sigma) via the mirrored row
      for (const auto& other : tab.sections[0].rows)
        if (other[0] == -row[0]) CHECK(other[1] == doctest::Approx(row[1]).epsilon(1e-12));
    }
  }
  CHECK(at_pi == 1.0);  // divergence marker at sigma = pi
}

TEST_CASE("cli: runtime errors exit with code 1") {
  CHECK(run_cli("evolve --init 2,0,0,0").exit_code == 1);
  CHECK(run_cli("evolve --sigma-plus bogus").exit_code == 1);
  CHECK(run_cli("evolve --steps notanumber").exit_code == 1);
  CHECK(run_cli("evolve --help").exit_code == 0);
}
