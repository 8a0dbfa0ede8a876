#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <sys/wait.h>

#include "test_support.hpp"

using thts::testing::benchmark;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(THTS_CLI) + " " + args + " 2>/dev/null";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  REQUIRE(pipe);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe.get())) out.append(buf.data(), n);
  const int raw = pclose(pipe.release());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

}  // namespace

TEST_CASE("plan prints a valid plan") {
  const auto r = run("plan " + benchmark("blocksworld/domain.pddl") + " " +
                     benchmark("blocksworld/p01.pddl") + " --search gbfs --heuristic ff");
  CHECK(r.status == 0);
  CHECK(r.out.find("(unstack c a)") != std::string::npos);
  CHECK(r.out.find("; cost = ") != std::string::npos);
}

TEST_CASE("plan writes a plan file") {
  const fs::path dir = fs::temp_directory_path() / "thts-cli-test";
  fs::create_directories(dir);
  const fs::path plan = dir / "p.plan";
  fs::remove(plan);
  const auto r = run("plan " + benchmark("gripper/domain.pddl") + " " +
                     benchmark("gripper/p01.pddl") +
                     " --search guct-uniform --evals 5000 --seed 3 --po -o " + plan.string());
  CHECK(r.status == 0);
  CHECK(r.out.find("; outcome solved") != std::string::npos);
  std::ifstream in(plan);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().find("; cost = ") != std::string::npos);
}

TEST_CASE("plan reports failure with a nonzero status") {
  const auto r = run("plan " + benchmark("logistics/domain.pddl") + " " +
                     benchmark("logistics/p03.pddl") + " --search guct --evals 3");
  CHECK(r.status == 1);
}

TEST_CASE("bad arguments are rejected") {
  CHECK(run("plan " + benchmark("gripper/domain.pddl") + " " + benchmark("gripper/p01.pddl") +
            " --search astar")
            .status != 0);
  CHECK(run("frobnicate").status != 0);
}

TEST_CASE("bandit-sim emits checkpoints") {
  const auto r = run("bandit-sim --policy ucb1 --arms bernoulli:0.9,bernoulli:0.1 --horizon 1000 --seeds 2");
  CHECK(r.status == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "policy,arms,seed,T,regret");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
}

TEST_CASE("bench runs a suite file") {
  const fs::path dir = fs::temp_directory_path() / "thts-cli-bench";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "suite.json") << R"({
      "problems": [{"domain": ")" << benchmark("miconic/domain.pddl") << R"(",
                    "problem": ")" << benchmark("miconic/p01.pddl") << R"("}],
      "algorithms": ["gbfs", "guct-uniform"], "heuristics": ["ff"], "seeds": [1, 2],
      "record_wall_time": false
    })";
  }
  const auto a = run("bench --config " + (dir / "suite.json").string());
  CHECK(a.status == 0);
  CHECK(a.out.rfind("domain,problem,algorithm", 0) == 0);
  const auto b = run("bench --config " + (dir / "suite.json").string() + " --jobs 3");
  CHECK(a.out == b.out);
}
