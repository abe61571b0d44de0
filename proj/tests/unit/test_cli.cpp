#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "kronmle/cli.hpp"
#include "kronmle/errors.hpp"
#include "kronmle/model.hpp"
#include "kronmle/solvers.hpp"

using namespace kronmle;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("kronmle_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "_" +
            std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

}  // namespace

TEST_CASE("range parsing") {
  CHECK(parse_range("2-5") == std::vector<std::size_t>{2, 3, 4, 5});
  CHECK(parse_range("3,2,3") == std::vector<std::size_t>{2, 3});
  CHECK(parse_range("4") == std::vector<std::size_t>{4});
  CHECK(parse_range("1-2,7") == std::vector<std::size_t>{1, 2, 7});
  CHECK_THROWS(parse_range("5-2"));
  CHECK_THROWS(parse_range("a"));
  CHECK_THROWS(parse_range(""));
}

TEST_CASE("worker count honours the environment") {
  setenv("KRONMLE_WORKERS", "3", 1);
  CHECK(worker_count(10) == 3);
  CHECK(worker_count(2) == 2);
  setenv("KRONMLE_WORKERS", "junk", 1);
  CHECK(worker_count(1) == 1);
  unsetenv("KRONMLE_WORKERS");
  CHECK(worker_count(0) == 1);
}

TEST_CASE("sample command") {
  TempDir dir;
  const auto a = dir.file("a.txt"), b = dir.file("b.txt");
  auto r = run({"sample", "--m1", "3", "--m2", "2", "--n", "2", "--seed", "7", "--out", a});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("k = 1") != std::string::npos);
  CHECK(r.out.find("seed = 7") != std::string::npos);
  CHECK(slurp(a).rfind("3 2 2\n", 0) == 0);
  run({"sample", "--m1", "3", "--m2", "2", "--n", "2", "--seed", "7", "--out", b});
  CHECK(slurp(a) == slurp(b));
  run({"sample", "--m1", "3", "--m2", "2", "--n", "2", "--seed", "8", "--out", b});
  CHECK(slurp(a) != slurp(b));

  r = run({"sample", "--m1", "7", "--m2", "2", "--n", "4", "--seed", "1"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.rfind("7 2 4\n", 0) == 0);
  CHECK(r.err.find("threshold bounds: lower 3.5, upper 4") != std::string::npos);
}

TEST_CASE("bad arguments exit with code 4") {
  CHECK(run({}).code == kExitBadArguments);
  CHECK(run({"bogus"}).code == kExitBadArguments);
  CHECK(run({"sample", "--m1", "3"}).code == kExitBadArguments);
  CHECK(run({"sample", "--m1", "0", "--m2", "2", "--n", "2"}).code == kExitBadArguments);
  CHECK(run({"mldegree", "--m1", "x", "--n", "2"}).code == kExitBadArguments);
  CHECK(run({"multiplicity", "--m2", "2", "--k", "2", "--case", "one"}).code == kExitBadArguments);
  CHECK(run({"mle", "--in", "/nonexistent/file"}).code != kExitOk);
}

TEST_CASE("help exits cleanly") {
  const auto r = run({"--help"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("mldegree") != std::string::npos);
}

TEST_CASE("mle on k = 1 data") {
  TempDir dir;
  const auto in = dir.file("s.txt"), est = dir.file("e.txt");
  run({"sample", "--m1", "5", "--m2", "2", "--n", "3", "--seed", "4", "--out", in});
  auto r = run({"mle", "--in", in, "--out", est});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("method: exact") != std::string::npos);
  CHECK(r.out.find("sweep 1:") != std::string::npos);
  std::ifstream ein(est);
  const auto back = read_estimate(ein);
  CHECK(back.method == EstimateMethod::Exact);

  r = run({"mle", "--in", in, "--format", "csv", "--tol", "1e-300", "--max-iter", "500"});
  REQUIRE(r.code == kExitOk);
  std::vector<double> dev;
  std::istringstream lines(r.out);
  std::string line;
  bool table = false;
  while (std::getline(lines, line)) {
    if (line == "sweep,deviation") { table = true; continue; }
    if (!table) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) break;
    dev.push_back(std::stod(line.substr(comma + 1)));
  }
  REQUIRE(dev.size() == 500);
  CHECK(dev[499] < dev[2]);

  r = run({"mle", "--in", in, "--format", "json", "--no-compare"});
  REQUIRE(r.code == kExitOk);
  const auto j = json::parse(r.out);
  CHECK(j["method"] == "exact");
  CHECK(j["k"] == 1);
  CHECK(j["K2"].size() == 2);
  CHECK_FALSE(j.contains("flipflop_deviation"));
}

TEST_CASE("mle on k > 1 data uses flip-flop") {
  TempDir dir;
  const auto in = dir.file("s.txt");
  run({"sample", "--m1", "3", "--m2", "2", "--n", "3", "--seed", "4", "--out", in});
  const auto r = run({"mle", "--in", in});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("method: flipflop") != std::string::npos);
  CHECK(r.out.find("converged: true") != std::string::npos);
}

TEST_CASE("mle exit codes for nonexistence and degenerate data") {
  TempDir dir;
  const auto in = dir.file("s.txt");
  run({"sample", "--m1", "5", "--m2", "3", "--n", "2", "--seed", "3", "--out", in});
  auto r = run({"mle", "--in", in});
  CHECK(r.code == kExitMleNotExists);
  CHECK(r.err.find("MLE does not exist") != std::string::npos);

  const auto degenerate = dir.file("d.txt");
  write_file(degenerate, "3 2 2\n3 4\n1 0 0 1\n0 1 0 0\n0 0 0 1\n");
  r = run({"mle", "--in", degenerate});
  CHECK(r.code == kExitDegenerate);

  const auto garbage = dir.file("g.txt");
  write_file(garbage, "3 2\n");
  CHECK(run({"mle", "--in", garbage}).code == kExitBadArguments);
}

TEST_CASE("verify-lemma command") {
  const auto r = run({"verify-lemma", "--instances", "100", "--seed", "5"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("lhs = 16640, rhs = 16640") != std::string::npos);
  CHECK(r.out.find("[[179/8, 207/8], [207/8, 251/8]]") != std::string::npos);
  CHECK(r.out.find("random: 100/100 passed") != std::string::npos);

  const auto k1 = run({"verify-lemma", "--m1", "3", "--m2", "2", "--n", "2", "--instances", "5"});
  CHECK(k1.code == kExitOk);
  CHECK(k1.out.find("k = 1: rhs = det(K)^n * ") != std::string::npos);
  CHECK(k1.out.find("random: 5/5 passed") != std::string::npos);
}

TEST_CASE("mldegree table") {
  auto r = run({"mldegree", "--m1", "2-3", "--n", "2-3", "--format", "csv"});
  REQUIRE(r.code == kExitOk);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "m1,n,seed,degree,status,seconds");
  std::map<std::pair<int, int>, std::pair<std::string, std::string>> cells;
  while (std::getline(lines, line)) {
    std::istringstream f(line);
    std::string m1, n, seed, degree, status;
    std::getline(f, m1, ',');
    std::getline(f, n, ',');
    std::getline(f, seed, ',');
    std::getline(f, degree, ',');
    std::getline(f, status, ',');
    cells[{std::stoi(m1), std::stoi(n)}] = {degree, status};
  }
  REQUIRE(cells.size() == 4);
  CHECK(cells[{2, 3}] == std::pair<std::string, std::string>{"3", "ok"});
  CHECK(cells[{3, 2}] == std::pair<std::string, std::string>{"1", "ok"});
  CHECK(cells[{3, 3}] == std::pair<std::string, std::string>{"4", "ok"});
  CHECK(cells[{2, 2}] == std::pair<std::string, std::string>{"0", "degenerate"});

  r = run({"mldegree", "--m1", "3", "--n", "3", "--seed", "1,2", "--format", "json"});
  REQUIRE(r.code == kExitOk);
  const auto j = json::parse(r.out);
  REQUIRE(j["cells"].size() == 2);
  for (const auto& c : j["cells"]) CHECK(c["degree"] == 4);

  r = run({"mldegree", "--m1", "3", "--n", "3", "--pair-budget", "10"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("TIMEOUT") != std::string::npos);
}

TEST_CASE("mldegree cache is reused") {
  TempDir dir;
  const auto cache = dir.file("cache.txt");
  auto r = run({"mldegree", "--m1", "3", "--n", "2-3", "--cache", cache, "--format", "csv"});
  REQUIRE(r.code == kExitOk);
  std::string text = slurp(cache);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  // A doctored entry proves the cached value is served instead of recomputed.
  const auto pos = text.find("3 3 1 4 ");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 8, "3 3 1 5 ");
  write_file(cache, text);
  r = run({"mldegree", "--m1", "3", "--n", "3", "--cache", cache, "--format", "csv"});
  CHECK(r.out.find("3,3,1,5,ok") != std::string::npos);
}

TEST_CASE("multiplicity command") {
  auto r = run({"multiplicity", "--m2", "3", "--k", "2", "--case", "one"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("b = 0 quadratic: 4*t^2 - 11*t - 6") != std::string::npos);
  CHECK(r.out.find("discriminant: 217") != std::string::npos);
  CHECK(r.out.find("solutions: 4") != std::string::npos);
  CHECK(r.out.find("bound <= 5: ok") != std::string::npos);

  r = run({"multiplicity", "--m2", "2", "--k", "2", "--case", "two", "--format", "json"});
  REQUIRE(r.code == kExitOk);
  const auto j = json::parse(r.out);
  CHECK(j["quadratic"] == "4*c^2 - 6");
  CHECK(j["count"] == 2);
  CHECK(j["within_bound"] == true);
}
