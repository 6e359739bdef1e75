#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "morita/cli.hpp"
#include "morita/structure.hpp"
#include "morita/text.hpp"
#include "support.hpp"

using namespace morita;
using namespace morita::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

// Runs with the corpus as working directory so reported paths stay relative.
Outcome run_in_corpus(const std::vector<std::string>& args) {
  auto previous = fs::current_path();
  fs::current_path(corpus_path());
  std::ostringstream out, err;
  Outcome o;
  o.code = run(args, out, err);
  fs::current_path(previous);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::vector<std::string> split_args(const std::string& line) {
  std::vector<std::string> args;
  std::string cur;
  bool quoted = false, any = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      any = true;
    } else if (c == ' ' && !quoted) {
      if (any) args.push_back(cur);
      cur.clear();
      any = false;
    } else {
      cur += c;
      any = true;
    }
  }
  if (any) args.push_back(cur);
  return args;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Output of the installed binary, through the shell.
std::string run_binary(const std::string& args) {
  std::string cmd = "cd '" + corpus_path().string() + "' && '" MORITA_CLI "' " + args + " 2>&1";
  std::string result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.append(buf.data(), n);
  pclose(pipe);
  return result;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run_in_corpus({"check", "partition.th"}).code == 0);
  CHECK(run_in_corpus({"verify-witness", "partition.wit", "--bound", "2"}).code == 0);
  CHECK(run_in_corpus({"verify-witness", "partition.wit", "--bound", "2", "--definitional"}).code == 1);
  CHECK(run_in_corpus({"category", "--truncation", "4", "--bound", "1"}).code == 1);
  CHECK(run_in_corpus({"frobnicate"}).code == 2);
  CHECK(run_in_corpus({"check"}).code == 2);
  CHECK(run_in_corpus({"check", "partition.th", "--bound", "0"}).code == 2);
  CHECK(run_in_corpus({"check", "partition.th", "--format", "yaml"}).code == 2);
}

TEST_CASE("an invalid step is a failed verdict") {
  auto dir = fs::temp_directory_path() / "morita_cli_test";
  fs::create_directories(dir);
  std::ofstream(dir / "bare.th") << "sort s\npred p : s\n";
  std::ofstream(dir / "sub.ext") << "define sort t = subsort s with i where p(x)\n";
  auto o = run_in_corpus({"check", (dir / "bare.th").string(), "--step", (dir / "sub.ext").string(),
                          "--bound", "2"});
  CHECK(o.code == 1);
  CHECK(o.out.find("Invalid") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("input errors name the file and line") {
  auto missing = run_in_corpus({"check", "no_such_theory.th"});
  CHECK(missing.code == 2);
  CHECK(missing.out.empty());
  CHECK(missing.err.find("no_such_theory.th") != std::string::npos);

  auto dir = fs::temp_directory_path() / "morita_cli_parse";
  fs::create_directories(dir);
  std::ofstream(dir / "broken.th") << "sort s\npred p : s\naxiom forall s x. p(x) & & p(x)\n";
  auto broken = run_in_corpus({"check", (dir / "broken.th").string()});
  CHECK(broken.code == 2);
  CHECK(broken.err.find("broken.th:3:") != std::string::npos);
  fs::remove_all(dir);

  auto formula = run_in_corpus({"translate", "--theory", "exists_p.th", "--step",
                                "exists_p_subsort.ext", "--formula", "exists sp z. q(z)"});
  CHECK(formula.code == 2);
  CHECK_FALSE(formula.err.empty());
}

TEST_CASE("translate prints a base formula") {
  auto o = run_in_corpus({"translate", "--theory", "exists_p.th", "--step", "exists_p_subsort.ext",
                          "--formula", "exists sp z. z = z", "--simplify"});
  REQUIRE(o.code == 0);
  auto T = load_theory(corpus_path("exists_p.th"));
  std::string line = o.out.substr(0, o.out.find('\n'));
  auto star = parse_formula(T.signature, line);
  for (const auto& M : enumerate_models(T, Bound(3))) CHECK(satisfies(M, star));
  Theory empty{T.signature, {}};
  for (const auto& M : enumerate_models(empty, Bound(2))) {
    bool some = false;
    for (const auto& a : M.carrier("s")) some = some || M.holds("p", {a});
    CHECK(satisfies(M, star) == some);
  }

  auto deep = run_in_corpus({"translate", "--theory", "exists_p.th", "--step", "exists_p_subsort.ext",
                             "--formula", "exists sp z. exists sp w. z = w", "--max-formula-depth", "1"});
  CHECK(deep.code == 2);

  auto codes = run_in_corpus({"translate", "--theory", "two_sorts.th", "--step", "two_sorts_union.ext",
                              "--formula", "i2(x) = z", "--var", "x:s2", "--var", "z:s1", "--code", "2"});
  CHECK(codes.code == 0);
  CHECK(codes.out.find("code 2") != std::string::npos);
  CHECK(codes.out.find("code 1") == std::string::npos);
}

TEST_CASE("structured output is json") {
  const std::vector<std::vector<std::string>> commands{
      {"check", "partition.th", "--step", "partition_subsorts.ext"},
      {"models", "partition.th", "--bound", "3"},
      {"expand", "exists_p.th", "--step", "exists_p_subsort.ext", "--bound", "2"},
      {"verify-witness", "partition.wit", "--bound", "2"},
      {"category", "--truncation", "3", "--bound", "1"},
      {"check-pi", "--witness", "partition.wit", "--bound", "2"},
      {"translate", "--theory", "exists_p.th", "--step", "exists_p_subsort.ext", "--formula",
       "exists sp z. z = z"},
  };
  for (auto args : commands) {
    args.push_back("--format");
    args.push_back("structured");
    CAPTURE(args[0]);
    auto o = run_in_corpus(args);
    CHECK(o.code <= 1);
    nlohmann::json doc;
    CHECK_NOTHROW(doc = nlohmann::json::parse(o.out));
    CHECK((doc.is_object() || doc.is_array()));
  }
  auto o = run_in_corpus({"models", "partition.th", "--bound", "3", "--format", "structured"});
  auto doc = nlohmann::json::parse(o.out);
  CHECK(doc.dump().find("3") != std::string::npos);
  auto w = nlohmann::json::parse(
      run_in_corpus({"verify-witness", "partition.wit", "--bound", "2", "--format", "structured"}).out);
  CHECK(w.dump().find("VerifiedUpToBound") != std::string::npos);
}

TEST_CASE("every verdict names its bound") {
  auto o = run_in_corpus({"verify-witness", "group.wit", "--bound", "3"});
  CHECK(o.out.find("VerifiedUpToBound(3)") != std::string::npos);
  auto m = run_in_corpus({"models", "partition.th", "--bound", "2"});
  CHECK(m.out.find("bound 2") != std::string::npos);
}

TEST_CASE("golden outputs") {
  auto dir = corpus_path("golden");
  std::ifstream manifest(dir / "commands.txt");
  REQUIRE(manifest);
  bool update = std::getenv("MORITA_UPDATE_GOLDEN") != nullptr;
  int cases = 0;
  std::string line;
  while (std::getline(manifest, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto colon = line.find(':');
    std::string name = line.substr(0, colon);
    CAPTURE(name);
    auto o = run_in_corpus(split_args(line.substr(colon + 1)));
    std::string actual = "exit " + std::to_string(o.code) + "\n" + o.out;
    auto file = dir / (name + ".out");
    if (update) std::ofstream(file, std::ios::binary) << actual;
    REQUIRE(fs::exists(file));
    CHECK(slurp(file) == actual);
    ++cases;
  }
  CHECK(cases >= 12);
}

TEST_CASE("output is byte-identical across processes") {
  for (const std::string args :
       {"verify-witness partition.wit --bound 3", "models group_unit.th --bound 4",
        "translate --theory two_sorts.th --step two_sorts_union.ext --formula 'exists s1 z. z = z'",
        "check-pi --theory relation.th --step relation_pairs.ext --bound 2 --format structured"}) {
    CAPTURE(args);
    auto first = run_binary(args);
    CHECK_FALSE(first.empty());
    CHECK(run_binary(args) == first);
  }
}
