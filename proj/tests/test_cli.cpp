#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"bunkbed"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult result;
  result.code = bunkbed::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

/// Writes the test instances once into a temp directory and hands out paths.
const std::string& fixture_dir() {
  static const std::string dir = [] {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "bunkbed-cli-tests";
    fs::create_directories(root);
    auto put = [&](const char* name, const char* text) {
      std::ofstream(root / name) << text;
    };
    put("p1.g", "2 1\n0 1\nnames: u=0 v=1\n");
    put("p2.g", "3 2\n0 1\n1 2\nT: 1\nnames: u=0 x=1 v=2\n");
    put("p3.g", "4 3\n0 1\n1 2\n2 3\nnames: u=0 v=3\n");
    put("figure2.g", "4 5\n0 2\n0 3\n1 2\n1 3\n2 3\nT: 0 1\nnames: u=0 v=1\n");
    put("long13.g",
        "14 13\n0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 8\n8 9\n9 10\n10 11\n11 12\n12 13\n"
        "names: u=0 v=13\n");
    put("broken.g", "2 1\n0 5\n");
    return root.string();
  }();
  return dir;
}

std::string inst(const char* name) { return fixture_dir() + "/" + name; }

nlohmann::json parse_json(const std::string& text) { return nlohmann::json::parse(text); }

}  // namespace

TEST_CASE("cli computes the documented coloring probability") {
  const CliResult r = run({"compute", "--model", "e3", "--graph", inst("p2.g"), "--from", "u",
                           "--to", "v", "--layer", "0"});
  CHECK(r.code == 0);
  CHECK(r.out == "1/4\n");
  CHECK(r.err.empty());

  const CliResult upper = run({"compute", "--model", "e3", "--graph", inst("p2.g"), "--from",
                               "u", "--to", "v", "--layer", "1"});
  CHECK(upper.out == "1/4\n");
}

TEST_CASE("cli decimal tagging and json output") {
  const CliResult tagged = run({"compute", "--model", "e3", "--graph", inst("p2.g"), "--from",
                                "u", "--to", "v", "--layer", "0", "--decimal"});
  CHECK(tagged.out == "1/4 (0.25)\n");

  const CliResult json = run({"compute", "--model", "e3", "--graph", inst("p2.g"), "--from",
                              "u", "--to", "v", "--layer", "0", "--format", "json"});
  CHECK(json.code == 0);
  const auto j = parse_json(json.out);
  CHECK(j.at("schema") == 1);
  CHECK(j.at("command") == "compute");
  CHECK(j.at("model") == "e3");
  CHECK(j.at("value") == "1/4");
}

TEST_CASE("cli computes with conditioned colors") {
  const CliResult zero = run({"compute", "--model", "e3", "--graph", inst("p2.g"), "--from",
                              "u", "--to", "v", "--layer", "0", "--tie-different", "0,1"});
  CHECK(zero.out == "0\n");
  const CliResult half = run({"compute", "--model", "e3", "--graph", inst("p2.g"), "--from",
                              "u", "--to", "v", "--layer", "1", "--tie-different", "0,1"});
  CHECK(half.out == "1/2\n");
}

TEST_CASE("cli renders connection polynomials") {
  const CliResult r = run({"poly", "--model", "e5", "--graph", inst("p2.g"), "--from", "u",
                           "--to", "v", "--layer", "0"});
  CHECK(r.code == 0);
  CHECK(r.out == "p^2\n");

  const CliResult j = run({"poly", "--model", "e5", "--graph", inst("p2.g"), "--from", "u",
                           "--to", "v", "--layer", "0", "--format", "json"});
  const auto parsed = parse_json(j.out);
  CHECK(parsed.at("poly").at("degree") == 2);
  CHECK(parsed.at("poly").at("coefficients")[2] == "1");
}

TEST_CASE("cli layer averages") {
  const CliResult poly = run({"average", "--graph", inst("p1.g"), "--from", "u", "--to", "v",
                              "--layer", "0"});
  CHECK(poly.out == "1/4 + 3/4 p\n");
  const CliResult other = run({"average", "--graph", inst("p1.g"), "--from", "u", "--to", "v",
                               "--layer", "1"});
  CHECK(other.out == "1/2\n");
  const CliResult at = run({"average", "--graph", inst("p1.g"), "--from", "u", "--to", "v",
                            "--layer", "0", "--p", "1/3"});
  CHECK(at.out == "1/2\n");
}

TEST_CASE("cli isolates the crossing point of the single edge") {
  const CliResult r = run({"critical", "--graph", inst("p1.g"), "--from", "u", "--to", "v",
                           "--tol", "1e-9"});
  CHECK(r.code == 0);
  CHECK(r.out.find("roots in [0,1]: 1") != std::string::npos);
  CHECK(r.out.find("sign - -> +") != std::string::npos);

  // The reported interval must trap 1/3 within the tolerance.
  const CliResult j = run({"critical", "--graph", inst("p1.g"), "--from", "u", "--to", "v",
                           "--tol", "1e-9", "--format", "json"});
  const auto parsed = parse_json(j.out);
  const auto& root = parsed.at("roots")[0];
  const bunkbed::Rational lo = bunkbed::parse_rational(root.at("lo").get<std::string>());
  const bunkbed::Rational hi = bunkbed::parse_rational(root.at("hi").get<std::string>());
  CHECK(lo <= bunkbed::Rational(1, 3));
  CHECK(bunkbed::Rational(1, 3) <= hi);
  CHECK(hi - lo <= bunkbed::Rational(1, 1000000000));
}

TEST_CASE("cli monte carlo output is seed-deterministic across job counts") {
  const std::vector<std::string> base{"estimate", "--model", "e3",     "--graph", inst("p2.g"),
                                      "--from",   "u",       "--to",   "v",       "--layer",
                                      "0",        "--samples", "20000", "--seed",  "9"};
  const CliResult a = run(base);
  CHECK(a.code == 0);
  CHECK(a.out.find("hits: ") != std::string::npos);
  CHECK(a.out.find("std-error: ") != std::string::npos);

  const CliResult b = run(base);
  CHECK(a.out == b.out);

  std::vector<std::string> parallel = base;
  parallel.push_back("--jobs");
  parallel.push_back("4");
  const CliResult c = run(parallel);
  CHECK(c.out == a.out);
}

TEST_CASE("cli lemma verification") {
  const CliResult ok = run({"verify-lemmas", "--max-n", "2"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("summary: 8 passed, 0 failed") != std::string::npos);
  CHECK(ok.out.find("FAIL") == std::string::npos);

  const CliResult control = run({"verify-lemmas", "--max-n", "2", "--with-negative-control"});
  CHECK(control.code == 1);
  CHECK(control.out.find("FAIL negative control") != std::string::npos);
  CHECK(control.out.find("intentional corruption detected") != std::string::npos);
}

TEST_CASE("cli reduction report") {
  const CliResult r = run({"reduce", "--op", "v2", "--graph", inst("p3.g"), "--from", "u",
                           "--to", "v", "--vertex", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("op: v2") != std::string::npos);
  CHECK(r.out.find("child 0: weight 1/2") != std::string::npos);
  CHECK(r.out.find("verified: yes") != std::string::npos);

  const CliResult bad = run({"reduce", "--op", "v2", "--graph", inst("p3.g"), "--from", "u",
                             "--to", "v", "--vertex", "0"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("error:") != std::string::npos);

  const CliResult hybrid = run({"reduce", "--op", "e2-condition", "--graph", inst("p3.g"),
                                "--from", "u", "--to", "v", "--edge", "1", "--p", "1/3"});
  CHECK(hybrid.code == 0);
  CHECK(hybrid.out.find("op: e2-condition at edge 1") != std::string::npos);
  CHECK(hybrid.out.find("weight 1/9") != std::string::npos);
  CHECK(hybrid.out.find("weight 4/9") != std::string::npos);
  CHECK(hybrid.out.find("verified: yes") != std::string::npos);
}

TEST_CASE("cli scan summary and anti-correlated finding") {
  const CliResult ok = run({"scan", "--model", "e3", "--max-n", "3"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("instances: 4  margins: 104") != std::string::npos);
  CHECK(ok.out.find("violations: none") != std::string::npos);

  const CliResult finding = run({"scan", "--model", "e3", "--max-n", "3", "--anti-correlated"});
  CHECK(finding.code == 1);
  CHECK(finding.out.find("min margin: -1/2") != std::string::npos);
  CHECK(finding.out.find("tie=0,1") != std::string::npos);
  CHECK(finding.out.find("violations: 2") != std::string::npos);

  const CliResult json = run({"scan", "--model", "e3", "--max-n", "3", "--format", "json"});
  const auto j = parse_json(json.out);
  CHECK(j.at("schema") == 1);
  CHECK(j.at("total_instances") == 4);
  CHECK(j.at("violations").empty());
}

TEST_CASE("cli scan output is identical for any worker count") {
  const CliResult serial = run({"scan", "--model", "d2", "--max-n", "3"});
  const CliResult parallel = run({"scan", "--model", "d2", "--max-n", "3", "--jobs", "4"});
  CHECK(serial.code == 0);
  CHECK(serial.out == parallel.out);
}

TEST_CASE("cli reconstructs the four-vertex five-edge example") {
  const CliResult r = run({"find-figure2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("d3=13/16") != std::string::npos);
  CHECK(r.out.find("e3=7/8") != std::string::npos);
  CHECK(r.out.find("T={") != std::string::npos);

  const CliResult j = run({"find-figure2", "--format", "json"});
  const auto parsed = parse_json(j.out);
  REQUIRE(parsed.at("matches").size() >= 1);
  CHECK(parsed.at("matches")[0].at("d3") == "13/16");
  CHECK(parsed.at("matches")[0].at("e3") == "7/8");
}

TEST_CASE("cli usage and guard errors exit with status two") {
  const CliResult unknown = run({"frobnicate"});
  CHECK(unknown.code == 2);

  const CliResult missing = run({"compute", "--model", "e3", "--graph",
                                 fixture_dir() + "/nonexistent.g", "--from", "u", "--to", "v"});
  CHECK(missing.code == 2);
  CHECK_FALSE(missing.err.empty());

  const CliResult badname = run({"compute", "--model", "e3", "--graph", inst("p2.g"), "--from",
                                 "w", "--to", "v"});
  CHECK(badname.code == 2);
  CHECK(badname.err.find("error:") != std::string::npos);

  const CliResult malformed = run({"compute", "--model", "e3", "--graph", inst("broken.g"),
                                   "--from", "0", "--to", "1"});
  CHECK(malformed.code == 2);
  CHECK(malformed.err.find("parse:") != std::string::npos);
  CHECK(malformed.err.find("line 2") != std::string::npos);

  const CliResult guarded = run({"compute", "--model", "d3", "--graph", inst("long13.g"),
                                 "--from", "u", "--to", "v"});
  CHECK(guarded.code == 2);
  CHECK(guarded.err.find("guard:") != std::string::npos);
  CHECK(guarded.err.find("12 edges") != std::string::npos);
}

TEST_CASE("cli help exits cleanly") {
  const CliResult top = run({"--help"});
  CHECK(top.code == 0);
  CHECK(top.out.find("compute") != std::string::npos);

  const CliResult sub = run({"compute", "--help"});
  CHECK(sub.code == 0);
}

TEST_CASE("cli timing goes to the error stream only") {
  const std::vector<std::string> base{"compute", "--model", "e3", "--graph", inst("p2.g"),
                                      "--from", "u", "--to", "v", "--layer", "0"};
  const CliResult plain = run(base);
  std::vector<std::string> timed = base;
  timed.push_back("--timing");
  const CliResult with_timing = run(timed);
  CHECK(with_timing.out == plain.out);
  CHECK(with_timing.err.find("elapsed: ") != std::string::npos);
}

TEST_CASE("cli computes walk models on the reconstructed instance") {
  for (const char* layer : {"0", "1"}) {
    const CliResult d3 = run({"compute", "--model", "d3", "--graph", inst("figure2.g"),
                              "--from", "u", "--to", "v", "--layer", layer});
    CHECK(d3.out == "13/16\n");
    const CliResult d2 = run({"compute", "--model", "d2", "--graph", inst("figure2.g"),
                              "--from", "u", "--to", "v", "--layer", layer});
    CHECK(d2.out == "13/16\n");
    const CliResult e3 = run({"compute", "--model", "e3", "--graph", inst("figure2.g"),
                              "--from", "u", "--to", "v", "--layer", layer});
    CHECK(e3.out == "7/8\n");
  }
}
