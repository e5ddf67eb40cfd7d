#include <catch2/catch_amalgamated.hpp>

#include <bunkbed/lemmas.hpp>

using namespace bunkbed;

TEST_CASE("lemma suite passes over the tiny census") {
  LemmaSuiteOptions opt;
  opt.max_n = 3;
  const std::vector<LemmaRow> rows = run_lemma_suite(opt);
  REQUIRE(rows.size() == 8);
  for (const LemmaRow& row : rows) {
    CAPTURE(row.name, row.detail);
    CHECK(row.pass);
    CHECK(row.checks > 0);
    CHECK(row.detail.empty());
  }

  const std::vector<std::string> names = {
      "percolation matches uniform orientation at p=1/2",
      "switching-walk margins nonnegative",
      "orientation reversal pairing",
      "coloring margins vanish on separating transversals",
      "independent-copies margins nonnegative for |T| <= 1",
      "cut-vertex factorization",
      "reduction soundness",
      "conditioning soundness",
  };
  for (size_t i = 0; i < names.size(); ++i) CHECK(rows[i].name == names[i]);
}

TEST_CASE("lemma suite passes at four vertices") {
  LemmaSuiteOptions opt;
  opt.max_n = 4;
  opt.jobs = 4;
  const std::vector<LemmaRow> rows = run_lemma_suite(opt);
  REQUIRE(rows.size() == 8);
  uint64_t total_checks = 0;
  for (const LemmaRow& row : rows) {
    CAPTURE(row.name, row.detail);
    CHECK(row.pass);
    total_checks += row.checks;
  }
  CHECK(total_checks > 10000);
}

TEST_CASE("lemma suite reports the walk/coloring disagreement") {
  LemmaSuiteOptions opt;
  opt.max_n = 2;
  opt.with_figure2 = true;
  const std::vector<LemmaRow> rows = run_lemma_suite(opt);
  REQUIRE(rows.size() == 9);
  const LemmaRow& fig = rows.back();
  CHECK(fig.name == "four-vertex five-edge walk/coloring disagreement");
  CHECK(fig.pass);
  CHECK(fig.detail.find("walk 13/16") != std::string::npos);
  CHECK(fig.detail.find("coloring 7/8") != std::string::npos);
  CHECK(fig.detail.find("gap 1/16") != std::string::npos);
}

TEST_CASE("lemma suite negative control fails loudly") {
  LemmaSuiteOptions opt;
  opt.max_n = 2;
  opt.with_negative_control = true;
  const std::vector<LemmaRow> rows = run_lemma_suite(opt);
  REQUIRE(rows.size() == 9);
  const LemmaRow& control = rows.back();
  CHECK(control.name == "negative control: corrupted weight must fail");
  CHECK_FALSE(control.pass);
  CHECK(control.detail == "intentional corruption detected");
}

TEST_CASE("lemma suite rows are identical for any worker count") {
  LemmaSuiteOptions serial;
  serial.max_n = 3;
  serial.with_figure2 = true;
  LemmaSuiteOptions parallel = serial;
  parallel.jobs = 4;

  const std::vector<LemmaRow> a = run_lemma_suite(serial);
  const std::vector<LemmaRow> b = run_lemma_suite(parallel);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].pass == b[i].pass);
    CHECK(a[i].checks == b[i].checks);
    CHECK(a[i].detail == b[i].detail);
  }
}
