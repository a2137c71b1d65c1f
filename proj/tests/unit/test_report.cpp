#include <gtest/gtest.h>

#include "dirdiff/report.hpp"

using namespace dirdiff;

namespace {

ExperimentReport sample() {
  ExperimentReport r;
  r.name = "demo";
  r.columns = {"label", "count", "value"};
  r.add_row({std::string("plain"), std::int64_t{3}, 0.1});
  r.add_row({std::string("has,comma \"q\""), std::int64_t{-1}, 1.0 / 3.0});
  r.check("holds", true, 0.5);
  return r;
}

}  // namespace

TEST(Report, CsvFormatting) {
  EXPECT_EQ(to_csv(sample()),
            "label,count,value\n"
            "plain,3,0.10000000000000001\n"
            "\"has,comma \"\"q\"\"\",-1,0.33333333333333331\n");
}

TEST(Report, RowWidthIsChecked) {
  ExperimentReport r = sample();
  EXPECT_THROW(r.add_row({std::int64_t{1}}), std::logic_error);
}

TEST(Report, MixedColumnsRejected) {
  ExperimentReport a = sample(), b = sample();
  b.columns.back() = "other";
  EXPECT_THROW(to_csv(std::vector<ExperimentReport>{a, b}), std::logic_error);
  EXPECT_EQ(to_csv(std::vector<ExperimentReport>{}), "");
}

TEST(Report, VerdictsDecidePassed) {
  ExperimentReport r = sample();
  EXPECT_TRUE(r.passed());
  r.check("fails", false, -1.0, "note");
  EXPECT_FALSE(r.passed());
  std::ostringstream os;
  print_verdicts(os, r);
  EXPECT_EQ(os.str(), "PASS  demo: holds (margin 0.5)\nFAIL  demo: fails (margin -1) [note]\n");
}

TEST(Report, JsonCarriesEverything) {
  ExperimentReport r = sample();
  r.provenance = {"catalog_surrogate"};
  r.inputs = {{"seed", 7}};
  r.add_row({std::string("inf"), std::int64_t{0}, std::numeric_limits<double>::infinity()});
  const auto j = to_json(r);
  EXPECT_EQ(j["name"], "demo");
  EXPECT_EQ(j["inputs"]["seed"], 7);
  EXPECT_EQ(j["rows"].size(), 3u);
  EXPECT_EQ(j["rows"][2][2], "inf");
  EXPECT_EQ(j["verdicts"][0]["claim"], "holds");
  EXPECT_EQ(j["provenance"][0], "catalog_surrogate");
  EXPECT_TRUE(r.flagged("catalog_surrogate"));
  EXPECT_TRUE(j["passed"].get<bool>());
}
