#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "projbandit/wine.hpp"
#include "support.hpp"

using namespace projbandit;

namespace {

const char* kHeader =
    "\"fixed acidity\";\"volatile acidity\";\"citric acid\";\"residual sugar\";\"chlorides\";"
    "\"free sulfur dioxide\";\"total sulfur dioxide\";\"density\";\"pH\";\"sulphates\";"
    "\"alcohol\";\"quality\"\n";

// Rows shaped like the public file; quality cycles through 3..9.
std::string fixture(int rows) {
  std::ostringstream out;
  out << kHeader;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < kWineFeatureCount; ++j) out << (i + 1) * 0.01 + j << ';';
    out << 3 + i % 7 << '\n';
  }
  return out.str();
}

std::vector<WineRecord> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_wine_csv(in, "fixture.csv");
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("parses the public file layout") {
  const auto records = parse(fixture(10));
  REQUIRE(records.size() == 10);
  CHECK(records[0].quality == 3);
  CHECK(records[0].features[0] == doctest::Approx(0.01));
  CHECK(records[0].features[10] == doctest::Approx(10.01));
  CHECK(records[6].quality == 9);
}

TEST_CASE("parse errors name the line") {
  std::string truncated = fixture(5);
  truncated += "1;2;3\n";
  CHECK(error_line(truncated) == 7);

  std::string bad_number = fixture(2);
  bad_number += "1;2;3;4;5;6;7;8;9;x;11;6\n";
  CHECK(error_line(bad_number) == 4);

  std::string bad_quality = fixture(1);
  bad_quality += "1;2;3;4;5;6;7;8;9;10;11;6.5\n";
  CHECK(error_line(bad_quality) == 3);

  std::string out_of_range = fixture(1);
  out_of_range += "1;2;3;4;5;6;7;8;9;10;11;12\n";
  CHECK(error_line(out_of_range) == 3);

  CHECK(error_line("a;b;c\n") == 1);
  CHECK(error_line("") == 0);

  try {
    parse(truncated);
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("fixture.csv:7") != std::string::npos);
  }
}

TEST_CASE("missing file is reported with its path") {
  CHECK_THROWS_WITH_AS(load_wine_csv("/nonexistent/wine.csv"),
                       doctest::Contains("/nonexistent/wine.csv"), std::exception);
}

TEST_CASE("loads from disk") {
  const auto path = std::filesystem::temp_directory_path() / "projbandit_wine_fixture.csv";
  {
    std::ofstream out(path);
    out << fixture(300);
  }
  const auto records = load_wine_csv(path);
  CHECK(records.size() == 300);
  std::filesystem::remove(path);
}

TEST_CASE("decision set construction") {
  const auto records = parse(fixture(700));
  Rng rng(99);
  const auto inst = build_wine_decision_set(records, rng);
  CHECK(inst.set.size() == kWineArmsPerTrial);
  CHECK(inst.set.dim() == 13);
  CHECK(inst.arms.size() == 200u);
  for (int i = 0; i < 13; ++i) CHECK(inst.projector.matrix()(i, i) == (i < 12 ? 1.0 : 0.0));
  CHECK(inst.projector.matrix().sum() == 12.0);

  std::set<double> distinct_first;
  for (std::size_t i = 0; i < inst.arms.size(); ++i) {
    const auto& a = inst.arms[i];
    CHECK(a.features(11) == 1.0);
    CHECK(a.features(12) >= 0.0);
    CHECK(a.features(12) < 1.0);
    CHECK(a.projection_value >= kWineMinQuality);
    CHECK(a.projection_value <= kWineMaxQuality);
    // The invariant holds exactly, not approximately.
    CHECK(a.observed_value + kWineCorruptionScale * a.features(12) == a.projection_value);
    CHECK(inst.set.arm(static_cast<int>(i)) == a.features);
    distinct_first.insert(a.features(0));
  }
  // Fixture rows have distinct first columns, so 200 distinct source rows.
  CHECK(distinct_first.size() == 200u);
}

TEST_CASE("corruption formula") {
  CHECK(6.0 - kWineCorruptionScale * 0.25 == 5.0);
}

TEST_CASE("sampling is reproducible per seed") {
  const auto records = parse(fixture(700));
  Rng a(5), b(5), c(6);
  const auto ia = build_wine_decision_set(records, a);
  const auto ib = build_wine_decision_set(records, b);
  const auto ic = build_wine_decision_set(records, c);
  bool same = true, differs = false;
  for (int i = 0; i < 200; ++i) {
    same = same && ia.set.arm(i) == ib.set.arm(i);
    differs = differs || ia.set.arm(i) != ic.set.arm(i);
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("too few eligible wines") {
  // 7-cycle of qualities: 5 of every 7 rows are in 4..8, so 250 rows give < 200.
  const auto records = parse(fixture(250));
  Rng rng(1);
  CHECK_THROWS_AS(build_wine_decision_set(records, rng), InsufficientDataError);
}

TEST_CASE("standardized features have zero mean over the loaded records") {
  const auto records = parse(fixture(1400));
  Rng rng(3);
  const auto inst = build_wine_decision_set(records, rng, WineOptions{true});
  for (const auto& a : inst.arms) {
    CHECK(std::abs(a.features(0)) < 2.0);
    CHECK(a.features(11) == 1.0);
  }
}
