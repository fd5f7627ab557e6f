#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "vodfog/demand.hpp"

using namespace vodfog;

namespace {

std::string header() {
  std::string h = "group";
  for (int i = 0; i < 24; ++i) h += ",h" + std::to_string(i);
  return h + "\n";
}

std::string row(const std::string& g, double v, int bad_hour = -1) {
  std::string r = g;
  for (int i = 0; i < 24; ++i) r += "," + text::format_exact(i == bad_hour ? -1 : v);
  return r + "\n";
}

}  // namespace

TEST(Demand, EveningPeakGolden) {
  const auto t = fixtures::nsfnet();
  const auto d = synth_demand(100, DemandShape::evening_peak, t);
  EXPECT_DOUBLE_EQ(d.at(0, 21), 100.0);
  EXPECT_DOUBLE_EQ(d.at(0, 5), 25.0);
  for (int h = 0; h < 24; ++h) {
    EXPECT_LE(d.at(3, h), 100.0 * (1 + 1e-9));
    EXPECT_GE(d.at(3, h), 25.0 * (1 - 1e-9));
  }
}

TEST(Demand, FlatAndZero) {
  const auto t = fixtures::nsfnet();
  const auto flat = synth_demand(100, DemandShape::flat, t);
  const auto zero = synth_demand(0, DemandShape::evening_peak, t);
  for (int g = 0; g < t.group_count(); ++g)
    for (int h = 0; h < 24; ++h) {
      EXPECT_EQ(flat.at(g, h), 100.0);
      EXPECT_EQ(zero.at(g, h), 0.0);
    }
}

TEST(Demand, RatioIsConfigurable) {
  EXPECT_NEAR(evening_peak_level(5, 2.0), 0.5, 1e-12);
  EXPECT_NEAR(evening_peak_level(21, 2.0), 1.0, 1e-12);
}

TEST(Demand, FileRoundTripIsExact) {
  const auto t = fixtures::nsfnet();
  const auto d = synth_demand(123.456, DemandShape::evening_peak, t);
  EXPECT_EQ(load_demand(emit_demand(d, t), t), d);
}

TEST(Demand, LoadsFullNsfnetFile) {
  const auto t = fixtures::nsfnet();
  const auto d = load_demand(text::read_file((fixtures::source_dir() / "data/calibration/demand.csv").string()), t);
  EXPECT_EQ(d.groups(), 14);
  EXPECT_EQ(d.hours(), 24);
  EXPECT_EQ(d.at(0, 21), 300.0);
  EXPECT_EQ(d.at(13, 5), 75.0);
}

TEST(Demand, ZeroFileIsValid) {
  const auto t = fixtures::pair_topo();
  const auto d = load_demand(header() + row("A", 0), t);
  EXPECT_EQ(d.total_at(4), 0.0);
}

TEST(Demand, Errors) {
  const auto t = fixtures::pair_topo();
  try {
    load_demand(header() + row("A", 5, 3), t);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("h3"), std::string::npos);
  }
  EXPECT_THROW(load_demand(header() + row("Z", 1), t), ParseError);
  EXPECT_THROW(load_demand("group,h0,h1\nA,1,2\n", t), ParseError);
  EXPECT_THROW(load_demand(header() + row("A", 1) + row("A", 2), t), ParseError);
}
