#include <gtest/gtest.h>

#include <sstream>

#include "gsbound/report.hpp"

using namespace gsbound;

TEST(Report, StableKeysAndBytes) {
  const HNorms n{1.0, 1.0, 1.0, 1.0, std::nullopt};
  const auto r = exponential_closed_bound(equal_groups(1, 20, 2), 1.0, 0.5, n);
  const std::string a = format_report(r);
  const std::string lines = "\n" + a;
  EXPECT_EQ(a, format_report(exponential_closed_bound(equal_groups(1, 20, 2), 1.0, 0.5, n)));
  for (const char* key : {"variant = ", "k1 = ", "k2 = ", "k3 = ", "c = ", "eq2 = ", "term1 = ",
                          "term4 = ", "total = ", "epsilon = ", "warnings = ", "k1.provenance = closed_form"}) {
    EXPECT_NE(lines.find(std::string("\n") + key), std::string::npos) << key;
  }
  EXPECT_EQ(a.rfind("variant = exponential_closed\n", 0), 0u);
}

TEST(Report, NumbersRoundTrip) {
  EXPECT_EQ(std::stod(format_number(0.1)), 0.1);
  EXPECT_EQ(format_number(1.0 / 0.0), "inf");
  EXPECT_EQ(format_number(-1.0 / 0.0), "-inf");
}
