#include "feedresp/hypergeometric.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "feedresp/types.hpp"

using feedresp::hyp2f1_terminating;
using feedresp::log_hyp2f1_terminating;

TEST(Hyp2F1, ZeroOrderIsOne) {
  EXPECT_EQ(hyp2f1_terminating(3.5, 0.0, 2.0, 0.7), 1.0);
  EXPECT_EQ(hyp2f1_terminating(-1.0, 0.0, 9.0, 1.0), 1.0);
}

TEST(Hyp2F1, ZeroArgumentIsOne) {
  EXPECT_EQ(hyp2f1_terminating(3.5, -10.0, 2.0, 0.0), 1.0);
  EXPECT_EQ(hyp2f1_terminating(400.0, -391.0, 405.0, 0.0), 1.0);
}

// Reference values: 120-digit series evaluation (tests/oracles/frozen_values.py).
TEST(Hyp2F1, HighPrecisionReference) {
  EXPECT_NEAR(hyp2f1_terminating(4.0, -3.0, 6.0, 0.5), 0.3125, 1e-15);
  EXPECT_NEAR(hyp2f1_terminating(12.0, -40.0, 30.0, 0.9) / 0.000014048193909490669906, 1.0,
              1e-12);
}

TEST(Hyp2F1, DirectSeriesBranchAgreesWithPfaffBranch) {
  // Negative z takes the direct series; compare with the Pfaff identity.
  const double a = 2.5, b = -7.0, c = 4.0, z = -0.3;
  const double w = z / (z - 1.0);
  const double via_pfaff = std::pow(1.0 - z, -b) * hyp2f1_terminating(c - a, b, c, w);
  EXPECT_NEAR(hyp2f1_terminating(a, b, c, z), via_pfaff, 1e-13 * std::fabs(via_pfaff));
}

TEST(Hyp2F1, ChuVandermondeAtUnitArgument) {
  // 2F1(a, -n; c; 1) = (c-a)_n / (c)_n; n = 3, a = 2, c = 5: (3*4*5)/(5*6*7)
  EXPECT_NEAR(hyp2f1_terminating(2.0, -3.0, 5.0, 1.0), 60.0 / 210.0, 1e-15);
}

TEST(Hyp2F1, NonterminatingIsRejected) {
  EXPECT_THROW(hyp2f1_terminating(1.0, 0.5, 2.0, 0.3), feedresp::DomainError);
  EXPECT_THROW(hyp2f1_terminating(1.0, 2.0, 2.0, 0.3), feedresp::DomainError);
  EXPECT_THROW(hyp2f1_terminating(1.0, -5.0, -2.0, 0.3), feedresp::DomainError);
}

TEST(Hyp2F1, LogFormMatchesValue) {
  const double v = hyp2f1_terminating(30.0, -300.0, 60.0, 0.4);
  EXPECT_GT(v, 0.0);
  EXPECT_NEAR(log_hyp2f1_terminating(30.0, -300.0, 60.0, 0.4), std::log(v), 1e-12);
  // Underflows in linear space but is representable in log space.
  EXPECT_TRUE(std::isfinite(log_hyp2f1_terminating(51.0, -1500.0, 60.0, 0.95)));
}
