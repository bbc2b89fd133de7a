#include <gtest/gtest.h>

#include "sgflow/error.hpp"
#include "sgflow/lorentzian.hpp"

namespace sgflow {
namespace {

TEST(LorentzianSquare, VolumeFormInThreeDimensions) {
  const LorentzianAlgebraForm vol = LorentzianAlgebraForm::volume(3, 2.0);
  const std::vector<double> sq = vol.square();
  EXPECT_DOUBLE_EQ(sq[0], 4.0);
  EXPECT_DOUBLE_EQ(sq[4], -4.0);
  EXPECT_DOUBLE_EQ(sq[8], -4.0);
  const ConformalVerdict v = proposition1_check(3, vol);
  EXPECT_TRUE(v.conformal);
  EXPECT_FALSE(v.forced_trivial);
  EXPECT_DOUBLE_EQ(v.c, -4.0);
}

TEST(LorentzianSquare, SpacelikeOneFormIsNotConformal) {
  const LorentzianAlgebraForm e1(3, 1, {0.0, 1.0, 0.0});
  const std::vector<double> sq = e1.square();
  EXPECT_DOUBLE_EQ(sq[4], 1.0);
  EXPECT_FALSE(proposition1_check(3, e1).conformal);
}

TEST(LorentzianSquare, EuclideanSelfDualPairFailsInLorentzianSignature) {
  // e01 + e23: basis order 01, 02, 03, 12, 13, 23.
  const LorentzianAlgebraForm a(4, 2, {1.0, 0.0, 0.0, 0.0, 0.0, 1.0});
  const std::vector<double> sq = a.square();
  EXPECT_DOUBLE_EQ(sq[0 * 4 + 0], 1.0);
  EXPECT_DOUBLE_EQ(sq[1 * 4 + 1], -1.0);
  EXPECT_DOUBLE_EQ(sq[2 * 4 + 2], 1.0);
  EXPECT_DOUBLE_EQ(sq[3 * 4 + 3], 1.0);
  EXPECT_FALSE(proposition1_check(4, a).conformal);
}

TEST(LorentzianSquare, ZeroAndConstantFormsAreTrivial) {
  const ConformalVerdict zero = proposition1_check(4, LorentzianAlgebraForm(4, 2));
  EXPECT_TRUE(zero.conformal);
  EXPECT_FALSE(zero.forced_trivial);
  const ConformalVerdict constant = proposition1_check(3, LorentzianAlgebraForm(3, 0, {3.0}));
  EXPECT_TRUE(constant.conformal);
  EXPECT_FALSE(constant.forced_trivial);
}

TEST(LorentzianSquare, ShapeErrors) {
  EXPECT_THROW(LorentzianAlgebraForm(3, 1, {1.0}), ShapeError);
  EXPECT_THROW(LorentzianAlgebraForm(3, 4), ShapeError);
  EXPECT_THROW(proposition1_check(4, LorentzianAlgebraForm(3, 1)), ShapeError);
}

}  // namespace
}  // namespace sgflow
