#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "skewtorus/modes.hpp"

namespace st = skewtorus;

namespace {

void expect_local_maximum(const st::SkewModel& m, const st::Mode& mode) {
  const double c = m.log_density(mode.point);
  for (double a : {-1e-3, 0.0, 1e-3})
    for (double b : {-1e-3, 0.0, 1e-3}) {
      const double x[2] = {mode.point[0] + a, mode.point[1] + b};
      EXPECT_LE(m.log_density(x), c + 1e-12);
    }
}

}  // namespace

TEST(Modes, SkewedWrappedCauchyHasTwoModes) {
  const st::TorusPoint mu{0, 0};
  const auto th = st::FamilyParams::wrapped_cauchy(0.1, 0.5, 0.5);
  const st::SkewModel skewed(mu, th, {1, 0});
  const auto modes = st::find_modes(skewed);
  ASSERT_EQ(modes.size(), 2u);
  EXPECT_GT(modes[0].density, modes[1].density);
  for (const auto& m : modes) expect_local_maximum(skewed, m);
  EXPECT_EQ(st::find_modes(st::SkewModel::symmetric(mu, th)).size(), 1u);
}

TEST(Modes, UnimodalSineAtCentre) {
  const st::SkewModel m(st::TorusPoint{0.5, -2.0}, st::FamilyParams::sine({2, 2}, {1}), {0, 0});
  const auto modes = st::find_modes(m);
  ASSERT_EQ(modes.size(), 1u);
  EXPECT_NEAR(st::angle_diff(modes[0].point[0], 0.5), 0.0, 1e-7);
  EXPECT_NEAR(st::angle_diff(modes[0].point[1], -2.0), 0.0, 1e-7);
  EXPECT_NEAR(modes[0].density, std::exp(m.log_density(m.mu())), 1e-12);
}

TEST(Modes, BimodalSine) {
  const st::SkewModel m(st::TorusPoint{0, 0}, st::FamilyParams::sine({1, 1}, {2}), {0, 0});
  const auto modes = st::find_modes(m);
  ASSERT_EQ(modes.size(), 2u);
  // symmetric pair y and -y
  EXPECT_NEAR(st::angle_diff(modes[0].point[0], -modes[1].point[0]), 0.0, 1e-6);
  EXPECT_NEAR(modes[0].density, modes[1].density, 1e-10);
}

TEST(Modes, UniformRidge) {
  const st::SkewModel m(st::TorusPoint{0, 0}, st::FamilyParams::uniform(2), {1, 0});
  const auto modes = st::find_modes(m);
  ASSERT_EQ(modes.size(), 1u);
  EXPECT_NEAR(modes[0].point[0], oracle::kPi / 2, 1e-12);
  EXPECT_FALSE(modes[0].ridge[0]);
  EXPECT_TRUE(modes[0].ridge[1]);
  EXPECT_NEAR(modes[0].density, 2 / (4 * oracle::kPi * oracle::kPi), 1e-14);
}

TEST(Modes, SortedAndMaximal) {
  oracle::Gen gen(44);
  for (int rep = 0; rep < 6; ++rep) {
    const auto l = gen.lambda(2);
    const st::SkewModel m(st::TorusPoint{gen.angle(), gen.angle()},
                          st::FamilyParams::cosine({gen.uniform(0.2, 3), gen.uniform(0.2, 3)}, {gen.uniform(-3, 3)}), l);
    st::ModeSearchOptions o;
    o.grid_n = 120;
    const auto modes = st::find_modes(m, o);
    ASSERT_FALSE(modes.empty());
    for (std::size_t i = 1; i < modes.size(); ++i) EXPECT_GE(modes[i - 1].density, modes[i].density);
    for (const auto& md : modes) expect_local_maximum(m, md);
  }
}
