#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "skewtorus/errors.hpp"
#include "skewtorus/families.hpp"
#include "skewtorus/modes.hpp"
#include "skewtorus/numerics.hpp"
#include "skewtorus/skew.hpp"

namespace st = skewtorus;
namespace nm = skewtorus::numerics;

namespace {

const double kSweepKappa[] = {0.5, 2.0, 10.0, 50.0};
const double kSweepR[] = {-5.0, 0.0, 5.0};
const double kWcKappa[] = {0.1, 0.5, 0.9};
const double kWcR[] = {-0.8, 0.0, 0.8};

std::vector<st::FamilyParams> sweep() {
  std::vector<st::FamilyParams> out;
  for (double k1 : kSweepKappa)
    for (double k2 : kSweepKappa)
      for (double r : kSweepR) {
        out.push_back(st::FamilyParams::sine({k1, k2}, {r}));
        out.push_back(st::FamilyParams::cosine({k1, k2}, {r}));
      }
  for (double k1 : kWcKappa)
    for (double k2 : kWcKappa)
      for (double r : kWcR) out.push_back(st::FamilyParams::wrapped_cauchy(k1, k2, r));
  out.push_back(st::FamilyParams::uniform(2));
  return out;
}

oracle::Bivariate as_oracle(const st::FamilyParams& p) {
  oracle::Bivariate m;
  switch (p.family()) {
    case st::Family::Uniform: m.kind = oracle::Bivariate::Uniform; return m;
    case st::Family::Sine: m.kind = oracle::Bivariate::Sine; break;
    case st::Family::Cosine: m.kind = oracle::Bivariate::Cosine; break;
    case st::Family::WrappedCauchy: m.kind = oracle::Bivariate::WC; break;
  }
  m.k1 = p.kappa()[0];
  m.k2 = p.kappa()[1];
  m.r = p.r();
  return m;
}

}  // namespace

TEST(FamilyParams, Construction) {
  const auto u = st::FamilyParams::uniform(3);
  EXPECT_TRUE(u.kappa().empty());
  EXPECT_TRUE(u.dep().empty());
  const auto s = st::FamilyParams::sine({1, 2, 3}, {0.1, 0.2, 0.3});
  EXPECT_EQ(s.num_values(), 6u);
  EXPECT_EQ(st::dependence_count(4), 6u);
  EXPECT_EQ(st::FamilyParams::from_values(st::Family::Sine, 3, s.values()), s);
  EXPECT_THROW(st::FamilyParams::sine({1, 2}, {0.1, 0.2}), st::DimensionError);
  EXPECT_THROW(st::FamilyParams::sine({-1, 2}, {0.1}), st::DomainError);
  EXPECT_THROW(st::FamilyParams::wrapped_cauchy(1.0, 0.2, 0.1), st::DomainError);
  EXPECT_THROW(st::FamilyParams::wrapped_cauchy(0.2, 0.2, -1.0), st::DomainError);
  EXPECT_THROW(st::FamilyParams::from_values(st::Family::WrappedCauchy, 3, std::vector<double>(6, 0.1)),
               st::DimensionError);
  EXPECT_THROW(st::FamilyParams::uniform(2).r(), st::DimensionError);
  EXPECT_EQ(st::parse_family("wc"), st::Family::WrappedCauchy);
  EXPECT_THROW(st::parse_family("gumbel"), st::DomainError);
}

TEST(WrappedCauchy, CoefficientExamples) {
  const auto z = st::wc_coefficients(0, 0, 0);
  EXPECT_DOUBLE_EQ(z.c0, 1);
  EXPECT_DOUBLE_EQ(z.c1, 0);
  EXPECT_DOUBLE_EQ(z.c2, 0);
  EXPECT_DOUBLE_EQ(z.c3, 0);
  EXPECT_DOUBLE_EQ(z.c4, 0);
  const auto h = st::wc_coefficients(0.5, 0.5, 0);
  EXPECT_DOUBLE_EQ(h.c0, 1.5625);
  EXPECT_DOUBLE_EQ(h.c1, 1.25);
  EXPECT_DOUBLE_EQ(h.c2, 1.25);
  EXPECT_DOUBLE_EQ(h.c3, -1.0);
  EXPECT_DOUBLE_EQ(h.c4, 0.0);
  oracle::Gen gen(11);
  for (int i = 0; i < 200; ++i) {
    const double k1 = gen.uniform(0, 0.99), k2 = gen.uniform(0, 0.99), r = gen.uniform(-0.99, 0.99);
    const auto a = st::wc_coefficients(k1, k2, r), b = st::wc_coefficients(k1, k2, -r);
    EXPECT_EQ(a.c0, b.c0);
    EXPECT_EQ(a.c1, b.c1);
    EXPECT_EQ(a.c2, b.c2);
    EXPECT_EQ(a.c3, b.c3);
    EXPECT_EQ(a.c4, -b.c4);
  }
}

TEST(WrappedCauchy, DenominatorPositive) {
  oracle::Gen gen(12);
  for (int i = 0; i < 300; ++i) {
    const double k1 = gen.uniform(0, 0.999), k2 = gen.uniform(0, 0.999), r = gen.uniform(-0.999, 0.999);
    const auto c = st::wc_coefficients(k1, k2, r);
    for (int a = 0; a < 64; ++a)
      for (int b = 0; b < 64; ++b) {
        const double y1 = -oracle::kPi + a * oracle::kPi / 32, y2 = -oracle::kPi + b * oracle::kPi / 32;
        ASSERT_GT(c.denominator(y1, y2), 0.0) << k1 << " " << k2 << " " << r;
      }
  }
}

TEST(WrappedCauchy, MarginalsAreWrappedCauchy) {
  for (double k1 : kWcKappa)
    for (double r : kWcR) {
      const double k2 = 0.4;
      const auto p = st::FamilyParams::wrapped_cauchy(k1, k2, r);
      for (double x : {-3.0, -1.0, 0.0, 0.7, 2.5}) {
        // conditionals are far sharper than the marginals
        const nm::QuadratureGrid g(1, 16384);
        const double m1 = nm::torus_integrate(
            [&](std::span<const double> y) {
              const double pt[2] = {x, y[0]};
              return std::exp(st::base_log_density(p, pt));
            },
            g);
        const double m2 = nm::torus_integrate(
            [&](std::span<const double> y) {
              const double pt[2] = {y[0], x};
              return std::exp(st::base_log_density(p, pt));
            },
            g);
        const double wc1 = (1 - k1 * k1) / (2 * oracle::kPi * (1 + k1 * k1 - 2 * k1 * std::cos(x)));
        const double wc2 = (1 - k2 * k2) / (2 * oracle::kPi * (1 + k2 * k2 - 2 * k2 * std::cos(x)));
        EXPECT_NEAR(m1, wc1, 1e-6);
        EXPECT_NEAR(m2, wc2, 1e-6);
        EXPECT_NEAR(std::exp(st::wrapped_cauchy_log_density(k1, x)), wc1, 1e-14);
      }
    }
}

TEST(NormConst, SineExamples) {
  EXPECT_NEAR(st::sine_log_norm_const(1, 1, 0), std::log(4 * oracle::kPi * oracle::kPi * std::pow(oracle::bessel_i(0, 1), 2)),
              1e-13);
  EXPECT_NEAR(st::sine_log_norm_const(1, 1, 0), 4.14758, 1e-5);
  oracle::Bivariate m{oracle::Bivariate::Sine, 0, 0, 1, 1, 2};
  EXPECT_NEAR(st::sine_log_norm_const(1, 1, 2), oracle::log_norm(m), 1e-10);
  EXPECT_NEAR(st::sine_log_norm_const(2, 3, 1), st::sine_log_norm_const(3, 2, 1), 1e-13);
}

TEST(NormConst, CosineExamples) {
  EXPECT_NEAR(st::cosine_log_norm_const(1, 1, 0),
              std::log(4 * oracle::kPi * oracle::kPi * std::pow(oracle::bessel_i(0, 1), 2)), 1e-13);
  oracle::Bivariate m{oracle::Bivariate::Cosine, 0, 0, 1, 1, 1};
  EXPECT_NEAR(st::cosine_log_norm_const(1, 1, 1), oracle::log_norm(m), 1e-10);
  EXPECT_NEAR(st::cosine_log_norm_const(0, 0, 2), std::log(4 * oracle::kPi * oracle::kPi * oracle::bessel_i(0, 2)),
              1e-13);
}

TEST(NormConst, SeriesAgreesWithQuadratureOverSweep) {
  for (double k1 : kSweepKappa)
    for (double k2 : kSweepKappa)
      for (double r : kSweepR) {
        oracle::Bivariate s{oracle::Bivariate::Sine, 0, 0, k1, k2, r};
        oracle::Bivariate c{oracle::Bivariate::Cosine, 0, 0, k1, k2, r};
        EXPECT_NEAR(st::sine_log_norm_const(k1, k2, r), oracle::log_norm(s), 1e-8) << k1 << " " << k2 << " " << r;
        EXPECT_NEAR(st::cosine_log_norm_const(k1, k2, r), oracle::log_norm(c), 1e-8) << k1 << " " << k2 << " " << r;
      }
}

TEST(NormConst, IllPosedRegionsStillAccurate) {
  for (double r : {-30.0, -3.0, 3.0, 30.0}) {
    oracle::Bivariate s{oracle::Bivariate::Sine, 0, 0, 1e-4, 0.0, r};
    EXPECT_NEAR(st::sine_log_norm_const(1e-4, 0.0, r), oracle::log_norm(s), 1e-8);
    oracle::Bivariate c{oracle::Bivariate::Cosine, 0, 0, 0.3, 0.2, r};
    EXPECT_NEAR(st::cosine_log_norm_const(0.3, 0.2, r), oracle::log_norm(c), 1e-8);
  }
}

TEST(NormConst, GradientIsExpectedStatistic) {
  const nm::QuadratureGrid g(2, 256);
  for (auto [k1, k2, r] : {std::tuple{2.0, 2.0, 1.0}, {0.5, 3.0, -2.0}, {8.0, 1.0, 4.0}}) {
    const auto s = st::sine_log_norm_const_grad(k1, k2, r);
    const auto c = st::cosine_log_norm_const_grad(k1, k2, r);
    const double ls = st::sine_log_norm_const(k1, k2, r), lc = st::cosine_log_norm_const(k1, k2, r);
    EXPECT_NEAR(s.value, ls, 1e-12);
    for (int j = 0; j < 3; ++j) {
      const double es = nm::torus_integrate(
          [&](std::span<const double> y) {
            const double t[3] = {std::cos(y[0]), std::cos(y[1]), std::sin(y[0]) * std::sin(y[1])};
            return t[j] * std::exp(k1 * t[0] + k2 * t[1] + r * t[2] - ls);
          },
          g);
      const double ec = nm::torus_integrate(
          [&](std::span<const double> y) {
            const double t[3] = {std::cos(y[0]), std::cos(y[1]), std::cos(y[0] - y[1])};
            return t[j] * std::exp(k1 * t[0] + k2 * t[1] + r * t[2] - lc);
          },
          g);
      EXPECT_NEAR(s.grad[j], es, 1e-9) << j;
      EXPECT_NEAR(c.grad[j], ec, 1e-9) << j;
    }
  }
}

TEST(BaseDensity, Examples) {
  const double x0[2] = {0.3, -2.0};
  EXPECT_NEAR(st::base_log_density(st::FamilyParams::uniform(2), x0), -std::log(4 * oracle::kPi * oracle::kPi), 1e-14);
  EXPECT_NEAR(-std::log(4 * oracle::kPi * oracle::kPi), -3.67576, 1e-5);
  const double zero[2] = {0, 0};
  EXPECT_NEAR(st::base_log_density(st::FamilyParams::sine({1, 1}, {2}), zero), 2 - st::sine_log_norm_const(1, 1, 2),
              1e-13);
  const auto wc = st::FamilyParams::wrapped_cauchy(0.5, 0.5, 0.3);
  EXPECT_NEAR(nm::torus_integrate([&](std::span<const double> x) { return std::exp(st::base_log_density(wc, x)); },
                                  nm::QuadratureGrid::standard(2)),
              1.0, 1e-8);
  const double bad[3] = {0, 0, 0};
  EXPECT_THROW(st::base_log_density(wc, bad), st::DimensionError);
}

TEST(BaseDensity, MatchesDirectFormula) {
  for (const auto& p : sweep()) {
    const auto m = as_oracle(p);
    const double lc = oracle::log_norm(m);
    oracle::Gen gen(3);
    for (int i = 0; i < 20; ++i) {
      const double x[2] = {gen.angle(), gen.angle()};
      EXPECT_NEAR(st::base_log_density(p, x), oracle::log_density(m, lc, x[0], x[1]), 1e-8);
    }
  }
}

TEST(BaseDensity, PointwiseSymmetry) {
  oracle::Gen gen(21);
  for (const auto& p : sweep()) {
    const st::BaseDensity f(p);
    for (int i = 0; i < 10000 / 10; ++i) {
      const double x[2] = {gen.angle(), gen.angle()}, y[2] = {-x[0], -x[1]};
      EXPECT_NEAR(f.log_density(x), f.log_density(y), 1e-12);
    }
  }
  // full 1e4 points per family on one representative each
  const st::FamilyParams reps[] = {st::FamilyParams::uniform(2), st::FamilyParams::sine({2, 1}, {1.5}),
                                   st::FamilyParams::cosine({0.5, 3}, {-2}),
                                   st::FamilyParams::wrapped_cauchy(0.3, 0.7, -0.5)};
  for (const auto& p : reps) {
    for (int i = 0; i < 10000; ++i) {
      const double x[2] = {gen.angle(), gen.angle()}, y[2] = {-x[0], -x[1]};
      ASSERT_NEAR(st::base_log_density(p, x), st::base_log_density(p, y), 1e-12);
    }
  }
}

TEST(BaseDensity, NormalisedOverSweep) {
  const auto grid = nm::QuadratureGrid::standard(2);
  for (const auto& p : sweep()) {
    const double mass =
        nm::torus_integrate([&](std::span<const double> x) { return std::exp(st::base_log_density(p, x)); }, grid);
    EXPECT_NEAR(mass, 1.0, 1e-6) << st::family_name(p.family()) << " " << p.values()[0];
  }
}

TEST(BaseDensity, WrappedCauchyNormalisedAtFineResolution) {
  // the N = 256 rule is not converged for the most concentrated corner
  for (double k1 : kWcKappa)
    for (double k2 : kWcKappa)
      for (double r : kWcR) {
        const auto p = st::FamilyParams::wrapped_cauchy(k1, k2, r);
        const double mass = nm::torus_integrate(
            [&](std::span<const double> x) { return std::exp(st::base_log_density(p, x)); }, nm::QuadratureGrid(2, 2048));
        EXPECT_NEAR(mass, 1.0, 1e-9) << k1 << " " << k2 << " " << r;
      }
}

TEST(BaseDensity, HigherDimensionNormalised) {
  const auto s = st::FamilyParams::sine({1, 2, 1.5}, {0.5, -0.3, 0.8});
  const auto c = st::FamilyParams::cosine({1, 2, 1.5}, {0.5, -0.3, 0.8});
  for (const auto& p : {s, c}) {
    const double mass = oracle::torus_midpoint(
        [&](const double* x) { return std::exp(st::base_log_density(p, std::span<const double>(x, 3))); }, 3, 48);
    EXPECT_NEAR(mass, 1.0, 1e-6);
  }
  const auto vm = st::FamilyParams::sine({3.0});
  const double x = 0.4;
  EXPECT_NEAR(st::base_log_density(vm, std::span<const double>(&x, 1)), st::von_mises_log_density(3.0, x), 1e-13);
  EXPECT_NEAR(st::von_mises_log_density(3.0, x), 3.0 * std::cos(x) - std::log(2 * oracle::kPi * oracle::bessel_i(0, 3.0)),
              1e-13);
}

TEST(BaseDensity, GradientsMatchFiniteDifferences) {
  const st::FamilyParams cases[] = {st::FamilyParams::sine({2, 1}, {0.7}), st::FamilyParams::cosine({1.5, 0.5}, {-1}),
                                    st::FamilyParams::wrapped_cauchy(0.4, 0.6, 0.3),
                                    st::FamilyParams::sine({1, 2, 1.5}, {0.5, -0.3, 0.8})};
  oracle::Gen gen(5);
  for (const auto& p : cases) {
    const st::BaseDensity f(p);
    const auto d = static_cast<std::size_t>(p.dim());
    for (int i = 0; i < 5; ++i) {
      std::vector<double> y(d);
      for (auto& v : y) v = gen.angle();
      std::vector<double> gy(d);
      f.log_density_grad_y(y, gy);
      for (std::size_t s = 0; s < d; ++s) {
        auto a = y, b = y;
        a[s] += 1e-6;
        b[s] -= 1e-6;
        EXPECT_NEAR(gy[s], (f.log_density(a) - f.log_density(b)) / 2e-6, 1e-6);
      }
      std::vector<double> gt(p.num_values());
      f.grad_theta(y, gt);
      const auto vals = p.values();
      for (std::size_t k = 0; k < vals.size(); ++k) {
        auto a = vals, b = vals;
        a[k] += 1e-6;
        b[k] -= 1e-6;
        const double fa = st::base_log_density(st::FamilyParams::from_values(p.family(), p.dim(), a), y);
        const double fb = st::base_log_density(st::FamilyParams::from_values(p.family(), p.dim(), b), y);
        EXPECT_NEAR(gt[k], (fa - fb) / 2e-6, 1e-5) << k;
      }
    }
  }
}

TEST(Unimodality, KnownCases) {
  EXPECT_EQ(st::base_is_unimodal(st::FamilyParams::sine({2, 2}, {1})), st::Modality::Unimodal);
  EXPECT_EQ(st::base_is_unimodal(st::FamilyParams::sine({1, 1}, {2})), st::Modality::Multimodal);
  EXPECT_EQ(st::base_is_unimodal(st::FamilyParams::sine({1, 1}, {1})), st::Modality::Unknown);
  EXPECT_EQ(st::base_is_unimodal(st::FamilyParams::cosine({1, 1}, {-0.4})), st::Modality::Unimodal);
  EXPECT_EQ(st::base_is_unimodal(st::FamilyParams::cosine({1, 1}, {-0.6})), st::Modality::Multimodal);
  EXPECT_EQ(st::base_is_unimodal(st::FamilyParams::wrapped_cauchy(0.1, 0.5, 0.5)), st::Modality::Unimodal);
  EXPECT_EQ(st::base_is_unimodal(st::FamilyParams::uniform(2)), st::Modality::Unknown);
  EXPECT_THROW(st::base_is_unimodal(st::FamilyParams::sine({1, 1, 1}, {0, 0, 0})), st::DimensionError);
}

TEST(Unimodality, CosineStrongNegativeDependence) {
  // kappa = (2, 0.5): two modes for 0.4 < -r < 2/3, one mode off the origin beyond
  EXPECT_EQ(st::base_is_unimodal(st::FamilyParams::cosine({2, 0.5}, {-0.6})), st::Modality::Multimodal);
  EXPECT_EQ(st::base_is_unimodal(st::FamilyParams::cosine({2, 0.5}, {-1.0})), st::Modality::Unimodal);
  EXPECT_EQ(st::base_is_unimodal(st::FamilyParams::cosine({2, 0.5}, {-2.0 / 3.0})), st::Modality::Unknown);
  EXPECT_EQ(st::base_is_unimodal(st::FamilyParams::cosine({1, 1}, {-5})), st::Modality::Multimodal);
  for (double r : {-0.6, -1.0}) {
    const auto m = st::SkewModel::symmetric(st::TorusPoint{0, 0}, st::FamilyParams::cosine({2, 0.5}, {r}));
    const auto modes = st::find_modes(m);
    EXPECT_EQ(modes.size(), r == -0.6 ? 2u : 1u);
    if (r == -1.0) {
      EXPECT_NEAR(modes[0].point[0], 0.0, 1e-6);
      EXPECT_NEAR(std::abs(modes[0].point[1]), M_PI, 1e-6);
    }
  }
}
