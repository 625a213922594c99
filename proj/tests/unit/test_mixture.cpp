#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "skewtorus/errors.hpp"
#include "skewtorus/mixture.hpp"
#include "skewtorus/numerics.hpp"

namespace st = skewtorus;

namespace {

st::SkewModel comp(double m1, double m2, double k1, double k2, double r, double l1, double l2) {
  return st::SkewModel(st::TorusPoint{m1, m2}, st::FamilyParams::sine({k1, k2}, {r}), {l1, l2});
}

const st::MixtureModel kTwo({comp(-1.5, 2.0, 4, 3, 1, 0.5, -0.3), comp(1.2, -0.8, 3, 5, -1.5, -0.2, 0.6)}, {0.4, 0.6});

// mixture natural parameters: p, then mu, theta, lambda of each component
std::vector<double> pack(const st::MixtureModel& m) {
  std::vector<double> v{m.weights()[0]};
  for (const auto& c : m.components()) {
    const auto n = st::natural_parameters(c, true);
    v.insert(v.end(), n.begin(), n.end());
  }
  return v;
}

st::MixtureModel unpack(const std::vector<double>& v) {
  std::vector<st::SkewModel> cs;
  for (int k = 0; k < 2; ++k) {
    const double* p = v.data() + 1 + 7 * k;
    cs.push_back(comp(p[0], p[1], p[2], p[3], p[4], p[5], p[6]));
  }
  return st::MixtureModel(cs, {v[0], 1 - v[0]});
}

}  // namespace

TEST(MixtureDensity, Examples) {
  const st::MixtureModel one({kTwo.components()[0], kTwo.components()[1]}, {1.0, 0.0});
  const st::MixtureModel same({kTwo.components()[0], kTwo.components()[0]}, {0.3, 0.7});
  oracle::Gen gen(1);
  for (int i = 0; i < 100; ++i) {
    const st::TorusPoint x{gen.angle(), gen.angle()};
    EXPECT_NEAR(st::mixture_log_density(one, x), st::skew_log_density(kTwo.components()[0], x), 1e-13);
    EXPECT_NEAR(st::mixture_log_density(same, x), st::skew_log_density(kTwo.components()[0], x), 1e-13);
  }
  EXPECT_THROW(st::MixtureModel({kTwo.components()[0]}, {0.9}), st::DomainError);
  EXPECT_THROW(st::mixture_log_density(kTwo, st::TorusPoint{0.0}), st::DimensionError);
}

TEST(MixtureDensity, Normalised) {
  oracle::Gen gen(2);
  for (int rep = 0; rep < 5; ++rep) {
    const auto l1 = gen.lambda(2), l2 = gen.lambda(2);
    const st::MixtureModel m({comp(gen.angle(), gen.angle(), gen.uniform(0.2, 5), gen.uniform(0.2, 5), gen.uniform(-3, 3), l1[0], l1[1]),
                              comp(gen.angle(), gen.angle(), gen.uniform(0.2, 5), gen.uniform(0.2, 5), gen.uniform(-3, 3), l2[0], l2[1])},
                             {0.35, 0.65});
    const double mass = st::numerics::torus_integrate([&](std::span<const double> x) { return std::exp(m.log_density(x)); },
                                                      st::numerics::QuadratureGrid::standard(2));
    EXPECT_NEAR(mass, 1.0, 1e-6);
  }
}

TEST(MixtureDensity, LabelSwapInvariance) {
  const st::MixtureModel swapped({kTwo.components()[1], kTwo.components()[0]}, {0.6, 0.4});
  oracle::Gen gen(3);
  for (int i = 0; i < 200; ++i) {
    const double x[2] = {gen.angle(), gen.angle()};
    EXPECT_EQ(kTwo.log_density(x), swapped.log_density(x));
  }
}

TEST(Scores, ParameterCountsAndArithmetic) {
  EXPECT_EQ(st::component_param_count(st::Family::Sine, 2, true), 7);
  EXPECT_EQ(st::component_param_count(st::Family::WrappedCauchy, 2, false), 5);
  EXPECT_EQ(st::component_param_count(st::Family::Uniform, 2, true), 4);
  EXPECT_EQ(st::component_param_count(st::Family::Uniform, 2, false), 0);
  EXPECT_EQ(st::mixture_param_count(st::Family::WrappedCauchy, 2, true, 2), 15);
  EXPECT_EQ(st::mixture_param_count(st::Family::WrappedCauchy, 2, false, 2), 11);
  const auto s = st::ModelScore::from(-717, 15, 396);
  EXPECT_NEAR(s.aic, 1464.0, 1e-9);
  EXPECT_NEAR(s.bic, 1523.7, 0.05);
  EXPECT_NEAR(st::ModelScore::from(-764, 11, 396).aic, 1550.0, 1e-9);
  oracle::Gen gen(4);
  for (int i = 0; i < 100; ++i) {
    const double ll = gen.uniform(-5000, 100);
    const int k = gen.integer(1, 40);
    const auto n = static_cast<std::size_t>(gen.integer(10, 5000));
    const auto sc = st::ModelScore::from(ll, k, n);
    EXPECT_EQ(sc.aic, 2.0 * k - 2.0 * ll);
    EXPECT_EQ(sc.bic, k * std::log(static_cast<double>(n)) - 2.0 * ll);
  }
}

TEST(Selection, Ranking) {
  using P = std::pair<std::string, st::ModelScore>;
  const std::vector<P> block_scores{{"S", st::ModelScore::from(-780.5, 11, 396)},  {"SS", st::ModelScore::from(-725.1, 15, 396)},
                              {"C", st::ModelScore::from(-814.1, 11, 396)},  {"SC", st::ModelScore::from(-811.6, 15, 396)},
                              {"WC", st::ModelScore::from(-764, 11, 396)},   {"SWC", st::ModelScore::from(-717, 15, 396)}};
  const auto r = st::select_model(block_scores);
  const std::vector<std::string> aic{"SWC", "SS", "WC", "S", "C", "SC"};
  EXPECT_EQ(r.by_aic, aic);
  EXPECT_EQ(r.by_bic.front(), "SWC");
  EXPECT_FALSE(r.criteria_disagree);
  const std::vector<P> single{{"X", st::ModelScore::from(-1, 2, 10)}};
  EXPECT_EQ(st::select_model(single).by_aic.front(), "X");
  const std::vector<P> tie{{"B", st::ModelScore::from(-10, 3, 10)}, {"A", st::ModelScore::from(-9, 4, 10)},
                           {"C", st::ModelScore::from(-10, 3, 10)}};
  const std::vector<std::string> tie_order{"B", "C", "A"};
  EXPECT_EQ(st::select_model(tie).by_aic, tie_order);
  const std::vector<P> split{{"small", st::ModelScore::from(-100, 2, 1000)}, {"big", st::ModelScore::from(-97, 4, 1000)}};
  EXPECT_TRUE(st::select_model(split).criteria_disagree);
  EXPECT_THROW(st::select_model(std::vector<P>{}), std::invalid_argument);
}

TEST(KMeans, SeparatesClusters) {
  st::Rng rng(5);
  const auto xs = st::sample(kTwo, 1000, rng);
  st::Rng r2(6);
  const auto labels = st::angular_kmeans(xs, 2, r2);
  ASSERT_EQ(labels.size(), xs.size());
  int agree = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const int truth = st::torus_distance(xs[i], kTwo.components()[0].mu()) <
                              st::torus_distance(xs[i], kTwo.components()[1].mu())
                          ? 0
                          : 1;
    agree += labels[i] == truth;
  }
  const int best = std::max(agree, static_cast<int>(xs.size()) - agree);
  EXPECT_GT(best, 900);
}

TEST(Em, MonotoneAndConverges) {
  st::Rng rng(7);
  const auto xs = st::sample(kTwo, 1500, rng);
  st::MixtureFitOptions o;
  o.n_partitions = 2;
  const auto fit = st::fit_mixture(st::Family::Sine, true, 2, xs, o);
  ASSERT_GE(fit.trace.size(), 2u);
  for (std::size_t i = 1; i < fit.trace.size(); ++i) EXPECT_GE(fit.trace[i], fit.trace[i - 1] - 1e-9);
  EXPECT_TRUE(fit.converged);
  EXPECT_EQ(fit.score.k_params, 15);
  EXPECT_NEAR(fit.score.log_lik, st::mixture_log_likelihood(fit.model, xs), 1e-8);
  EXPECT_EQ(fit.score.aic, 2.0 * 15 - 2.0 * fit.score.log_lik);
}

TEST(Em, SingleComponentMatchesDirectFit) {
  st::Rng rng(8);
  const auto xs = st::sample(kTwo.components()[0], 500, rng);
  st::MixtureFitOptions o;
  o.single.n_starts = 3;
  const auto mix = st::fit_mixture(st::Family::Sine, true, 1, xs, o);
  const auto single = st::fit_mle(st::Family::Sine, true, xs, o.single);
  EXPECT_NEAR(mix.score.log_lik, single.log_lik, 1e-8);
  EXPECT_EQ(mix.model.weights().front(), 1.0);
}

TEST(Em, AgreesWithDirectMaximisation) {
  st::Rng rng(9);
  const auto xs = st::sample(kTwo, 1500, rng);
  st::MixtureFitOptions o;
  o.n_partitions = 2;
  o.tol = 1e-12;
  o.max_em_iters = 3000;
  const auto em = st::fit_mixture(st::Family::Sine, true, 2, xs, o);
  const auto direct = st::fit_mixture_direct(em.model, true, xs);
  EXPECT_GE(direct.score.log_lik, em.score.log_lik - 1e-9);
  EXPECT_LE(direct.score.log_lik - em.score.log_lik, 1e-4);
}

TEST(Em, RecoversWellSeparatedMixture) {
  st::Rng rng(10);
  const auto xs = st::sample(kTwo, 3000, rng);
  st::MixtureFitOptions o;
  o.n_partitions = 3;
  auto fit = st::fit_mixture(st::Family::Sine, true, 2, xs, o);
  // align labels by location
  const auto& c = fit.model.components();
  if (st::torus_distance(c[0].mu(), kTwo.components()[0].mu()) > st::torus_distance(c[1].mu(), kTwo.components()[0].mu()))
    fit.model = st::MixtureModel({c[1], c[0]}, {fit.model.weights()[1], fit.model.weights()[0]});
  EXPECT_NEAR(fit.model.weights()[0], 0.4, 0.05);
  // standard errors from the outer product of per-observation scores. A component
  // whose lambda sits on the l1 boundary only moves along that face.
  const auto v = pack(fit.model);
  const auto truth = pack(kTwo);
  std::vector<Eigen::VectorXd> dirs;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::size_t slot = k == 0 ? 0 : (k - 1) % 7;
    if (slot == 5 && std::abs(v[k]) + std::abs(v[k + 1]) > 1.0 - 1e-6) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(15);
      d[static_cast<long>(k)] = v[k + 1] < 0 ? -1.0 : 1.0;
      d[static_cast<long>(k + 1)] = v[k] < 0 ? 1.0 : -1.0;
      dirs.push_back(d);
      ++k;
      continue;
    }
    dirs.push_back(Eigen::VectorXd::Unit(15, static_cast<long>(k)));
  }
  const long m = static_cast<long>(dirs.size());
  auto shifted = [&](const Eigen::VectorXd& d, double h) {
    auto a = v;
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += h * d[static_cast<long>(k)];
    return unpack(a);
  };
  std::vector<st::MixtureModel> plus, minus;
  for (const auto& d : dirs) {
    plus.push_back(shifted(d, 1e-6));
    minus.push_back(shifted(d, -1e-6));
  }
  Eigen::MatrixXd opg = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd s(m);
  for (const auto& x : xs) {
    for (long j = 0; j < m; ++j)
      s[j] = (st::mixture_log_density(plus[static_cast<std::size_t>(j)], x) -
              st::mixture_log_density(minus[static_cast<std::size_t>(j)], x)) / 2e-6;
    opg += s * s.transpose();
  }
  const Eigen::MatrixXd cov = opg.inverse();
  for (long j = 0; j < m; ++j) {
    const auto& d = dirs[static_cast<std::size_t>(j)];
    double diff = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (d[static_cast<long>(k)] == 0.0) continue;
      const bool angle = k % 7 == 1 || k % 7 == 2;
      diff += d[static_cast<long>(k)] * (angle ? st::angle_diff(v[k], truth[k]) : v[k] - truth[k]);
    }
    diff /= d.squaredNorm();
    EXPECT_LT(std::abs(diff), 3 * std::sqrt(cov(j, j))) << "direction " << j;
  }
}

TEST(Em, ErrorsOnTinySamples) {
  std::vector<st::TorusPoint> few;
  for (int i = 0; i < 10; ++i) few.push_back(st::TorusPoint{0.1 * i, -0.1 * i});
  EXPECT_THROW(st::fit_mixture(st::Family::Sine, true, 2, few), st::DomainError);
  EXPECT_THROW(st::fit_mixture(st::Family::Sine, true, 0, few), st::DomainError);
}

TEST(Mixture, SamplingDeterministic) {
  st::Rng a(11), b(11);
  EXPECT_EQ(st::sample(kTwo, 300, a), st::sample(kTwo, 300, b));
}
