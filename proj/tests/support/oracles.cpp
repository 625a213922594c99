#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

double bessel_i(int n, double x) {
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  const long double h = 0.5L * x;
  long double term = std::pow(h, static_cast<long double>(n)) / std::tgamma(static_cast<long double>(n) + 1.0L);
  long double sum = term;
  for (int k = 1; k < 5000; ++k) {
    term *= h * h / (static_cast<long double>(k) * static_cast<long double>(k + n));
    sum += term;
    if (term < 1e-19L * sum) break;
  }
  return static_cast<double>(sum);
}

double gamma_p(double a, double x) {
  if (x <= 0) return 0.0;
  long double term = 1.0L / a;
  long double sum = term;
  for (int k = 1; k < 100000; ++k) {
    term *= static_cast<long double>(x) / (a + k);
    sum += term;
    if (term < 1e-20L * sum) break;
  }
  const long double log_front = a * std::log(static_cast<long double>(x)) - x - std::lgamma(static_cast<long double>(a));
  return static_cast<double>(std::min(1.0L, sum * std::exp(log_front)));
}

double chi2_cdf(double q, int df) { return gamma_p(0.5 * df, 0.5 * q); }
double chi2_sf(double q, int df) { return 1.0 - chi2_cdf(q, df); }

double chi2_quantile(double p, int df) {
  double lo = 0, hi = 1;
  while (chi2_cdf(hi, df) < p) hi *= 2;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi2_cdf(mid, df) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double torus_midpoint(const std::function<double(const double*)>& f, int d, int n) {
  const double h = 2 * kPi / n;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> x(static_cast<std::size_t>(d));
  long double sum = 0;
  while (true) {
    for (int s = 0; s < d; ++s) x[s] = -kPi + (idx[s] + 0.5) * h;
    sum += f(x.data());
    int s = 0;
    while (s < d && ++idx[s] == n) idx[s++] = 0;
    if (s == d) break;
  }
  return static_cast<double>(sum) * std::pow(h, d);
}

double skewed_von_mises(double x, double mu, double kappa, double lambda) {
  return std::exp(kappa * std::cos(x - mu)) / (2 * kPi * bessel_i(0, kappa)) * (1 + lambda * std::sin(x - mu));
}

double unnormalised_base(const Bivariate& m, double y1, double y2) {
  switch (m.kind) {
    case Bivariate::Uniform:
      return 1.0;
    case Bivariate::Sine:
      return std::exp(m.k1 * std::cos(y1) + m.k2 * std::cos(y2) + m.r * std::sin(y1) * std::sin(y2));
    case Bivariate::Cosine:
      return std::exp(m.k1 * std::cos(y1) + m.k2 * std::cos(y2) + m.r * std::cos(y1 - y2));
    case Bivariate::WC: {
      const double a = std::abs(m.r), k1 = m.k1, k2 = m.k2;
      const double c0 = (1 + a * a) * (1 + k1 * k1) * (1 + k2 * k2) - 8 * a * k1 * k2;
      const double c1 = 2 * (1 + a * a) * k1 * (1 + k2 * k2) - 4 * a * (1 + k1 * k1) * k2;
      const double c2 = 2 * (1 + a * a) * (1 + k1 * k1) * k2 - 4 * a * k1 * (1 + k2 * k2);
      const double c3 = -4 * (1 + a * a) * k1 * k2 + 2 * a * (1 + k1 * k1) * (1 + k2 * k2);
      const double c4 = 2 * m.r * (1 - k1 * k1) * (1 - k2 * k2);
      return 1.0 / (c0 - c1 * std::cos(y1) - c2 * std::cos(y2) - c3 * std::cos(y1) * std::cos(y2) -
                    c4 * std::sin(y1) * std::sin(y2));
    }
  }
  return 0;
}

double log_norm(const Bivariate& m) {
  if (m.kind == Bivariate::WC)
    return std::log(4 * kPi * kPi) - std::log((1 - m.r * m.r) * (1 - m.k1 * m.k1) * (1 - m.k2 * m.k2));
  const int n = 512;
  // shift by the maximum of the exponent bound to stay finite
  const double shift = std::abs(m.k1) + std::abs(m.k2) + std::abs(m.r);
  Bivariate c = m;
  const double v = torus_midpoint(
      [&](const double* y) {
        const double u = unnormalised_base(c, y[0], y[1]);
        return m.kind == Bivariate::Uniform ? u : u * std::exp(-shift);
      },
      2, n);
  return std::log(v) + (m.kind == Bivariate::Uniform ? 0.0 : shift);
}

double log_density(const Bivariate& m, double log_c, double x1, double x2) {
  const double y1 = x1 - m.mu1, y2 = x2 - m.mu2;
  const double skew = 1 + m.l1 * std::sin(y1) + m.l2 * std::sin(y2);
  double base = std::log(unnormalised_base(m, y1, y2));
  if (m.kind == Bivariate::WC) base += std::log((1 - m.r * m.r) * (1 - m.k1 * m.k1) * (1 - m.k2 * m.k2));
  if (m.kind == Bivariate::WC) return base - std::log(4 * kPi * kPi) + std::log(skew);
  return base - log_c + std::log(skew);
}

std::vector<double> bin_probabilities(const Bivariate& m, int nb, int sub) {
  const double lc = log_norm(m);
  std::vector<double> p(static_cast<std::size_t>(nb * nb), 0.0);
  const double w = 2 * kPi / nb, h = w / sub;
  double total = 0;
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) {
      double acc = 0;
      for (int a = 0; a < sub; ++a)
        for (int b = 0; b < sub; ++b) {
          const double x1 = -kPi + i * w + (a + 0.5) * h;
          const double x2 = -kPi + j * w + (b + 0.5) * h;
          acc += std::exp(log_density(m, lc, x1, x2));
        }
      p[static_cast<std::size_t>(i * nb + j)] = acc * h * h;
      total += acc * h * h;
    }
  for (double& v : p) v /= total;
  return p;
}

int bin_index(double x, int nb) {
  int i = static_cast<int>(std::floor((x + kPi) / (2 * kPi) * nb));
  return std::clamp(i, 0, nb - 1);
}

GofResult pearson(const std::vector<double>& observed, const std::vector<double>& probs, double n) {
  if (observed.size() != probs.size()) throw std::invalid_argument("pearson: size mismatch");
  // pool sparse cells in index order
  GofResult r;
  double o_acc = 0, e_acc = 0;
  int cells = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    o_acc += observed[i];
    e_acc += n * probs[i];
    if (e_acc >= 5.0) {
      r.statistic += (o_acc - e_acc) * (o_acc - e_acc) / e_acc;
      ++cells;
      o_acc = e_acc = 0;
    }
  }
  if (e_acc > 0) {
    r.statistic += (o_acc - e_acc) * (o_acc - e_acc) / e_acc;
    ++cells;
  }
  r.df = cells - 1;
  r.p_value = chi2_sf(r.statistic, r.df);
  return r;
}

std::vector<double> Gen::lambda(int d, double radius) {
  std::vector<double> e(static_cast<std::size_t>(d + 1));
  double total = 0;
  for (double& v : e) {
    v = -std::log(uniform(1e-12, 1.0));
    total += v;
  }
  std::vector<double> out(static_cast<std::size_t>(d));
  for (int s = 0; s < d; ++s) out[s] = radius * e[s] / total * (uniform(0, 1) < 0.5 ? -1 : 1);
  return out;
}

}  // namespace oracle
