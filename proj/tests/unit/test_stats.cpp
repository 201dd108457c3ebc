#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "rrf/engine.hpp"
#include "rrf/errors.hpp"
#include "rrf/random.hpp"
#include "rrf/stats.hpp"

using namespace rrf;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa,
               double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 60);
}

}  // namespace

TEST(LawParams, Validation) {
  EXPECT_THROW(LawParams(1.0, 3.0), DomainError);
  EXPECT_THROW(LawParams(2.5, 1.5), DomainError);
  EXPECT_TRUE(LawParams(2.5, 3.0).critical());
  EXPECT_FALSE(LawParams(2.5, 3.0 + 1e-9).critical());
}

TEST(LaplacePdf, Examples) {
  EXPECT_DOUBLE_EQ(laplace_pdf(LawParams(2.5, 4.0), 0.0), 0.9375);
  const LawParams crit(2.5, 3.0);
  for (double y : {0.0, 0.3, 1.7, 5.0}) {
    EXPECT_NEAR(laplace_pdf(crit, y), 0.75 * std::exp(-1.5 * y), 1e-15);
    EXPECT_EQ(laplace_pdf(crit, y), laplace_pdf(crit, -y));
  }
  EXPECT_EQ(laplace_pdf(crit, 1e4), 0.0);
  EXPECT_EQ(laplace_pdf(crit, -1e4), 0.0);
}

TEST(LaplacePdf, NormalizedWithMatchingMoments) {
  for (auto [gamma, alpha] : {std::pair{2.5, 3.0}, {2.5, 4.0}, {2.5, 2.0}, {2.0, 1.3}, {3.0, 7.0}}) {
    const LawParams law(gamma, alpha);
    auto pdf = [&](double y) { return laplace_pdf(law, y); };
    const double lo = -80.0 / law.rate_down(), hi = 80.0 / law.rate_up();
    const double mass = integrate(pdf, lo, 0.0, 1e-13) + integrate(pdf, 0.0, hi, 1e-13);
    EXPECT_NEAR(mass, 1.0, 1e-10);
    auto first = [&](double y) { return y * pdf(y); };
    const double m1 = integrate(first, lo, 0.0, 1e-13) + integrate(first, 0.0, hi, 1e-13);
    EXPECT_NEAR(m1, laplace_mean(law), 1e-8);
    auto second = [&](double y) { return y * y * pdf(y); };
    const double m2 = integrate(second, lo, 0.0, 1e-13) + integrate(second, 0.0, hi, 1e-13);
    EXPECT_NEAR(m2 - m1 * m1, laplace_variance(law), 1e-8);
    // CDF is the running integral of the pdf.
    for (double y : {-2.0, -0.1, 0.0, 0.4, 3.0}) {
      const double c = y < 0 ? integrate(pdf, lo, y, 1e-13)
                             : integrate(pdf, lo, 0.0, 1e-13) + integrate(pdf, 0.0, y, 1e-13);
      EXPECT_NEAR(laplace_cdf(law, y), c, 1e-10);
      EXPECT_NEAR(laplace_quantile(law, laplace_cdf(law, y)), y, 1e-9);
    }
  }
}

TEST(LaplaceMean, Examples) {
  EXPECT_EQ(laplace_mean(LawParams(2.5, 3.0)), 0.0);
  EXPECT_NEAR(laplace_mean(LawParams(2.5, 4.0)), 1.0 / 3.75, 1e-15);
  EXPECT_NEAR(laplace_mean(LawParams(2.5, 4.0)), 0.26667, 1e-5);
  EXPECT_NEAR(laplace_mean(LawParams(2.5, 2.0)), -4.0 / 3.0, 1e-15);
  EXPECT_NEAR(laplace_variance(LawParams(2.5, 3.0)), 2.0 / (1.5 * 1.5), 1e-15);
}

TEST(SineAngle, Cdf) {
  EXPECT_NEAR(sine_angle_cdf(kPi / 2), 0.5, 1e-15);
  EXPECT_EQ(sine_angle_cdf(kPi), 1.0);
  EXPECT_EQ(sine_angle_cdf(0.0), 0.0);
  EXPECT_THROW(sine_angle_cdf(-0.1), DomainError);
  EXPECT_THROW(sine_angle_cdf(3.2), DomainError);
  EXPECT_NEAR(sine_angle_quantile(sine_angle_cdf(1.1)), 1.1, 1e-12);
}

TEST(Ks, Examples) {
  const LawParams crit(2.5, 3.0);
  auto cdf = [&](double y) { return laplace_cdf(crit, y); };
  const std::vector<double> median{0.0};
  EXPECT_DOUBLE_EQ(ks_statistic(median, cdf), 0.5);
  const int n = 400;
  std::vector<double> q;
  for (int i = 1; i <= n; ++i) q.push_back(laplace_quantile(crit, (i - 0.5) / n));
  EXPECT_NEAR(ks_statistic(q, cdf), 1.0 / (2 * n), 1e-12);
  EXPECT_THROW(ks_statistic(std::vector<double>{}, cdf), EmptySample);
}

TEST(Ks, DrawsFromTheLawPass) {
  const LawParams law(2.5, 4.0);
  Rng rng(31);
  std::vector<double> x(100000);
  for (auto& v : x) v = laplace_quantile(law, rng.uniform_open());
  EXPECT_LT(ks_statistic(x, [&](double y) { return laplace_cdf(law, y); }),
            ks_critical_99(x.size()));
  EXPECT_NEAR(ks_critical_99(1000000), 0.00163, 1e-12);
}

TEST(Ks, TwoSample) {
  const std::vector<double> a{1, 2, 3}, b{1, 2, 3}, c{4, 5};
  EXPECT_EQ(ks_two_sample(a, b), 0.0);
  EXPECT_EQ(ks_two_sample(a, c), 1.0);
}

TEST(ErgodicAverage, Examples) {
  const std::vector<double> alt{0.5, -0.5, 0.5, -0.5};
  const auto a = ergodic_average(alt);
  EXPECT_EQ(a[3], 0.0);
  EXPECT_EQ(a[0], 0.5);
  const std::vector<double> c(7, 1.25);
  for (double v : ergodic_average(c)) EXPECT_EQ(v, 1.25);
  EXPECT_THROW(ergodic_average(std::vector<double>{}), EmptySample);
}

TEST(ErgodicAverage, CriticalDrawsCenter) {
  const LawParams law(2.5, 3.0);
  Rng rng(8);
  std::vector<double> u(100000);
  for (auto& v : u) v = laplace_quantile(law, rng.uniform_open());
  const double an = ergodic_average(u).back();
  EXPECT_LE(std::abs(an), 3.0 * std::sqrt(laplace_variance(law) / u.size()));
}

TEST(Recurrence, Examples) {
  const std::vector<std::size_t> horizons{20, 50};
  std::vector<std::vector<double>> zero(3, std::vector<double>(60, 0.0));
  for (double f : recurrence_fraction(zero, 0.1, 10, horizons)) EXPECT_EQ(f, 1.0);
  std::vector<std::vector<double>> drift(3, std::vector<double>(60));
  for (auto& s : drift) {
    for (std::size_t n = 0; n < s.size(); ++n) s[n] = 0.3 * n;
  }
  for (double f : recurrence_fraction(drift, 0.2, 0, horizons)) EXPECT_EQ(f, 0.0);
  EXPECT_THROW(recurrence_fraction(zero, 0.0, 10, horizons), DomainError);
  EXPECT_THROW(recurrence_fraction(zero, 0.1, 20, horizons), DomainError);
}

TEST(Recurrence, CriticalWalkAgreesWithDirectOracle) {
  // Independent oracle: symmetric Laplace steps as differences of two
  // exponentials drawn from std::exponential_distribution.
  const std::size_t replicas = 1000, length = 10000, n0 = 10;
  const double eps = 0.25;
  std::mt19937_64 gen(12345);
  std::exponential_distribution<double> expo(1.5);
  std::vector<std::vector<double>> walks(replicas, std::vector<double>(length + 1, 0.0));
  std::size_t within_1e3 = 0, within_1e4 = 0;
  for (auto& w : walks) {
    std::size_t first = 0;
    for (std::size_t n = 1; n <= length; ++n) {
      w[n] = w[n - 1] + expo(gen) - expo(gen);
      if (!first && n > n0 && std::abs(w[n]) <= eps) first = n;
    }
    within_1e3 += first && first <= 1000 ? 1 : 0;
    within_1e4 += first ? 1 : 0;
  }
  const std::vector<std::size_t> horizons{1000, 10000};
  const auto f = recurrence_fraction(walks, eps, n0, horizons);
  EXPECT_EQ(f[0], within_1e3 / static_cast<double>(replicas));
  EXPECT_EQ(f[1], within_1e4 / static_cast<double>(replicas));
  EXPECT_GE(f[1], f[0]);

  // A larger independent oracle for the horizon-1000 fraction.
  const std::size_t big = 10000;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < big; ++r) {
    double w = 0.0;
    for (std::size_t n = 1; n <= 1000; ++n) {
      w += expo(gen) - expo(gen);
      if (n > n0 && std::abs(w) <= eps) {
        ++hits;
        break;
      }
    }
  }
  const double p = hits / static_cast<double>(big);
  EXPECT_LE(std::abs(f[0] - p), 4.0 * std::sqrt(p * (1 - p) * (1.0 / replicas + 1.0 / big)));
}

TEST(Regime, Examples) {
  EXPECT_EQ(classify_regime(LawParams(2.5, 2.0)), Regime::Converging);
  EXPECT_EQ(classify_regime(LawParams(2.5, 3.0)), Regime::Critical);
  EXPECT_EQ(classify_regime(LawParams(2.5, 4.0)), Regime::Diverging);
  EXPECT_EQ(regime_name(Regime::Critical), "critical");
}

TEST(Regime, AgreesWithEmpiricalLongRunSign) {
  for (double alpha : {2.0, 4.0}) {
    const LawParams law(2.5, alpha);
    ASSERT_GE(std::abs(laplace_mean(law)), 0.1);
    const double sign = laplace_mean(law) > 0 ? 1.0 : -1.0;
    int agree = 0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
      Rng rng(static_cast<std::uint64_t>(s), 0, "regime");
      const Trajectory tr = run_annealed(law, 0.0, 10000, rng);
      agree += (tr.log_v.back() - tr.log_v.front()) * sign > 0 ? 1 : 0;
    }
    EXPECT_GE(agree, 99) << "alpha=" << alpha;
  }
}

TEST(MeanEstimate, Basic) {
  const std::vector<double> x{1, 2, 3, 4};
  const auto m = estimate_mean(x);
  EXPECT_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.standard_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_THROW(estimate_mean(std::vector<double>{}), EmptySample);
}
