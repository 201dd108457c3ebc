#include "rrf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rrf/errors.hpp"

namespace rrf {

LawParams::LawParams(double gamma, double alpha) : gamma_(gamma), alpha_(alpha) {
  if (!(gamma > 1.0)) {
    throw DomainError("gamma must exceed 1 (got " + std::to_string(gamma) + ")");
  }
  if (!(alpha > gamma - 1.0)) {
    throw DomainError("alpha must exceed gamma - 1 (got alpha=" + std::to_string(alpha) +
                      ", gamma=" + std::to_string(gamma) + ")");
  }
}

bool LawParams::critical() const {
  return std::abs(alpha_ - 2.0 * (gamma_ - 1.0)) < 1e-12;
}

double laplace_pdf(const LawParams& law, double y) {
  const double c = law.rate_up() * law.rate_down() / law.alpha();
  return y >= 0.0 ? c * std::exp(-law.rate_up() * y) : c * std::exp(law.rate_down() * y);
}

double laplace_cdf(const LawParams& law, double y) {
  if (y < 0.0) return law.rate_up() / law.alpha() * std::exp(law.rate_down() * y);
  return 1.0 - law.rate_down() / law.alpha() * std::exp(-law.rate_up() * y);
}

double laplace_quantile(const LawParams& law, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("laplace_quantile: p must lie in (0, 1)");
  const double left_mass = law.rate_up() / law.alpha();
  if (p < left_mass) return std::log(p / left_mass) / law.rate_down();
  return -std::log((1.0 - p) * law.alpha() / law.rate_down()) / law.rate_up();
}

double laplace_mean(const LawParams& law) {
  return (law.alpha() - 2.0 * law.rate_up()) / (law.rate_up() * law.rate_down());
}

double laplace_variance(const LawParams& law) {
  const double up = law.rate_up(), down = law.rate_down();
  const double p_up = down / law.alpha();
  const double p_down = up / law.alpha();
  const double second = p_up * 2.0 / (up * up) + p_down * 2.0 / (down * down);
  const double mean = laplace_mean(law);
  return second - mean * mean;
}

double sine_angle_cdf(double phi) {
  if (!(phi >= 0.0 && phi <= std::numbers::pi)) {
    throw DomainError("sine_angle_cdf: phi must lie in [0, pi]");
  }
  return 0.5 * (1.0 - std::cos(phi));
}

double sine_angle_quantile(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("sine_angle_quantile: p must lie in [0, 1]");
  return std::acos(1.0 - 2.0 * p);
}

double scaled_distance_rate(const LawParams& law) { return law.alpha() / law.rate_down(); }

double ks_statistic(std::span<const double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) throw EmptySample("ks_statistic: no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    worst = std::max({worst, above, below});
  }
  return worst;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw EmptySample("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / nx -
                                     static_cast<double>(j) / ny));
  }
  return worst;
}

double ks_critical_99(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

MeanEstimate estimate_mean(std::span<const double> samples) {
  if (samples.empty()) throw EmptySample("estimate_mean: no samples");
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double var = samples.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n), samples.size()};
}

std::vector<double> ergodic_average(std::span<const double> u_series) {
  if (u_series.empty()) throw EmptySample("ergodic_average: empty series");
  std::vector<double> out(u_series.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < u_series.size(); ++i) {
    sum += u_series[i];
    out[i] = sum / static_cast<double>(i + 1);
  }
  return out;
}

std::vector<std::size_t> first_returns(std::span<const std::vector<double>> log_v,
                                       double eps, std::size_t n0) {
  constexpr auto never = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> out;
  out.reserve(log_v.size());
  for (const auto& series : log_v) {
    std::size_t hit = never;
    for (std::size_t n = n0 + 1; n < series.size(); ++n) {
      if (std::abs(series[n] - series[0]) <= eps) {
        hit = n;
        break;
      }
    }
    out.push_back(hit);
  }
  return out;
}

std::vector<double> recurrence_fraction(std::span<const std::vector<double>> log_v,
                                        double eps, std::size_t n0,
                                        std::span<const std::size_t> horizons) {
  if (!(eps > 0.0)) throw DomainError("recurrence_fraction: eps must be positive");
  if (log_v.empty()) throw EmptySample("recurrence_fraction: no replicas");
  for (auto h : horizons) {
    if (h <= n0) throw DomainError("recurrence_fraction: horizons must exceed n0");
  }
  const auto hits = first_returns(log_v, eps, n0);
  std::vector<double> out;
  out.reserve(horizons.size());
  for (auto h : horizons) {
    std::size_t count = 0;
    for (auto hit : hits) count += hit <= h ? 1 : 0;
    out.push_back(static_cast<double>(count) / static_cast<double>(hits.size()));
  }
  return out;
}

Regime classify_regime(const LawParams& law) {
  const double mean = laplace_mean(law);
  if (std::abs(mean) < 1e-12) return Regime::Critical;
  return mean < 0.0 ? Regime::Converging : Regime::Diverging;
}

std::string_view regime_name(Regime regime) {
  switch (regime) {
    case Regime::Converging: return "converging";
    case Regime::Critical: return "critical";
    case Regime::Diverging: return "diverging";
  }
  return "unknown";
}

}  // namespace rrf
