#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace rrf {

/// Exponents of the line process (gamma) and of the acceptance rule (alpha).
class LawParams {
 public:
  /// Throws DomainError unless gamma > 1 and alpha > gamma - 1.
  LawParams(double gamma, double alpha);

  double gamma() const { return gamma_; }
  double alpha() const { return alpha_; }
  /// Rate of the right tail, gamma - 1.
  double rate_up() const { return gamma_ - 1.0; }
  /// Rate of the left tail, alpha - (gamma - 1).
  double rate_down() const { return alpha_ - (gamma_ - 1.0); }
  bool critical() const;

 private:
  double gamma_;
  double alpha_;
};

/// Stationary density of the log-relative speed: an asymmetric Laplace law
/// with normalizing constant rate_up * rate_down / alpha.
double laplace_pdf(const LawParams& law, double y);
double laplace_cdf(const LawParams& law, double y);
double laplace_quantile(const LawParams& law, double p);
/// (alpha - 2(gamma-1)) / ((gamma-1)(alpha-(gamma-1))).
double laplace_mean(const LawParams& law);
double laplace_variance(const LawParams& law);

/// CDF of the half-sine angle density on [0, pi]: (1 - cos phi) / 2.
double sine_angle_cdf(double phi);
double sine_angle_quantile(double p);

/// Rate of the exponential law of d / V^(gamma-1): alpha / (alpha - (gamma-1)).
double scaled_distance_rate(const LawParams& law);

/// Two-sided Kolmogorov-Smirnov distance of the empirical CDF to `cdf`.
double ks_statistic(std::span<const double> samples,
                    const std::function<double(double)>& cdf);
/// Two-sample KS distance.
double ks_two_sample(std::span<const double> a, std::span<const double> b);
/// Asymptotic 99% critical value 1.63 / sqrt(n).
double ks_critical_99(std::size_t n);

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t n = 0;
};
MeanEstimate estimate_mean(std::span<const double> samples);

/// a_n = (1/n) * sum_{m <= n} u_m for n = 1..size.
std::vector<double> ergodic_average(std::span<const double> u_series);

/// Per replica, the first index n > n0 with |log_v[n] - log_v[0]| <= eps, or
/// nothing if the series never returns.
std::vector<std::size_t> first_returns(std::span<const std::vector<double>> log_v,
                                       double eps, std::size_t n0);

/// Fraction of replicas returning within eps of their start at some n in
/// (n0, N], for each horizon N. Nondecreasing in N.
std::vector<double> recurrence_fraction(std::span<const std::vector<double>> log_v,
                                        double eps, std::size_t n0,
                                        std::span<const std::size_t> horizons);

enum class Regime { Converging, Critical, Diverging };

Regime classify_regime(const LawParams& law);
std::string_view regime_name(Regime regime);

}  // namespace rrf
