#pragma once

#include <variant>

namespace upf {

/// Sigmoidal satisfaction curve for real-time traffic.
///
/// U(r) = c (1 / (1 + e^{-a(r-b)}) - d) with c = (1 + e^{ab}) / e^{ab} and
/// d = 1 / (1 + e^{ab}), so that U(0) = 0 and U(inf) = 1. `b` is the
/// inflection rate and `a` the steepness.
class SigmoidParams {
public:
  SigmoidParams(double a, double b);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  double d() const noexcept { return d_; }

  friend bool operator==(const SigmoidParams &, const SigmoidParams &) = default;

private:
  double a_, b_, c_, d_;
};

/// Logarithmic satisfaction curve for delay-tolerant traffic,
/// U(r) = ln(1 + k r) / ln(1 + k r_max). Not clamped above r_max.
class LogParams {
public:
  LogParams(double k, double r_max);

  double k() const noexcept { return k_; }
  double r_max() const noexcept { return r_max_; }

  friend bool operator==(const LogParams &, const LogParams &) = default;

private:
  double k_, r_max_;
};

using UtilityFunction = std::variant<SigmoidParams, LogParams>;

/// U(r) for r >= 0. Throws DomainError for negative or NaN rates.
double eval_utility(const UtilityFunction &u, double r);

/// ln U(r) for r >= 0; -inf at r = 0.
double log_utility(const UtilityFunction &u, double r);

/// d/dr ln U(r) = U'(r) / U(r) for r > 0.
double log_utility_slope(const UtilityFunction &u, double r);

bool is_sigmoid(const UtilityFunction &u) noexcept;

namespace detail {
// Unchecked variants for inner loops. Valid for r >= 0; slope is +inf at 0.
double log_utility(const UtilityFunction &u, double r) noexcept;
double log_utility_slope(const UtilityFunction &u, double r) noexcept;
} // namespace detail

} // namespace upf
