#include "upf/utility.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "upf/errors.hpp"

namespace upf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ln(1 + e^x) without overflow.
double softplus(double x) noexcept {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// ln(1 - e^{-x}) for x > 0.
double log1mexp(double x) noexcept {
  return x > 0.6931471805599453 ? std::log1p(-std::exp(-x)) : std::log(-std::expm1(-x));
}

double logistic(double x) noexcept {
  if (x >= 0.0)
    return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_rate(double r) {
  if (!(r >= 0.0))
    throw DomainError("utility evaluated at negative rate " + std::to_string(r));
}

void check_positive(double v, const char *name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw DomainError(std::string(name) + " must be positive and finite");
}

} // namespace

SigmoidParams::SigmoidParams(double a, double b) : a_(a), b_(b) {
  check_positive(a, "sigmoid a");
  check_positive(b, "sigmoid b");
  // c = 1 + e^{-ab}, d = 1 / (1 + e^{ab}); these forms stay finite for any ab.
  const double emab = std::exp(-a * b);
  c_ = 1.0 + emab;
  d_ = emab / (1.0 + emab);
}

LogParams::LogParams(double k, double r_max) : k_(k), r_max_(r_max) {
  check_positive(k, "log k");
  check_positive(r_max, "log r_max");
}

// The sigmoid is evaluated through the identity
//   U(r) = (1 - e^{-ar}) / (1 + e^{a(b-r)}),
// which equals the c/d form exactly but has no cancellation near r = 0 and no
// overflow for large rates.
namespace detail {

double log_utility(const UtilityFunction &u, double r) noexcept {
  if (r <= 0.0)
    return -kInf;
  if (const auto *s = std::get_if<SigmoidParams>(&u)) {
    const double a = s->a();
    return log1mexp(a * r) - softplus(a * (s->b() - r));
  }
  const auto &l = std::get<LogParams>(u);
  return std::log(std::log1p(l.k() * r)) - std::log(std::log1p(l.k() * l.r_max()));
}

double log_utility_slope(const UtilityFunction &u, double r) noexcept {
  if (r <= 0.0)
    return kInf;
  if (const auto *s = std::get_if<SigmoidParams>(&u)) {
    const double a = s->a();
    return a / std::expm1(a * r) + a * logistic(a * (s->b() - r));
  }
  const auto &l = std::get<LogParams>(u);
  const double kr = l.k() * r;
  return l.k() / ((1.0 + kr) * std::log1p(kr));
}

} // namespace detail

double eval_utility(const UtilityFunction &u, double r) {
  check_rate(r);
  if (r == 0.0)
    return 0.0;
  if (const auto *s = std::get_if<SigmoidParams>(&u)) {
    const double a = s->a();
    return -std::expm1(-a * r) / (1.0 + std::exp(a * (s->b() - r)));
  }
  const auto &l = std::get<LogParams>(u);
  return std::log1p(l.k() * r) / std::log1p(l.k() * l.r_max());
}

double log_utility(const UtilityFunction &u, double r) {
  check_rate(r);
  return detail::log_utility(u, r);
}

double log_utility_slope(const UtilityFunction &u, double r) {
  if (!(r > 0.0))
    throw DomainError("log-utility slope needs a positive rate");
  return detail::log_utility_slope(u, r);
}

bool is_sigmoid(const UtilityFunction &u) noexcept {
  return std::holds_alternative<SigmoidParams>(u);
}

} // namespace upf
