#include "upf/subproblem.hpp"

#include <cmath>

#include "upf/errors.hpp"

namespace upf {

namespace {

void validate(const SubproblemSpec &spec, double tol) {
  if (!(spec.price > 0.0) || !std::isfinite(spec.price))
    throw DomainError("subproblem price must be positive");
  if (!(spec.shift >= 0.0) || !std::isfinite(spec.shift))
    throw DomainError("subproblem shift must be nonnegative");
  if (!(spec.rate_cap > 0.0) || !std::isfinite(spec.rate_cap))
    throw DomainError("subproblem rate cap must be positive");
  if (!(tol > 0.0))
    throw DomainError("subproblem tolerance must be positive");
}

} // namespace

double solve_ue_rate(const SubproblemSpec &spec, double tol) {
  validate(spec, tol);
  const auto excess = [&](double r) {
    return detail::log_utility_slope(spec.utility, r + spec.shift) - spec.price;
  };

  // Corner: objective is nonincreasing on [0, cap].
  if (spec.shift > 0.0 && excess(0.0) <= 0.0)
    return 0.0;
  if (excess(spec.rate_cap) >= 0.0)
    return spec.rate_cap;

  double lo = spec.shift > 0.0 ? 0.0 : 1e-12;
  double hi = spec.rate_cap;
  if (excess(lo) <= 0.0)
    return lo;
  // excess(lo) > 0 > excess(hi) from here on.
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    if (excess(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double bid_from_rate(double price, double rate) {
  if (!(price > 0.0))
    throw DomainError("bid price must be positive");
  if (!(rate >= 0.0))
    throw DomainError("bid rate must be nonnegative");
  return price * rate;
}

} // namespace upf
