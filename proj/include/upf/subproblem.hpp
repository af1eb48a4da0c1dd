#pragma once

#include "upf/utility.hpp"

namespace upf {

/// One UE's best response to a shadow price:
///   argmax_{0 <= r <= rate_cap} ln U(r + shift) - price * r.
struct SubproblemSpec {
  UtilityFunction utility;
  double price = 1.0;
  double shift = 0.0;
  double rate_cap = 1.0;
};

inline constexpr double kSubproblemTolerance = 1e-9;

/// Bisection on the (strictly decreasing) log-slope. Returns 0 when the
/// objective already falls at r = 0 and `rate_cap` when it still rises there.
double solve_ue_rate(const SubproblemSpec &spec, double tol = kSubproblemTolerance);

/// w = P r.
double bid_from_rate(double price, double rate);

} // namespace upf
