#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "upf/protocol.hpp"
#include "upf/scenario.hpp"
#include "upf/utility.hpp"

namespace upf::test {

/// Every distinct utility in the built-in network.
inline std::vector<UtilityFunction> table1_utilities() {
  std::vector<UtilityFunction> out;
  for (const auto &ue : builtin_table1().ues)
    out.push_back(ue.utility);
  return out;
}

/// Upper end of the property grids: 2b for sigmoids, r_max for logs.
inline double grid_end(const UtilityFunction &u) {
  if (const auto *s = std::get_if<SigmoidParams>(&u))
    return 2.0 * s->b();
  return std::get<LogParams>(u).r_max();
}

/// Sigmoid straight from its c/d definition (no algebraic rewriting).
inline double sigmoid_literal(double a, double b, double r) {
  const double e = std::exp(a * b);
  const double c = (1.0 + e) / e;
  const double d = 1.0 / (1.0 + e);
  return c * (1.0 / (1.0 + std::exp(-a * (r - b))) - d);
}

/// Central difference of ln U with h = 1e-6 max(1, r).
inline double fd_log_slope(const UtilityFunction &u, double r) {
  const double h = 1e-6 * std::max(1.0, r);
  return (log_utility(u, r + h) - log_utility(u, r - h)) / (2.0 * h);
}

inline double relative_error(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

struct GridReport {
  bool monotone = true;
  double worst_second_difference = -INFINITY; ///< of ln U
  double worst_slope_error = 0.0;             ///< relative, analytic vs finite difference
};

/// Walks ln U over (0, grid_end] in steps of h.
inline GridReport utility_grid(const UtilityFunction &u, double h = 1e-3) {
  GridReport rep;
  const double end = grid_end(u);
  for (double r = h; r <= end; r += h) {
    const double prev = log_utility(u, r - h);
    const double here = log_utility(u, r);
    const double next = log_utility(u, r + h);
    rep.monotone = rep.monotone && next > here;
    if (r > h) // ln U(0) = -inf
      rep.worst_second_difference = std::max(rep.worst_second_difference, next - 2.0 * here + prev);
    rep.worst_slope_error = std::max(
        rep.worst_slope_error, relative_error(log_utility_slope(u, r), fd_log_slope(u, r)));
  }
  return rep;
}

/// One-cell network; each entry is (sector index, utility).
inline Scenario small_scenario(const std::vector<std::pair<std::size_t, UtilityFunction>> &ues,
                               std::size_t sectors, std::vector<bool> mask = {}) {
  Scenario s;
  s.sector_count = sectors;
  s.interference = mask.empty() ? std::vector<bool>(sectors, false) : std::move(mask);
  s.cells.push_back({"X", ues.size()});
  for (std::size_t i = 0; i < ues.size(); ++i)
    s.ues.push_back({"u" + std::to_string(i + 1), "X", ues[i].first, ues[i].second});
  return s;
}

/// Largest relative gap between an interior UE's finite-difference log-slope
/// and its group price. Interior means 1e-6 < r < budget - 1e-6.
inline double kkt_gap(const Scenario &scenario, const StageOutcome &out,
                      const Eigen::VectorXd &shifts, double budget) {
  double worst = 0.0;
  for (std::size_t i = 0; i < scenario.ues.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const double r = out.rates[idx];
    if (!out.participating[i] || r <= 1e-6 || r >= budget - 1e-6)
      continue;
    const double price = out.group_prices[static_cast<Eigen::Index>(scenario.ues[i].sector - 1)];
    const double slope = fd_log_slope(scenario.ues[i].utility, shifts[idx] + r);
    worst = std::max(worst, relative_error(slope, price));
  }
  return worst;
}

} // namespace upf::test
