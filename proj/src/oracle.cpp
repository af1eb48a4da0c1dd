#include "upf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "upf/errors.hpp"

namespace upf {

using Eigen::Index;
using Eigen::VectorXd;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void validate(const OracleProblem &p) {
  const auto n = p.utilities.size();
  if (n == 0)
    throw DomainError("oracle problem has no UEs");
  if (static_cast<std::size_t>(p.shifts.size()) != n)
    throw DomainError("oracle shifts must have one entry per UE");
  if ((p.shifts.array() < 0.0).any())
    throw DomainError("oracle shifts must be nonnegative");
  if (p.budgets.size() == 0)
    throw DomainError("oracle problem needs a budget");
  if (!(p.budgets.array() > 0.0).all())
    throw DomainError("oracle budgets must be positive");
  if (p.budgets.size() > 1) {
    if (p.groups.size() != n)
      throw DomainError("per-group budgets need a group per UE");
    for (auto g : p.groups)
      if (g >= static_cast<std::size_t>(p.budgets.size()))
        throw DomainError("UE group has no budget");
  }
}

// UE indices per budget block.
std::vector<std::vector<std::size_t>> blocks(const OracleProblem &p) {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(p.budgets.size()));
  for (std::size_t i = 0; i < p.utilities.size(); ++i)
    out[p.budgets.size() == 1 ? 0 : p.groups[i]].push_back(i);
  return out;
}

void grid_block(const OracleProblem &p, const std::vector<std::size_t> &members, double budget,
                VectorXd &rates) {
  if (members.empty())
    return;
  if (members.size() == 1) {
    rates[static_cast<Index>(members[0])] = budget;
    return;
  }
  const auto steps = static_cast<std::size_t>(std::ceil(budget / p.step - 1e-9));
  const std::size_t n = steps + 1;
  if (static_cast<double>(members.size()) * static_cast<double>(n) > kGridGuard)
    throw TooLarge("grid oracle: " + std::to_string(members.size()) + " UEs x " +
                   std::to_string(n) + " grid points exceeds the guard");
  const double h = budget / static_cast<double>(steps);

  // values[j][k] = ln U_j(k h + shift_j)
  std::vector<std::vector<double>> values(members.size(), std::vector<double>(n));
  for (std::size_t j = 0; j < members.size(); ++j) {
    const auto i = members[j];
    for (std::size_t k = 0; k < n; ++k)
      values[j][k] = detail::log_utility(p.utilities[i],
                                         static_cast<double>(k) * h + p.shifts[static_cast<Index>(i)]);
  }

  // best[k]: optimum of the UEs folded in so far using k steps.
  // choice[j][k]: steps given to UE j when k steps go to UEs 0..j.
  std::vector<double> best = values[0];
  std::vector<std::vector<std::size_t>> choice(members.size());
  for (std::size_t j = 1; j + 1 < members.size(); ++j) {
    std::vector<double> next(n, kNegInf);
    choice[j].assign(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
      double top = kNegInf;
      std::size_t arg = 0;
      for (std::size_t m = 0; m <= k; ++m) {
        const double v = best[k - m] + values[j][m];
        if (v > top) {
          top = v;
          arg = m;
        }
      }
      next[k] = top;
      choice[j][k] = arg;
    }
    best = std::move(next);
  }

  const auto last = members.size() - 1;
  double top = kNegInf;
  std::size_t arg = 0;
  for (std::size_t m = 0; m <= steps; ++m) {
    const double v = best[steps - m] + values[last][m];
    if (v > top) {
      top = v;
      arg = m;
    }
  }

  std::size_t remaining = steps;
  rates[static_cast<Index>(members[last])] = static_cast<double>(arg) * h;
  remaining -= arg;
  for (std::size_t j = last - 1; j >= 1; --j) {
    const auto m = choice[j][remaining];
    rates[static_cast<Index>(members[j])] = static_cast<double>(m) * h;
    remaining -= m;
  }
  rates[static_cast<Index>(members[0])] = static_cast<double>(remaining) * h;
}

// Optimal x in [0, total] for ln U_i(x + si) + ln U_j(total - x + sj).
double pair_split(const UtilityFunction &ui, double si, const UtilityFunction &uj, double sj,
                  double total) {
  const auto gap = [&](double x) {
    return detail::log_utility_slope(ui, x + si) - detail::log_utility_slope(uj, total - x + sj);
  };
  if (gap(0.0) <= 0.0)
    return 0.0;
  if (gap(total) >= 0.0)
    return total;
  double lo = 0.0;
  double hi = total;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

double log_utility_sum(const std::vector<UtilityFunction> &utilities,
                       const Eigen::Ref<const VectorXd> &rates,
                       const Eigen::Ref<const VectorXd> &shifts) {
  double sum = 0.0;
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    const auto idx = static_cast<Index>(i);
    sum += log_utility(utilities[i], rates[idx] + shifts[idx]);
  }
  return sum;
}

double objective(const OracleProblem &problem, const Eigen::Ref<const VectorXd> &rates) {
  return log_utility_sum(problem.utilities, rates, problem.shifts);
}

VectorXd oracle_grid_solve(const OracleProblem &problem) {
  validate(problem);
  if (!(problem.step > 0.0))
    throw DomainError("grid step must be positive");
  VectorXd rates = VectorXd::Zero(static_cast<Index>(problem.utilities.size()));
  const auto parts = blocks(problem);
  for (std::size_t b = 0; b < parts.size(); ++b)
    grid_block(problem, parts[b], problem.budgets[static_cast<Index>(b)], rates);
  return rates;
}

AscentResult oracle_ascent_solve(const OracleProblem &problem, double tol,
                                 std::size_t max_sweeps) {
  validate(problem);
  if (!(tol > 0.0))
    throw DomainError("ascent tolerance must be positive");

  const auto parts = blocks(problem);
  AscentResult result;
  result.rates = VectorXd::Zero(static_cast<Index>(problem.utilities.size()));
  for (std::size_t b = 0; b < parts.size(); ++b)
    for (auto i : parts[b])
      result.rates[static_cast<Index>(i)] =
          problem.budgets[static_cast<Index>(b)] / static_cast<double>(parts[b].size());

  auto &r = result.rates;
  double current = objective(problem, r);
  double gain = std::numeric_limits<double>::infinity();
  while (result.sweeps < max_sweeps) {
    ++result.sweeps;
    for (const auto &members : parts) {
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t c = a + 1; c < members.size(); ++c) {
          const auto i = static_cast<Index>(members[a]);
          const auto j = static_cast<Index>(members[c]);
          const double total = r[i] + r[j];
          if (total <= 0.0)
            continue;
          const double x = pair_split(problem.utilities[members[a]], problem.shifts[i],
                                      problem.utilities[members[c]], problem.shifts[j], total);
          r[i] = x;
          r[j] = total - x;
        }
      }
    }
    const double updated = objective(problem, r);
    gain = updated - current;
    current = updated;
    if (gain < tol) {
      result.objective = current;
      return result;
    }
  }
  throw MaxItersError("coordinate ascent did not settle after " + std::to_string(max_sweeps) +
                      " sweeps (last gain " + std::to_string(gain) + ")");
}

StageProblem stage_problem(const Scenario &scenario, Stage stage, double budget,
                           const Eigen::Ref<const VectorXd> &shifts) {
  StageProblem out;
  for (const auto &group : sector_groups(scenario)) {
    if (stage == Stage::Radar && group.interfering)
      continue;
    for (auto i : group.members)
      out.ue_index.push_back(i);
  }
  std::sort(out.ue_index.begin(), out.ue_index.end());
  auto &p = out.problem;
  p.shifts.resize(static_cast<Index>(out.ue_index.size()));
  for (std::size_t k = 0; k < out.ue_index.size(); ++k) {
    const auto i = out.ue_index[k];
    p.utilities.push_back(scenario.ues[i].utility);
    p.groups.push_back(scenario.ues[i].sector - 1);
    p.shifts[static_cast<Index>(k)] = shifts[static_cast<Index>(i)];
  }
  p.budgets = VectorXd::Constant(1, budget);
  return out;
}

} // namespace upf
