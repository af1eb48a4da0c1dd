#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "upf/protocol.hpp"
#include "upf/utility.hpp"

namespace upf {

/// Centralized form of one allocation stage:
///   max sum_i ln U_i(r_i + shift_i)  s.t.  r >= 0, budget constraint(s).
///
/// With a single entry in `budgets` the constraint is pooled, sum_i r_i = B.
/// Otherwise `budgets[g]` constrains the UEs with `groups[i] == g`.
struct OracleProblem {
  std::vector<UtilityFunction> utilities;
  Eigen::VectorXd shifts;
  std::vector<std::size_t> groups;
  Eigen::VectorXd budgets;
  double step = 1e-3; ///< grid resolution h
};

/// Upper bound on UE count times grid points per UE.
inline constexpr double kGridGuard = 1e7;

double log_utility_sum(const std::vector<UtilityFunction> &utilities,
                       const Eigen::Ref<const Eigen::VectorXd> &rates,
                       const Eigen::Ref<const Eigen::VectorXd> &shifts);

double objective(const OracleProblem &problem, const Eigen::Ref<const Eigen::VectorXd> &rates);

/// Exact maximizer over every grid allocation r_i = k_i h' with
/// sum_i k_i = N, h' = B / N <= h. Solved by max-plus dynamic programming, so
/// it assumes nothing about concavity. Throws TooLarge past kGridGuard.
Eigen::VectorXd oracle_grid_solve(const OracleProblem &problem);

struct AscentResult {
  Eigen::VectorXd rates;
  double objective = 0.0;
  std::size_t sweeps = 0;
};

/// Cyclic pairwise coordinate ascent from the uniform split. Each step moves
/// rate between two UEs of the same block to the pair optimum (found by
/// bisection). Stops once a full sweep gains less than `tol`; throws
/// MaxItersError after `max_sweeps`.
AscentResult oracle_ascent_solve(const OracleProblem &problem, double tol = 1e-12,
                                 std::size_t max_sweeps = 100000);

/// Pooled problem for the UEs taking part in one protocol stage.
struct StageProblem {
  OracleProblem problem;
  std::vector<std::size_t> ue_index; ///< problem position -> Scenario::ues index
};

StageProblem stage_problem(const Scenario &scenario, Stage stage, double budget,
                           const Eigen::Ref<const Eigen::VectorXd> &shifts);

} // namespace upf
