#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "upf/scenario.hpp"

namespace upf {

enum class Stage { Radar, Comm };
enum class StopReason { Converged, MaxIters };

const char *to_string(Stage stage) noexcept;
const char *to_string(StopReason reason) noexcept;

/// All UEs (across cells) sharing one sector index. Priced by one eNB sector
/// agent and budgeted by the MME as a unit.
struct SectorGroup {
  std::size_t sector_index = 1;     ///< 1-based
  std::vector<std::size_t> members; ///< indices into Scenario::ues, ascending
  bool interfering = false;
};

std::vector<SectorGroup> sector_groups(const Scenario &scenario);

struct StageConfig {
  Stage stage = Stage::Radar;
  double budget = 0.0;     ///< R_radar or R_comm
  double delta = 1e-3;     ///< MME stop threshold on |W^l(n) - W^l(n-1)|
  std::size_t max_iters = 10000;
  double initial_bid = 1.0;
};

/// Per-iteration protocol state. Vectors indexed by UE (`bids`) or by sector
/// group, position l-1 for sector index l (`aggregate_bids`, `prices`,
/// `budgets`).
struct StageState {
  std::size_t iteration = 0;
  Eigen::VectorXd bids;
  Eigen::VectorXd aggregate_bids;
  Eigen::VectorXd previous_aggregate_bids;
  Eigen::VectorXd prices;
  Eigen::VectorXd budgets;
};

struct TraceSnapshot {
  std::size_t iteration = 0;
  Eigen::VectorXd aggregate_bids;
  Eigen::VectorXd prices;
  Eigen::VectorXd budgets;
};

struct ConvergenceTrace {
  std::vector<TraceSnapshot> snapshots;
  StopReason stop_reason = StopReason::Converged;

  std::size_t iterations() const noexcept { return snapshots.size(); }
  bool converged() const noexcept { return stop_reason == StopReason::Converged; }
};

struct StageOutcome {
  Eigen::VectorXd rates;         ///< per UE; 0 for UEs outside the stage
  Eigen::VectorXd group_budgets; ///< final R^l
  Eigen::VectorXd group_prices;  ///< final P^l (0 for excluded groups)
  Eigen::VectorXd group_totals;  ///< sum of member rates per group
  std::vector<bool> participating; ///< per UE
  ConvergenceTrace trace;
};

struct AllocationResult {
  Eigen::VectorXd r_radar;
  Eigen::VectorXd r_comm;
  Eigen::VectorXd r_aggregate;
  Eigen::VectorXd radar_group_totals;
  Eigen::VectorXd comm_group_totals;
  Eigen::VectorXd aggregate_group_totals;
  ConvergenceTrace radar_trace;
  ConvergenceTrace comm_trace;

  bool converged() const noexcept { return radar_trace.converged() && comm_trace.converged(); }
};

/// Sector agent price P = sum(bids) / budget. Throws DegeneratePrice when all
/// bids are zero.
double shadow_price(const Eigen::Ref<const Eigen::VectorXd> &group_bids, double group_budget);

/// MME budget split: R^l = R W^l / sum of eligible W, masked groups get 0.
/// Falls back to an equal split across eligible groups while all eligible
/// bids are zero (the n = 0 state). Throws NoEligibleGroup if every group is
/// masked.
Eigen::VectorXd mme_split_budget(double total_budget,
                                 const Eigen::Ref<const Eigen::VectorXd> &aggregate_bids,
                                 const std::vector<bool> &masked);

/// Runs one allocation stage to convergence or `max_iters`. `shifts` holds
/// the per-UE rate added inside the utility (all zero in the radar stage).
/// Each group is quoted W / R unless that leaves the price bracket set by its
/// earlier quotes, in which case it gets the bracket's geometric midpoint.
/// Final rates are r = w / P at the unbracketed W / R.
StageOutcome run_stage(const Scenario &scenario, const StageConfig &config,
                       const Eigen::Ref<const Eigen::VectorXd> &shifts);

/// Radar-spectrum stage with the interference mask, then the
/// communications-spectrum stage over all groups, shifted by the stage-1 rates.
AllocationResult run_two_stage(const Scenario &scenario, const StageConfig &radar,
                               const StageConfig &comm);

/// run_two_stage with budgets taken from the scenario and the other
/// parameters from `base`.
AllocationResult run_two_stage(const Scenario &scenario, const StageConfig &base = {});

} // namespace upf
