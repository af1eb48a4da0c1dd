#include "upf/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "upf/errors.hpp"
#include "upf/subproblem.hpp"

namespace upf {

using Eigen::VectorXd;

const char *to_string(Stage stage) noexcept {
  return stage == Stage::Radar ? "radar" : "comm";
}

const char *to_string(StopReason reason) noexcept {
  return reason == StopReason::Converged ? "converged" : "max_iters";
}

std::vector<SectorGroup> sector_groups(const Scenario &scenario) {
  std::vector<SectorGroup> groups(scenario.sector_count);
  for (std::size_t l = 0; l < groups.size(); ++l) {
    groups[l].sector_index = l + 1;
    groups[l].interfering = l < scenario.interference.size() && scenario.interference[l];
  }
  for (std::size_t i = 0; i < scenario.ues.size(); ++i) {
    const auto sector = scenario.ues[i].sector;
    if (sector < 1 || sector > groups.size())
      throw ValidationError("UE '" + scenario.ues[i].id + "' sector index out of range");
    groups[sector - 1].members.push_back(i);
  }
  return groups;
}

double shadow_price(const Eigen::Ref<const VectorXd> &group_bids, double group_budget) {
  if (!(group_budget > 0.0))
    throw DomainError("shadow price needs a positive group budget");
  if ((group_bids.array() < 0.0).any())
    throw DomainError("bids must be nonnegative");
  const double total = group_bids.sum();
  if (!(total > 0.0))
    throw DegeneratePrice("all bids in the group are zero");
  return total / group_budget;
}

VectorXd mme_split_budget(double total_budget, const Eigen::Ref<const VectorXd> &aggregate_bids,
                          const std::vector<bool> &masked) {
  if (!(total_budget > 0.0))
    throw DomainError("MME needs a positive stage budget");
  const auto groups = aggregate_bids.size();
  if (static_cast<Eigen::Index>(masked.size()) != groups)
    throw DomainError("mask and aggregate bids differ in length");
  if ((aggregate_bids.array() < 0.0).any())
    throw DomainError("aggregate bids must be nonnegative");

  double eligible_bids = 0.0;
  Eigen::Index eligible = 0;
  for (Eigen::Index l = 0; l < groups; ++l) {
    if (!masked[l]) {
      eligible_bids += aggregate_bids[l];
      ++eligible;
    }
  }
  if (eligible == 0)
    throw NoEligibleGroup("every sector group is masked");

  VectorXd budgets = VectorXd::Zero(groups);
  for (Eigen::Index l = 0; l < groups; ++l) {
    if (masked[l])
      continue;
    budgets[l] = eligible_bids > 0.0 ? total_budget * (aggregate_bids[l] / eligible_bids)
                                     : total_budget / static_cast<double>(eligible);
  }
  return budgets;
}

namespace {

// Price bracket for one sector group. A quote whose shadow price W / R came
// back higher is below equilibrium; one that came back lower is above it.
// The eNB quotes W / R inside the bracket, the geometric midpoint otherwise.
struct Bracket {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  double quote(double previous, double target) {
    if (previous > 0.0) {
      if (target > previous)
        lo = std::max(lo, previous);
      else if (target < previous)
        hi = std::min(hi, previous);
    }
    if (target > lo && target < hi)
      return target;
    return lo > 0.0 && std::isfinite(hi) ? std::sqrt(lo * hi) : target;
  }
};

void validate(const StageConfig &config) {
  if (!(config.budget >= 0.0) || !std::isfinite(config.budget))
    throw DomainError("stage budget must be a nonnegative rate");
  if (!(config.delta > 0.0))
    throw DomainError("delta must be positive");
  if (config.max_iters < 1)
    throw DomainError("max_iters must be >= 1");
  if (!(config.initial_bid > 0.0))
    throw DomainError("initial bid must be positive");
}

// Aggregate bids per group (eNB step).
VectorXd aggregate(const std::vector<SectorGroup> &groups, const VectorXd &bids) {
  VectorXd totals = VectorXd::Zero(static_cast<Eigen::Index>(groups.size()));
  for (std::size_t l = 0; l < groups.size(); ++l)
    for (auto i : groups[l].members)
      totals[l] += bids[i];
  return totals;
}

} // namespace

StageOutcome run_stage(const Scenario &scenario, const StageConfig &config,
                       const Eigen::Ref<const VectorXd> &shifts) {
  validate(config);
  const auto ue_count = static_cast<Eigen::Index>(scenario.ues.size());
  if (shifts.size() != ue_count)
    throw DomainError("shifts must have one entry per UE");
  if ((shifts.array() < 0.0).any() || !shifts.allFinite())
    throw DomainError("shifts must be nonnegative rates");

  const auto groups = sector_groups(scenario);
  const auto group_count = static_cast<Eigen::Index>(groups.size());

  // A group sits the stage out when radar-masked or empty.
  std::vector<bool> excluded(groups.size());
  for (std::size_t l = 0; l < groups.size(); ++l)
    excluded[l] = groups[l].members.empty() ||
                  (config.stage == Stage::Radar && groups[l].interfering);

  StageOutcome out;
  out.rates = VectorXd::Zero(ue_count);
  out.group_budgets = VectorXd::Zero(group_count);
  out.group_prices = VectorXd::Zero(group_count);
  out.group_totals = VectorXd::Zero(group_count);
  out.participating.assign(scenario.ues.size(), false);
  out.trace.stop_reason = StopReason::Converged;

  if (config.budget == 0.0)
    return out;

  for (std::size_t l = 0; l < groups.size(); ++l)
    if (!excluded[l])
      for (auto i : groups[l].members)
        out.participating[i] = true;

  StageState state;
  state.bids = VectorXd::Zero(ue_count);
  for (Eigen::Index i = 0; i < ue_count; ++i)
    if (out.participating[i])
      state.bids[i] = config.initial_bid;
  state.previous_aggregate_bids = VectorXd::Zero(group_count);
  state.budgets = mme_split_budget(config.budget, VectorXd::Zero(group_count), excluded);
  state.prices = VectorXd::Zero(group_count);

  std::vector<Bracket> brackets(groups.size());

  for (std::size_t n = 1; n <= config.max_iters; ++n) {
    state.iteration = n;

    // eNB: aggregate bids and forward them to the MME.
    state.aggregate_bids = aggregate(groups, state.bids);

    // MME: stop test, then budget split.
    // A round with no bids at all never counts as converged.
    bool converged = state.aggregate_bids.sum() > 0.0;
    for (Eigen::Index l = 0; l < group_count; ++l)
      if (!excluded[l] &&
          !(std::abs(state.aggregate_bids[l] - state.previous_aggregate_bids[l]) < config.delta))
        converged = false;
    state.budgets = mme_split_budget(config.budget, state.aggregate_bids, excluded);

    // eNB: shadow prices W / R. A group whose members all bid zero holds no
    // budget; it is quoted the pooled price sum(W) / R that every bidding group
    // sees.
    const double pooled_bids = state.aggregate_bids.sum();
    VectorXd targets = VectorXd::Zero(group_count);
    for (Eigen::Index l = 0; l < group_count; ++l) {
      if (excluded[l])
        continue;
      if (pooled_bids <= 0.0) {
        // Nobody demands anything at the last price: back it off.
        targets[l] = 0.5 * state.prices[l];
      } else if (state.aggregate_bids[l] > 0.0) {
        VectorXd member_bids(static_cast<Eigen::Index>(groups[l].members.size()));
        for (std::size_t m = 0; m < groups[l].members.size(); ++m)
          member_bids[static_cast<Eigen::Index>(m)] = state.bids[groups[l].members[m]];
        targets[l] = shadow_price(member_bids, state.budgets[l]);
      } else {
        targets[l] = pooled_bids / config.budget;
      }
      if (!(targets[l] > 0.0))
        throw DegeneratePrice("sector " + std::to_string(l + 1) + " price collapsed to zero");
    }

    const bool last = converged || n == config.max_iters;
    if (last) {
      state.prices = targets;
    } else {
      for (Eigen::Index l = 0; l < group_count; ++l) {
        if (excluded[l])
          continue;
        state.prices[l] = brackets[static_cast<std::size_t>(l)].quote(state.prices[l], targets[l]);
      }
    }

    out.trace.snapshots.push_back({n, state.aggregate_bids, state.prices, state.budgets});

    if (last) {
      if (!converged)
        out.trace.stop_reason = StopReason::MaxIters;
      break;
    }
    state.previous_aggregate_bids = state.aggregate_bids;

    // UEs: best response to the quoted price, bid w = P r.
    for (std::size_t l = 0; l < groups.size(); ++l) {
      if (excluded[l])
        continue;
      const double price = state.prices[static_cast<Eigen::Index>(l)];
      for (auto i : groups[l].members) {
        const double rate = solve_ue_rate(
            {scenario.ues[i].utility, price, shifts[static_cast<Eigen::Index>(i)], config.budget});
        state.bids[static_cast<Eigen::Index>(i)] = bid_from_rate(price, rate);
      }
    }
  }

  // STOP: every UE converts its last bid at the last price, r = w / P.
  for (std::size_t l = 0; l < groups.size(); ++l) {
    if (excluded[l])
      continue;
    const double price = state.prices[static_cast<Eigen::Index>(l)];
    for (auto i : groups[l].members) {
      const auto idx = static_cast<Eigen::Index>(i);
      out.rates[idx] = state.bids[idx] / price;
      out.group_totals[static_cast<Eigen::Index>(l)] += out.rates[idx];
    }
  }
  out.group_budgets = state.budgets;
  out.group_prices = state.prices;
  return out;
}

AllocationResult run_two_stage(const Scenario &scenario, const StageConfig &radar,
                               const StageConfig &comm) {
  if (radar.stage != Stage::Radar || comm.stage != Stage::Comm)
    throw DomainError("run_two_stage expects a radar then a comm stage config");
  const auto ue_count = static_cast<Eigen::Index>(scenario.ues.size());

  auto first = run_stage(scenario, radar, VectorXd::Zero(ue_count));
  auto second = run_stage(scenario, comm, first.rates);

  AllocationResult result;
  result.r_radar = std::move(first.rates);
  result.r_comm = std::move(second.rates);
  result.r_aggregate = result.r_radar + result.r_comm;
  result.radar_group_totals = std::move(first.group_totals);
  result.comm_group_totals = std::move(second.group_totals);
  result.aggregate_group_totals = result.radar_group_totals + result.comm_group_totals;
  result.radar_trace = std::move(first.trace);
  result.comm_trace = std::move(second.trace);
  return result;
}

AllocationResult run_two_stage(const Scenario &scenario, const StageConfig &base) {
  StageConfig radar = base;
  radar.stage = Stage::Radar;
  radar.budget = scenario.r_radar_total;
  StageConfig comm = base;
  comm.stage = Stage::Comm;
  comm.budget = scenario.r_comm_total;
  return run_two_stage(scenario, radar, comm);
}

} // namespace upf
