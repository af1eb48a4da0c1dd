#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "upf/protocol.hpp"
#include "upf/scenario.hpp"

namespace upf {

/// Total-bandwidth sweep with radar-first fill: R_radar = min(R_total,
/// radar_cap), R_comm = R_total - R_radar.
struct SweepSpec {
  double r_total_min = 0.0;
  double r_total_max = 0.0;
  double r_total_step = 1.0;
  double radar_cap = 200.0;
  bool no_radar = false; ///< clear the interference mask (baseline run)
};

struct SweepPoint {
  double r_total = 0.0;
  double r_radar = 0.0;
  double r_comm = 0.0;
  AllocationResult result;
};

void validate(const SweepSpec &spec);

/// R_total values min, min + step, ... up to max (inclusive).
std::vector<double> sweep_totals(const SweepSpec &spec);

/// One sweep point: copy of `scenario` with the filled budgets (and mask
/// cleared for a baseline sweep), run through both stages.
SweepPoint run_sweep_point(const Scenario &scenario, const SweepSpec &spec, double r_total,
                           const StageConfig &base = {});

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

/// id,cell,sector,r_radar,r_comm,r_aggregate,utility
void write_allocation_csv(std::ostream &os, const Scenario &scenario,
                          const AllocationResult &result);

/// stage,iteration,group,W,P,R (one row per sector group per iteration)
void write_trace_csv(std::ostream &os, const AllocationResult &result);

/// R_total,R_radar_used,R_comm_used,radar_s<l>...,comm_s<l>...,aggregate_s<l>...
void write_sweep_header(std::ostream &os, std::size_t sector_count);
void write_sweep_row(std::ostream &os, const SweepPoint &point);

} // namespace upf
