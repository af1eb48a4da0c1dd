#include "upf/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "upf/errors.hpp"

namespace upf {

void validate(const SweepSpec &spec) {
  if (!std::isfinite(spec.r_total_min) || !std::isfinite(spec.r_total_max) ||
      spec.r_total_min < 0.0)
    throw DomainError("sweep bounds must be finite nonnegative rates");
  if (spec.r_total_min > spec.r_total_max)
    throw DomainError("sweep min exceeds max");
  if (!(spec.r_total_step > 0.0))
    throw DomainError("sweep step must be positive");
  if (!(spec.radar_cap >= 0.0))
    throw DomainError("radar cap must be nonnegative");
}

std::vector<double> sweep_totals(const SweepSpec &spec) {
  validate(spec);
  std::vector<double> totals;
  const double slack = 1e-9 * spec.r_total_step;
  for (std::size_t k = 0;; ++k) {
    const double r = spec.r_total_min + static_cast<double>(k) * spec.r_total_step;
    if (r > spec.r_total_max + slack)
      break;
    totals.push_back(r);
  }
  return totals;
}

SweepPoint run_sweep_point(const Scenario &scenario, const SweepSpec &spec, double r_total,
                           const StageConfig &base) {
  SweepPoint point;
  point.r_total = r_total;
  point.r_radar = std::min(r_total, spec.radar_cap);
  point.r_comm = r_total - point.r_radar;

  Scenario filled = scenario;
  filled.r_radar_total = point.r_radar;
  filled.r_comm_total = point.r_comm;
  if (spec.no_radar)
    filled.interference.assign(filled.sector_count, false);
  point.result = run_two_stage(filled, base);
  return point;
}

std::string format_number(double value) {
  if (value == 0.0)
    return "0"; // also folds -0
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

void write_allocation_csv(std::ostream &os, const Scenario &scenario,
                          const AllocationResult &result) {
  os << "id,cell,sector,r_radar,r_comm,r_aggregate,utility\n";
  for (std::size_t i = 0; i < scenario.ues.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const auto &ue = scenario.ues[i];
    os << ue.id << ',' << ue.cell << ',' << ue.sector << ',' << format_number(result.r_radar[idx])
       << ',' << format_number(result.r_comm[idx]) << ','
       << format_number(result.r_aggregate[idx]) << ','
       << format_number(eval_utility(ue.utility, result.r_aggregate[idx])) << '\n';
  }
}

void write_trace_csv(std::ostream &os, const AllocationResult &result) {
  os << "stage,iteration,group,W,P,R\n";
  const auto dump = [&os](Stage stage, const ConvergenceTrace &trace) {
    for (const auto &snap : trace.snapshots)
      for (Eigen::Index l = 0; l < snap.aggregate_bids.size(); ++l)
        os << to_string(stage) << ',' << snap.iteration << ',' << (l + 1) << ','
           << format_number(snap.aggregate_bids[l]) << ',' << format_number(snap.prices[l])
           << ',' << format_number(snap.budgets[l]) << '\n';
  };
  dump(Stage::Radar, result.radar_trace);
  dump(Stage::Comm, result.comm_trace);
}

void write_sweep_header(std::ostream &os, std::size_t sector_count) {
  os << "R_total,R_radar_used,R_comm_used";
  for (const char *prefix : {"radar_s", "comm_s", "aggregate_s"})
    for (std::size_t l = 1; l <= sector_count; ++l)
      os << ',' << prefix << l;
  os << '\n';
}

void write_sweep_row(std::ostream &os, const SweepPoint &point) {
  os << format_number(point.r_total) << ',' << format_number(point.r_radar) << ','
     << format_number(point.r_comm);
  const auto &res = point.result;
  for (const auto *totals :
       {&res.radar_group_totals, &res.comm_group_totals, &res.aggregate_group_totals})
    for (Eigen::Index l = 0; l < totals->size(); ++l)
      os << ',' << format_number((*totals)[l]);
  os << '\n';
}

} // namespace upf
