#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "upf/utility.hpp"

namespace upf {

inline constexpr int kScenarioSchemaVersion = 1;

struct Cell {
  std::string id;
  std::size_t ue_count = 0; ///< M_k

  friend bool operator==(const Cell &, const Cell &) = default;
};

struct Ue {
  std::string id;
  std::string cell;
  std::size_t sector = 1; ///< 1-based sector index
  UtilityFunction utility;

  friend bool operator==(const Ue &, const Ue &) = default;
};

/// Network under allocation. UEs sharing a sector index form one pooled
/// sector group across all cells.
struct Scenario {
  std::vector<Cell> cells;
  std::size_t sector_count = 0; ///< L
  std::vector<Ue> ues;
  std::vector<bool> interference; ///< per sector index, true = shares the radar band
  double r_radar_total = 0.0;
  double r_comm_total = 0.0;
  double default_log_r_max = 100.0;

  friend bool operator==(const Scenario &, const Scenario &) = default;
};

/// Throws ValidationError naming the first broken invariant.
void validate(const Scenario &scenario);

/// The 3-cell, 3-sector, 54-UE network with sector 3 radar-interfering,
/// R_radar = 200 and R_comm = 400.
Scenario builtin_table1();

/// Parses a JSON scenario document (see docs/scenario-format.md).
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path &path);

/// Canonical JSON serialization; `load_scenario(save_scenario(s)) == s`.
std::string save_scenario(const Scenario &scenario);

} // namespace upf
