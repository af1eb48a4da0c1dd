#include "upf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "upf/errors.hpp"

namespace upf {

using Json = nlohmann::ordered_json;

namespace {

void require(bool ok, const std::string &what) {
  if (!ok)
    throw ValidationError(what);
}

} // namespace

void validate(const Scenario &s) {
  require(s.sector_count >= 1, "sectors must be >= 1");
  require(s.interference.size() == s.sector_count,
          "interference mask needs one entry per sector index");
  require(!s.cells.empty(), "at least one cell is required");
  require(!s.ues.empty(), "at least one UE is required");
  require(std::isfinite(s.r_radar_total) && s.r_radar_total >= 0.0,
          "r_radar_total must be a nonnegative rate");
  require(std::isfinite(s.r_comm_total) && s.r_comm_total >= 0.0,
          "r_comm_total must be a nonnegative rate");
  require(std::isfinite(s.default_log_r_max) && s.default_log_r_max > 0.0,
          "default_log_r_max must be positive");

  std::set<std::string> cell_ids;
  for (const auto &c : s.cells)
    require(cell_ids.insert(c.id).second, "duplicate cell id '" + c.id + "'");

  std::set<std::string> ue_ids;
  for (const auto &ue : s.ues) {
    require(!ue.id.empty(), "UE id must be non-empty");
    require(ue_ids.insert(ue.id).second, "duplicate UE id '" + ue.id + "'");
    require(cell_ids.count(ue.cell) == 1,
            "UE '" + ue.id + "' references unknown cell '" + ue.cell + "'");
    require(ue.sector >= 1 && ue.sector <= s.sector_count,
            "UE '" + ue.id + "' sector index out of range");
  }
  for (const auto &c : s.cells) {
    const auto n = static_cast<std::size_t>(std::count_if(
        s.ues.begin(), s.ues.end(), [&](const Ue &u) { return u.cell == c.id; }));
    require(n == c.ue_count, "cell '" + c.id + "' ue_count " + std::to_string(c.ue_count) +
                                 " does not match its " + std::to_string(n) + " UEs");
  }
}

Scenario builtin_table1() {
  struct Row {
    const char *id;
    char kind; // 's' sigmoid, 'l' log
    double p1;
    double p2;
  };
  // Per cell: sector 1 -> ids 1..6, sector 2 -> 7..12, sector 3 -> 13..18.
  // Within a sector the first three are sigmoidal, the last three logarithmic.
  static constexpr Row rows[] = {
      {"A1", 's', 3, 10.0},  {"A2", 's', 3, 10.3},  {"A3", 's', 1, 10.6},
      {"A4", 'l', 1.1, 0},   {"A5", 'l', 1.2, 0},   {"A6", 'l', 1.3, 0},
      {"A7", 's', 3, 10.0},  {"A8", 's', 3, 15.3},  {"A9", 's', 3, 12.0},
      {"A10", 'l', 1, 0},    {"A11", 'l', 2, 0},    {"A12", 'l', 3, 0},
      {"A13", 's', 3, 15.1}, {"A14", 's', 3, 15.3}, {"A15", 's', 3, 15.5},
      {"A16", 'l', 10, 0},   {"A17", 'l', 11, 0},   {"A18", 'l', 12, 0},

      {"B1", 's', 3, 15.9},  {"B2", 's', 3, 11.2},  {"B3", 's', 1, 11.5},
      {"B4", 'l', 1.4, 0},   {"B5", 'l', 1.5, 0},   {"B6", 'l', 1.6, 0},
      {"B7", 's', 3, 13},    {"B8", 's', 3, 14},    {"B9", 's', 1, 15},
      {"B10", 'l', 4, 0},    {"B11", 'l', 5, 0},    {"B12", 'l', 6, 0},
      {"B13", 's', 3, 15.7}, {"B14", 's', 3, 15.9}, {"B15", 's', 3, 17.3},
      {"B16", 'l', 13, 0},   {"B17", 'l', 14, 0},   {"B18", 'l', 15, 0},

      {"C1", 's', 3, 11.8},  {"C2", 's', 3, 12.1},  {"C3", 's', 1, 12.4},
      {"C4", 'l', 1.7, 0},   {"C5", 'l', 1.8, 0},   {"C6", 'l', 1.9, 0},
      {"C7", 's', 3, 16},    {"C8", 's', 3, 17},    {"C9", 's', 1, 18},
      {"C10", 'l', 7, 0},    {"C11", 'l', 8, 0},    {"C12", 'l', 9, 0},
      {"C13", 's', 3, 17.5}, {"C14", 's', 3, 17.7}, {"C15", 's', 3, 17.9},
      {"C16", 'l', 16, 0},   {"C17", 'l', 17, 0},   {"C18", 'l', 18, 0},
  };

  Scenario s;
  s.sector_count = 3;
  s.interference = {false, false, true};
  s.r_radar_total = 200.0;
  s.r_comm_total = 400.0;
  s.default_log_r_max = 100.0;
  s.cells = {{"A", 18}, {"B", 18}, {"C", 18}};
  s.ues.reserve(std::size(rows));
  for (std::size_t i = 0; i < std::size(rows); ++i) {
    const auto &row = rows[i];
    const UtilityFunction utility = row.kind == 's'
                                        ? UtilityFunction(SigmoidParams(row.p1, row.p2))
                                        : UtilityFunction(LogParams(row.p1, s.default_log_r_max));
    s.ues.push_back({row.id, std::string(1, row.id[0]), (i % 18) / 6 + 1, utility});
  }
  return s;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

const Json &field(const Json &obj, const char *key, const std::string &path) {
  if (!obj.is_object())
    throw ParseError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end())
    throw ParseError(path + "." + key + ": missing field");
  return *it;
}

double number(const Json &j, const std::string &path) {
  if (!j.is_number())
    throw ParseError(path + ": expected a number");
  return j.get<double>();
}

std::size_t count(const Json &j, const std::string &path) {
  if (!j.is_number_unsigned())
    throw ParseError(path + ": expected a nonnegative integer");
  return j.get<std::size_t>();
}

std::string text(const Json &j, const std::string &path) {
  if (!j.is_string())
    throw ParseError(path + ": expected a string");
  return j.get<std::string>();
}

const Json &array(const Json &j, const std::string &path) {
  if (!j.is_array())
    throw ParseError(path + ": expected an array");
  return j;
}

UtilityFunction parse_utility(const Json &j, const std::string &path, double default_r_max) {
  const auto type = text(field(j, "type", path), path + ".type");
  try {
    if (type == "sigmoid")
      return SigmoidParams(number(field(j, "a", path), path + ".a"),
                           number(field(j, "b", path), path + ".b"));
    if (type == "log") {
      double r_max = default_r_max;
      if (auto it = j.find("r_max"); it != j.end())
        r_max = number(*it, path + ".r_max");
      return LogParams(number(field(j, "k", path), path + ".k"), r_max);
    }
  } catch (const DomainError &e) {
    throw ValidationError(path + ": " + e.what());
  }
  throw ParseError(path + ".type: unknown utility type '" + type + "'");
}

Json utility_json(const UtilityFunction &u, double default_r_max) {
  Json j;
  if (const auto *s = std::get_if<SigmoidParams>(&u)) {
    j["type"] = "sigmoid";
    j["a"] = s->a();
    j["b"] = s->b();
  } else {
    const auto &l = std::get<LogParams>(u);
    j["type"] = "log";
    j["k"] = l.k();
    if (l.r_max() != default_r_max)
      j["r_max"] = l.r_max();
  }
  return j;
}

} // namespace

Scenario load_scenario(std::string_view doc) {
  Json root;
  try {
    root = Json::parse(doc.begin(), doc.end());
  } catch (const Json::parse_error &e) {
    const auto line = line_of(doc, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("line " + std::to_string(line) + ": " + e.what(), line);
  }

  const std::string top = "$";
  const auto version = count(field(root, "schema_version", top), "$.schema_version");
  if (version != static_cast<std::size_t>(kScenarioSchemaVersion))
    throw ParseError("$.schema_version: unsupported version " + std::to_string(version));

  Scenario s;
  s.sector_count = count(field(root, "sectors", top), "$.sectors");

  const auto &budgets = field(root, "budgets", top);
  s.r_radar_total = number(field(budgets, "r_radar_total", "$.budgets"), "$.budgets.r_radar_total");
  s.r_comm_total = number(field(budgets, "r_comm_total", "$.budgets"), "$.budgets.r_comm_total");
  if (auto it = root.find("default_log_r_max"); it != root.end())
    s.default_log_r_max = number(*it, "$.default_log_r_max");

  const auto &mask = array(field(root, "interference", top), "$.interference");
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i].is_boolean())
      throw ParseError("$.interference[" + std::to_string(i) + "]: expected a boolean");
    s.interference.push_back(mask[i].get<bool>());
  }

  const auto &cells = array(field(root, "cells", top), "$.cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto path = "$.cells[" + std::to_string(i) + "]";
    s.cells.push_back({text(field(cells[i], "id", path), path + ".id"),
                       count(field(cells[i], "ue_count", path), path + ".ue_count")});
  }

  if (!(s.default_log_r_max > 0.0))
    throw ValidationError("default_log_r_max must be positive");
  const auto &ues = array(field(root, "ues", top), "$.ues");
  for (std::size_t i = 0; i < ues.size(); ++i) {
    const auto path = "$.ues[" + std::to_string(i) + "]";
    s.ues.push_back({text(field(ues[i], "id", path), path + ".id"),
                     text(field(ues[i], "cell", path), path + ".cell"),
                     count(field(ues[i], "sector", path), path + ".sector"),
                     parse_utility(field(ues[i], "utility", path), path + ".utility",
                                   s.default_log_r_max)});
  }

  validate(s);
  return s;
}

Scenario load_scenario_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

std::string save_scenario(const Scenario &s) {
  Json root;
  root["schema_version"] = kScenarioSchemaVersion;
  root["sectors"] = s.sector_count;
  root["interference"] = Json::array();
  for (bool b : s.interference)
    root["interference"].push_back(b);
  root["budgets"] = {{"r_radar_total", s.r_radar_total}, {"r_comm_total", s.r_comm_total}};
  root["default_log_r_max"] = s.default_log_r_max;
  root["cells"] = Json::array();
  for (const auto &c : s.cells)
    root["cells"].push_back({{"id", c.id}, {"ue_count", c.ue_count}});
  root["ues"] = Json::array();
  for (const auto &ue : s.ues) {
    Json j;
    j["id"] = ue.id;
    j["cell"] = ue.cell;
    j["sector"] = ue.sector;
    j["utility"] = utility_json(ue.utility, s.default_log_r_max);
    root["ues"].push_back(std::move(j));
  }
  return root.dump(2) + "\n";
}

} // namespace upf
