#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cisim/dynamics.hpp"
#include "cisim/protocol.hpp"

namespace cisim {

enum class Subcommand { Coherence, CiGain, Fringes, Protocol, Budget, Falsify, Sweep };

std::optional<Subcommand> parse_subcommand(std::string_view name);
std::string_view to_string(Subcommand cmd);

/// Coherence-length curves in reduced units.
struct ReducedSpec {
  std::vector<double> lambda_tilde;
  double t_min = 1e-1;  // reduced time, log-spaced grid
  double t_max = 0.0;   // 0: ten times the largest peak time
  std::size_t samples = 400;
  std::optional<double> g_x;  // dashed CI curves when both gains are given
  std::optional<double> g_p;
};

struct FringesSpec {
  EvolutionKind evolution = EvolutionKind::FreeExpansion;
  Time time{0.0};  // free-expansion time, or inverted duration of the momentum mapping
  std::optional<LocalizationRate> lambda_loc;  // overrides the plan's environment
};

struct SweepAxis {
  std::string key;  // dotted path, e.g. "sphere.radius_um"
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 1;
  bool log = false;

  double value(std::size_t i) const;
};

struct SweepSpec {
  Subcommand target = Subcommand::Budget;
  std::vector<SweepAxis> axes;
  std::size_t max_points = 1000000;
};

struct RunConfig {
  nlohmann::json raw;
  ProtocolPlan plan;
  double margin = 10.0;
  std::optional<Time> t_inflate;  // explicitly configured inflation time
  bool free_time_given = false;
  std::optional<ReducedSpec> reduced;
  std::vector<double> ci_gain_times;  // seconds; empty: the plan's t_I
  FringesSpec fringes;
  std::vector<PotentialSegment> segments;
  std::optional<SweepSpec> sweep;
  std::size_t timeline_samples = 200;
  bool log_spacing = false;
  unsigned workers = 1;
};

/// ParseError on malformed input, unknown keys or missing required fields.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Sets a numeric value at a dotted path; ParseError if the key does not exist.
void set_config_number(nlohmann::json& doc, std::string_view dotted_key, double value);

}  // namespace cisim
