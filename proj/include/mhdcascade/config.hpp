#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "mhdcascade/ensemble.hpp"
#include "mhdcascade/solver.hpp"

namespace mhdc {

enum class InitKind { orszag_tang, random };

struct InitConfig {
  InitKind kind = InitKind::orszag_tang;
  double amplitude = 1.0;            // orszag_tang only
  double slope = -5.0 / 3.0;         // random only
  std::uint64_t seed = 1;            // random only
};

struct RunConfig {
  int n = 32;
  double box_length = 6.283185307179586;
  InitConfig init;
  SolverConfig solver;
  // T defaults to solver.t_end and R0 to box_length / 8.
  AnalysisParams analysis;
  std::uint64_t cover_seed = 1;
  // (A1) threshold; unset selects the 90th percentile of |grad u| over B(0, R0).
  std::optional<double> a1_threshold;
  std::size_t a1_pairs = 4000;
  std::uint64_t a1_seed = 1;
  std::size_t cutoff_samples = 100000;
  std::string flux_csv = "flux_vs_scale.csv";

  GridSpec grid() const { return GridSpec::make(n, box_length); }
  MhdState initial_state() const;
  // Range checks of every owning module, plus the box constraints of the
  // analysis: supp phi_0 and the (A1) offsets must stay inside half the box.
  void validate() const;  // throws ConfigError
};

// Subset of TOML: [section] headers, key = value with numbers, "strings",
// true/false and flat [a, b, ...] arrays of numbers, # comments. Unknown
// sections or keys are errors. Throws ConfigError naming the line.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::filesystem::path& path);

}  // namespace mhdc
