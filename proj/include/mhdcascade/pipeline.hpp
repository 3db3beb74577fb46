#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "mhdcascade/config.hpp"
#include "mhdcascade/ensemble.hpp"
#include "mhdcascade/kinematics.hpp"

namespace mhdc {

// Runs the solver from the configured initial state.
SnapshotSeries simulate(const RunConfig& cfg);
// simulate, then write_series into dir plus run.json with the configuration.
SnapshotSeries simulate_to(const RunConfig& cfg, const std::filesystem::path& dir);

struct AnalysisReport {
  RunConfig config;
  GridSpec grid;
  std::size_t frames = 0;
  double t_end = 0;
  double max_energy_residual = 0;
  IntegralScaleQuantities integral;
  // One cover per scale (cover index 0 of the cascade ensemble), for the
  // enstrophy and energy densities.
  std::vector<CheckResult> interpolation;
  EnsembleReport cascade;
  std::optional<LocalityResult> locality;  // needs two scales
  A1Report a1;
  A3Report a3;
};

// Integral quantities, interpolation checks, the cascade ensemble, locality
// and both verifiers. The series must span [0, cfg.analysis.T].
AnalysisReport analyze(const SnapshotSeries& series, const RunConfig& cfg);

}  // namespace mhdc
