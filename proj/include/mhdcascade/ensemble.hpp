#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mhdcascade/covers.hpp"
#include "mhdcascade/cutoffs.hpp"
#include "mhdcascade/solver.hpp"

namespace mhdc {

struct AnalysisParams {
  int K1 = 16, K2 = 8;
  double K_star = 16;
  double beta = 0.5;
  double M = 1.0;                // gradient threshold for (A1)
  double C0_localization = 1.0;  // stands in for alpha in (A3)
  double delta = 0.8, rho = 0.8;
  ProfileShape shape = ProfileShape::quintic;
  double T = 1.0;
  double R0 = 0.7853981633974483;  // box 2 pi, R0 = L / 8
  std::vector<double> scales;
  double jitter_fraction = 0.1;
  int covers_per_scale = 8;
  int threads = 1;  // 0: hardware concurrency

  static double min_K_star(int K1, int K2);
  void validate() const;  // throws ConfigError
  CutoffParams cutoff_params() const;
  CoverParams cover_params(double R) const;
};

// What theta is averaged.
enum class DensityKind {
  combined_flux,  // 1/2 (|omega|^2 + |j|^2) u . grad phi; the weight power is ignored
  enstrophy,      // |omega|^2 + |j|^2
  energy,         // 1/2 |u|^2 + 1/2 |b|^2
  custom,
};

struct DensitySelector {
  DensityKind kind = DensityKind::enstrophy;
  // custom only: nodal values of theta for one frame.
  std::function<std::vector<double>(const Snapshot&)> field;

  static DensitySelector flux() { return {DensityKind::combined_flux, {}}; }
  static DensitySelector enstrophy() { return {DensityKind::enstrophy, {}}; }
  static DensitySelector energy() { return {DensityKind::energy, {}}; }
  static DensitySelector custom(std::function<std::vector<double>(const Snapshot&)> f) {
    return {DensityKind::custom, std::move(f)};
  }
};

std::string to_string(DensityKind k);

// (1/T) int (1/R^3) int theta phi_i^p for each element of each cover, in one
// pass over the frames. Result [cover][element]. The series must run over
// [0, T] of the cutoff horizon.
std::vector<std::vector<double>> element_averages(const SnapshotSeries& series, const std::vector<Cover>& covers,
                                                  const DensitySelector& density, double delta_power,
                                                  const CutoffParams& params, int threads = 1);

// Mean over the cover of the element averages.
double ensemble_average(const SnapshotSeries& series, const Cover& cover, const DensitySelector& density,
                        double delta_power, const CutoffParams& params);

// (1/T) int (1/R0^3) int theta phi_0^p over the integral cutoff.
double integral_average(const SnapshotSeries& series, double R0, const DensitySelector& density, double delta_power,
                        const CutoffParams& params);

struct IntegralScaleQuantities {
  double e0 = 0, E0 = 0, P0 = 0;
  double P0_endpoint = 0;  // the endpoint part of P0
  double curly_E0 = 0, eps0 = 0, sigma0 = 0;
  bool degenerate = false;  // P0 = 0; the scales are set to 0
};

IntegralScaleQuantities integral_quantities(const SnapshotSeries& series, const AnalysisParams& params);

struct CheckResult {
  std::string density;
  double R = 0;
  std::size_t n = 0;
  double theta0 = 0, average = 0;
  double lower = 0, upper = 0;  // theta0 / K1 and K2 theta0, before slack
  double slack = 0.05;
  bool ok = false;
};

// (1/K1) Theta0 (1 - slack) <= <Theta>_R <= K2 Theta0 (1 + slack), with the
// weight phi^delta on both sides. Throws PreconditionError when theta < 0 at
// any node of any frame.
CheckResult interpolation_check(const SnapshotSeries& series, const Cover& cover, const DensitySelector& density,
                                const AnalysisParams& params);

struct ScaleResult {
  double R = 0;
  std::vector<double> per_cover;      // <Phi>_R for each cover
  std::vector<double> per_cover_psi;  // <Psi>_R, raw time-averaged flux without 1/R^3
  std::vector<std::size_t> n;         // elements per cover
  double mean_flux = 0, min_flux = 0, max_flux = 0;
  double mean_psi = 0;
  double spread = 0;  // max / min over covers; infinite unless both are positive
  double lower_bound = 0, upper_bound = 0;
  bool in_band = false;
  bool admissible = false;  // sigma0 / beta <= R <= R0
};

struct EnsembleReport {
  std::vector<ScaleResult> scales;
  IntegralScaleQuantities integral;
  double K_star = 0, beta = 0, R0 = 0;
  double admissible_lo = 0, admissible_hi = 0;  // [sigma0 / beta, R0]
  bool degenerate = false;
  std::uint64_t seed = 0;
};

// Configured scales, or {R0, R0/2, R0/4} when none are set.
std::vector<double> analysis_scales(const AnalysisParams& params);
// Seed of cover c at scale index s, as used by cascade_check.
std::uint64_t cover_seed(std::uint64_t seed, std::size_t s, int c);

// Never throws on out-of-band values; band membership is reported.
EnsembleReport cascade_check(const SnapshotSeries& series, const AnalysisParams& params, int covers_per_scale,
                             std::uint64_t seed);

struct LocalityPair {
  double r = 0, R = 0;
  double ratio = 0;  // <Psi>_r / <Psi>_R
  double lower = 0, upper = 0;
  bool within = false;
};

struct LocalityResult {
  std::vector<LocalityPair> pairs;  // every r < R with <Psi>_R != 0
  double identity_error = 0;        // max relative |<Psi>_R - R^3 <Phi>_R|
  bool identity_ok = false;         // <= 1e-12
  bool degenerate = false;          // every <Psi> is zero
};

// (r/R)^3 / (16 K*^2) and 16 K*^2 (r/R)^3.
std::pair<double, double> locality_bounds(double r, double R, double K_star);

// Throws PreconditionError with fewer than two scales.
LocalityResult locality_check(const EnsembleReport& report, double K_star);

}  // namespace mhdc
