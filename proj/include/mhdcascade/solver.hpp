#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mhdcascade/grid.hpp"

namespace mhdc {

struct SolverConfig {
  double viscosity = 1.0;
  double resistivity = 1.0;
  double dt = 1e-3;
  double t_end = 1e-2;
  int snapshot_stride = 1;
  double dealias_fraction = 2.0 / 3.0;
  double cfl = 0.5;

  void validate() const;  // throws ConfigError
};

struct MhdState {
  VectorField u, b;
  double time = 0.0;
};

// Snapshot fields are shared and never mutated, so subsampling a series is cheap.
struct Snapshot {
  double time = 0.0;
  std::shared_ptr<const VectorField> u, b;
};

struct SnapshotSeries {
  std::vector<Snapshot> frames;
  double viscosity = 1.0;
  double resistivity = 1.0;
  // One entry per emitted interval: |dE + int D dt| / |int D dt|.
  std::vector<double> energy_residual;
  std::vector<double> energy;  // total energy at each frame

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
  const GridSpec& grid() const;
  double t_begin() const { return frames.front().time; }
  double t_end() const { return frames.back().time; }
  double horizon() const { return t_end() - t_begin(); }
  void push(double time, VectorField u, VectorField b);
  // Strictly increasing, uniformly spaced within 1e-12, same grid throughout.
  void validate() const;
  // Every k-th frame, always keeping the first and requiring the last.
  SnapshotSeries subsample(int every) const;
};

double total_energy(const VectorField& u, const VectorField& b);
// nu * int |curl u|^2 + eta * int |curl b|^2.
double dissipation_rate(const VectorField& u, const VectorField& b, double nu, double eta);
double admissible_dt(const MhdState& s, const SolverConfig& cfg);

// One integrating-factor RK4 step of size cfg.dt.
MhdState step(const MhdState& state, const SolverConfig& cfg);
// Integrates to cfg.t_end. The step count is ceil(t_end / dt) and the step is
// shrunk to t_end / count so the horizon is hit exactly.
SnapshotSeries run(const MhdState& init, const SolverConfig& cfg);

MhdState init_orszag_tang_3d(const GridSpec& grid, double amplitude);
// Each shell |m| = s carries energy proportional to s^slope. The box mean of
// |u|^2 and of |b|^2 is one.
MhdState init_random_solenoidal(const GridSpec& grid, double spectrum_slope, std::uint64_t seed);

}  // namespace mhdc
