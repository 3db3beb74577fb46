#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mhdcascade/ensemble.hpp"
#include "mhdcascade/grid.hpp"
#include "mhdcascade/solver.hpp"
#include "mhdcascade/types.hpp"

namespace mhdc {

// 3 y (x) y - I. Throws PreconditionError unless |y_hat| = 1 within 1e-12.
Mat3 sigma_kernel(const Vec3& y_hat);
// 1/2 (y (x) (y x f) + (y x f) (x) y).
Mat3 m_kernel(const Vec3& y_hat, const Vec3& f);

// Equal-weight sphere rule with 2 nz^2 points: midpoint cells in cos(theta),
// uniform in phi. Quadratic moments have error O(1/nz^2).
std::vector<Vec3> sphere_points(int nz);

// One side of the near/far split. The kernel sums carry the 3/(4 pi)
// prefactor, so omega and strain approximate the vorticity and strain
// contributions of the region.
struct KernelPart {
  Vec3 omega;  // (3/4pi) int sigma(y_hat) f dy / |y|^3
  Mat3 strain; // (3/4pi) int M(y_hat, f) dy / |y|^3
};

struct KernelSplit {
  double split_radius = 0;  // R^(2/3)
  double outer_radius = 0;  // the far integral stops here
  KernelPart I1;            // |y| < split radius, f = omega(x + y) - omega(x)
  KernelPart I2;            // split radius <= |y| < outer radius, f = omega(x + y)
  // Hoelder bound on the neglected far tail, 2 (3/4pi) sqrt(4 pi / r) ||omega||_2 / r
  // with r the outer radius and the norm over one period.
  double tail_bound = 0;

  Vec3 omega() const { return I1.omega + I2.omega; }
  Mat3 strain() const { return I1.strain + I2.strain; }
  // D(k, l) = d_k u_l = S(k, l) - 1/2 (omega x e_l)_k.
  Mat3 grad_u() const;
};

struct FreeSpaceSupport {
  Vec3 center;
  double radius = 0;
};

// Direct summation over grid nodes x + y with |y| < L/2, the cell y = 0
// excluded; x must be a grid node. Values of omega are taken periodically.
// With a declared support, omega is treated as a compactly supported field in
// free space and the result is exact up to quadrature only when the support
// lies inside B(x, L/2); otherwise PreconditionError.
KernelSplit gradu_split(const VectorField& omega, const Vec3& x, double R,
                        std::optional<FreeSpaceSupport> support = std::nullopt);

// max |grad u - (S - 1/2 omega x)| / max |grad u| over the nodes, with omega
// from a separate spectral curl; 0 for u = 0.
double strain_decomposition_check(const VectorField& u);

// |grad u| as the Frobenius norm, per node.
std::vector<double> gradient_norm(const VectorField& u);

struct A1Frame {
  VectorField omega;
  std::vector<double> grad_norm;  // |grad u| per node
};

struct A1Report {
  double threshold_M = 0;
  double max_offset = 0;      // 2 R0 + R0^(2/3)
  std::size_t frames = 0;
  std::size_t active_points = 0;  // nodes in B(0, 2 R0) with |grad u| > M, summed over frames
  std::size_t points_tested = 0;  // distinct (frame, x) drawn
  std::size_t pairs_tested = 0;   // pairs with omega(x + y) != 0
  std::size_t violations = 0;
  double violation_fraction = 0;
  double worst_ratio = 0;
  bool vacuous = false;  // no active points
};

// Pairs are drawn with x uniform over the active nodes of a random frame and
// y a grid offset with |y| stratified over log-spaced shells in [h, max_offset).
A1Report verify_a1(const std::vector<A1Frame>& frames, double M, double R0, std::size_t pair_samples,
                   std::uint64_t seed);
A1Report verify_a1(const SnapshotSeries& series, double M, double R0, std::size_t pair_samples, std::uint64_t seed);

// 90th percentile of |grad u| over B(0, R0) at the last frame.
double default_a1_threshold(const SnapshotSeries& series, double R0);

struct A3Report {
  double localization_radius = 0;  // 2 R0 + R0^(2/3)
  double localization_lhs = 0;
  double localization_bound = 0;  // 1 / C0_localization
  bool localization_ok = false;
  double modulation_ratio_omega = 0, modulation_ratio_j = 0;  // endpoint / (1/2 sup)
  bool modulation_ok = false;
  bool modulation_degenerate = false;  // a sup is zero
};

A3Report verify_a3(const SnapshotSeries& series, const AnalysisParams& params);

}  // namespace mhdc
