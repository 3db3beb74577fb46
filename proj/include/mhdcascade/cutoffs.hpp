#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "mhdcascade/types.hpp"

namespace mhdc {

// Base transition from 0 at t = 0 to 1 at t = 1.
//   quintic: S(t) = 10t^3 - 15t^4 + 6t^5, C2 where it meets the constants.
//   smooth:  1 / (1 + exp(1/t - 1/(1-t))), C-infinity.
enum class ProfileShape { quintic, smooth };
const char* to_string(ProfileShape s);

// f(t)^m for the chosen base f.
struct SmoothstepPower {
  int m = 1;
  ProfileShape shape = ProfileShape::quintic;

  double value(double t) const;
  double d1(double t) const;
  double d2(double t) const;
  // sup over t in (0,1) of |d^order S^m| / (S^m)^p; +inf when the ratio blows
  // up as t -> 0.
  double sup_ratio(int order, double p) const;
};

// Smallest integer >= 2/(1 - exponent), robust to rounding of the quotient.
int power_for_exponent(double exponent);

struct CutoffParams {
  double delta = 0.8;
  double rho = 0.8;
  double T = 1.0;
  ProfileShape shape = ProfileShape::quintic;  // spatial profile only
  int profile_power = 0;  // 0 selects power_for_exponent(rho) (quintic) or 1 (smooth)
  int time_power = 0;     // 0 selects power_for_exponent(delta)
  double C0 = 0.0;        // filled in by the constructors

  void validate() const;  // throws PreconditionError
};

// h(s) = 1 on [0,1], 0 on [2,inf), f(2-s)^m in between.
class RadialProfile {
 public:
  RadialProfile(double rho, int power = 0, ProfileShape shape = ProfileShape::quintic);

  double value(double s) const;
  double d1(double s) const;
  double d2(double s) const;

  int power() const { return sp_.m; }
  ProfileShape shape() const { return sp_.shape; }
  double rho() const { return rho_; }
  double c1() const { return c1_; }    // sup |h'| / h^rho
  double c2() const { return c2_; }    // sup |h''| / h^(2 rho - 1)
  double c1b() const { return c1b_; }  // sup |h'| / h^(2 rho - 1)
  bool bounded() const;
  // Constant for a radial cutoff h(|x - c| / R): R |grad| / psi^rho and
  // R^2 |hess_ij| / psi^(2 rho - 1) are both bounded by it.
  double C0() const;

 private:
  SmoothstepPower sp_;
  double rho_;
  double c1_, c2_, c1b_;
};

RadialProfile make_radial_profile(const CutoffParams& params);

// eta = 0 on [0, T/3], 1 on [2T/3, T], S(tau)^m with tau = (t - T/3)/(T/3) between.
class TemporalCutoff {
 public:
  TemporalCutoff() = default;
  TemporalCutoff(double T, double delta, int power = 0);

  double eta(double t) const;
  double eta_dot(double t) const;
  double T() const { return T_; }
  double delta() const { return delta_; }
  int power() const { return sp_.m; }
  // sup T |eta'| / eta^delta.
  double C0() const { return c0_; }

 private:
  double T_ = 1.0, delta_ = 0.8;
  SmoothstepPower sp_;
  double c0_ = 0;
};

TemporalCutoff make_temporal_cutoff(double T, const CutoffParams& params);

enum class CutoffKind { interior, boundary, integral };
const char* to_string(CutoffKind k);

struct PointEval {
  double psi = 0;
  Vec3 grad;
  Mat3 hess;
  double laplacian() const { return hess.trace(); }
};

struct Box {
  Vec3 lo, hi;
};

class SpatialPart;

// phi(x, t) = eta(t) psi(x).
class Cutoff {
 public:
  Cutoff(std::shared_ptr<const SpatialPart> space, TemporalCutoff time, CutoffParams params);

  CutoffKind kind() const;
  Vec3 center() const;
  double R() const;
  double R0() const;
  const CutoffParams& params() const { return params_; }
  const RadialProfile& profile() const;

  double psi(const Vec3& x) const;
  PointEval eval(const Vec3& x) const;
  double eta(double t) const { return time_.eta(t); }
  double eta_dot(double t) const { return time_.eta_dot(t); }
  const TemporalCutoff& temporal() const { return time_; }

  // Recorded constants. Radial kinds use the profile bound; boundary kinds
  // measure theirs by sampling on first use.
  double c0_space() const;
  double c0_time() const { return time_.C0(); }

  // Axis-aligned box containing supp psi.
  Box support_box() const;

 private:
  std::shared_ptr<const SpatialPart> space_;
  TemporalCutoff time_;
  CutoffParams params_;
};

// Precondition: B(center, 2R) inside B(0, 2 R0).
Cutoff make_interior_cutoff(const Vec3& center, double R, double R0, const CutoffParams& params);
// Precondition: B(center, R) not inside B(0, R0), and |center| > R.
Cutoff make_boundary_cutoff(const Vec3& center, double R, double R0, const CutoffParams& params);
Cutoff make_integral_cutoff(double R0, const CutoffParams& params);
// Interior when B(center, R) sits inside B(0, R0), boundary otherwise; the
// ball at the origin with R = R0 is the integral cutoff.
Cutoff make_cover_cutoff(const Vec3& center, double R, double R0, const CutoffParams& params);

struct BoundReport {
  std::size_t samples = 0;  // points with psi > 0
  double c0_space = 0, c0_time = 0;
  double max_grad_ratio = 0;  // R |grad psi| / psi^rho
  double max_hess_ratio = 0;  // R^2 max_ij |d_ij psi| / psi^(2 rho - 1)
  double max_time_ratio = 0;  // T |eta'| / eta^delta
  bool grad_ok = false, hess_ok = false, time_ok = false;
  bool range_ok = false;    // 0 <= psi <= 1
  bool plateau_ok = false;  // psi = 1 and grad = 0 on the plateau
  bool support_ok = false;  // psi = 0 outside the support
  std::size_t inward_violations = 0;  // grad psi . (x - center) > 0
  // Ratio along a ray approaching the outer edge of the support, at distances
  // 1e-1 ... 1e-8 (in units of R) from it. Growth signals an unbounded ratio.
  std::vector<double> edge_ratios;
  bool ok() const { return grad_ok && hess_ok && time_ok && range_ok && plateau_ok && support_ok; }
};

struct SampleBall {
  Vec3 center;
  double radius;
};

// Sampled check of the derivative-ratio inequalities. With a region, points
// are drawn from that ball only and the edge probe is skipped.
BoundReport verify_cutoff_bounds(const Cutoff& c, std::size_t samples, std::uint64_t seed = 1,
                                 std::optional<SampleBall> region = std::nullopt);

}  // namespace mhdc
