#include "mhdcascade/cutoffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <string>

#include "mhdcascade/errors.hpp"
#include "mhdcascade/jet.hpp"

namespace mhdc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Clamped: near t = 1 the polynomial rounds slightly above 1.
double S(double t) { return std::min(1.0, t * t * t * (10.0 + t * (-15.0 + 6.0 * t))); }
double S1(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }
double S2(double t) { return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t); }

// log f, f'/f and f''/f of the base transition at t in (0, 1).
struct BaseLogs {
  double lf, r1, r2;
};

BaseLogs base_logs(ProfileShape shape, double t) {
  if (shape == ProfileShape::quintic) {
    const double s = S(t);
    return {std::log(s), S1(t) / s, S2(t) / s};
  }
  const double g = 1.0 / t - 1.0 / (1.0 - t);
  const double q = 1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t));
  const double q1 = -2.0 / (t * t * t) + 2.0 / ((1.0 - t) * (1.0 - t) * (1.0 - t));
  const double lf = -(std::max(g, 0.0) + std::log1p(std::exp(-std::abs(g))));
  const double f = std::exp(lf);
  const double omf = 1.0 / (1.0 + std::exp(-g));  // 1 - f
  const double r1 = omf * q;
  return {lf, r1, r1 * (1.0 - 2.0 * f) * q + omf * q1};
}

// f, f', f'' of the base transition.
void base_values(ProfileShape shape, double t, double& f, double& f1, double& f2) {
  if (shape == ProfileShape::quintic) {
    f = S(t);
    f1 = S1(t);
    f2 = S2(t);
    return;
  }
  const BaseLogs b = base_logs(shape, t);
  f = std::exp(b.lf);
  f1 = f * b.r1;
  f2 = f * b.r2;
}

}  // namespace

const char* to_string(ProfileShape s) { return s == ProfileShape::quintic ? "quintic" : "smooth"; }

double SmoothstepPower::value(double t) const {
  if (t <= 0) return 0.0;
  if (t >= 1) return 1.0;
  double f, f1, f2;
  base_values(shape, t, f, f1, f2);
  return std::pow(f, m);
}

double SmoothstepPower::d1(double t) const {
  if (t <= 0 || t >= 1) return 0.0;
  double f, f1, f2;
  base_values(shape, t, f, f1, f2);
  return m * std::pow(f, m - 1) * f1;
}

double SmoothstepPower::d2(double t) const {
  if (t <= 0 || t >= 1) return 0.0;
  double f, f1, f2;
  base_values(shape, t, f, f1, f2);
  double r = m * std::pow(f, m - 1) * f2;
  if (m >= 2) r += m * (m - 1) * std::pow(f, m - 2) * f1 * f1;
  return r;
}

double SmoothstepPower::sup_ratio(int order, double p) const {
  // Work with logarithms so tiny f^m never underflows:
  //   (f^m)'  = m f^m (f'/f)
  //   (f^m)'' = m f^m ((m-1)(f'/f)^2 + f''/f)
  auto logf = [&](double t) {
    const BaseLogs b = base_logs(shape, t);
    const double tail = order == 1 ? std::abs(b.r1) : std::abs((m - 1.0) * b.r1 * b.r1 + b.r2);
    return std::log(double(m)) + (m - m * p) * b.lf + std::log(tail);
  };
  // Blow-up as t -> 0 shows as a negative log-log slope deep in the tail.
  const double slope = (logf(1e-14) - logf(1e-12)) / (std::log(1e-14) - std::log(1e-12));
  if (slope < -1e-6) return kInf;

  std::vector<double> ts;
  for (int i = 0; i <= 3000; ++i) ts.push_back(std::pow(10.0, -14.0 + 14.0 * i / 3000.0));
  for (int i = 1; i < 3000; ++i) ts.push_back(i / 3000.0);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  ts.pop_back();  // t = 1 has S' = 0
  std::size_t best = 0;
  double vbest = -kInf;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double v = logf(ts[i]);
    if (std::isfinite(v) && v > vbest) {
      vbest = v;
      best = i;
    }
  }
  // Golden-section refinement inside the bracketing samples.
  double a = ts[best > 0 ? best - 1 : 0], b = ts[std::min(best + 1, ts.size() - 1)];
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 100; ++it) {
    const double c = b - gr * (b - a), d = a + gr * (b - a);
    const double fc = logf(c), fd = logf(d);
    if (fc > fd) b = d; else a = c;
    vbest = std::max({vbest, std::isfinite(fc) ? fc : -kInf, std::isfinite(fd) ? fd : -kInf});
  }
  // Small allowance so direct evaluation never exceeds the recorded value by rounding.
  return std::exp(vbest) * (1.0 + 1e-9);
}

int power_for_exponent(double exponent) {
  return int(std::ceil(2.0 / (1.0 - exponent) - 1e-9));
}

void CutoffParams::validate() const {
  if (!(delta > 0.75 && delta < 1)) throw PreconditionError("delta must lie in (3/4, 1)");
  if (!(rho > 0.75 && rho < 1)) throw PreconditionError("rho must lie in (3/4, 1)");
  if (!(T > 0)) throw PreconditionError("time horizon T must be positive");
  if (profile_power < 0 || time_power < 0) throw PreconditionError("powers must be >= 0");
}

RadialProfile::RadialProfile(double rho, int power, ProfileShape shape) : rho_(rho) {
  sp_.shape = shape;
  sp_.m = power > 0 ? power : (shape == ProfileShape::quintic ? power_for_exponent(rho) : 1);
  c1_ = sp_.sup_ratio(1, rho);
  c2_ = sp_.sup_ratio(2, 2 * rho - 1);
  c1b_ = sp_.sup_ratio(1, 2 * rho - 1);
}

double RadialProfile::value(double s) const { return sp_.value(2.0 - s); }
double RadialProfile::d1(double s) const { return -sp_.d1(2.0 - s); }
double RadialProfile::d2(double s) const { return sp_.d2(2.0 - s); }
bool RadialProfile::bounded() const { return std::isfinite(C0()); }
double RadialProfile::C0() const { return std::max(c1_, c2_ + c1b_); }

RadialProfile make_radial_profile(const CutoffParams& params) {
  params.validate();
  return RadialProfile(params.rho, params.profile_power, params.shape);
}

TemporalCutoff::TemporalCutoff(double T, double delta, int power) : T_(T), delta_(delta) {
  sp_.m = power > 0 ? power : power_for_exponent(delta);
  c0_ = 3.0 * sp_.sup_ratio(1, delta);
}

double TemporalCutoff::eta(double t) const { return sp_.value((t - T_ / 3.0) / (T_ / 3.0)); }
double TemporalCutoff::eta_dot(double t) const { return sp_.d1((t - T_ / 3.0) / (T_ / 3.0)) * 3.0 / T_; }

TemporalCutoff make_temporal_cutoff(double T, const CutoffParams& params) {
  if (!(T > 0)) throw PreconditionError("time horizon T must be positive");
  return TemporalCutoff(T, params.delta, params.time_power);
}

const char* to_string(CutoffKind k) {
  switch (k) {
    case CutoffKind::interior: return "interior";
    case CutoffKind::boundary: return "boundary";
    case CutoffKind::integral: return "integral";
  }
  return "?";
}

// ---------------------------------------------------------------------------

class SpatialPart {
 public:
  SpatialPart(CutoffKind kind, Vec3 center, double R, double R0, RadialProfile profile)
      : kind(kind), center(center), R(R), R0(R0), profile(std::move(profile)) {}
  virtual ~SpatialPart() = default;
  virtual double value(const Vec3& x) const = 0;
  virtual Jet jet(const Vec3& x) const = 0;
  virtual Box box() const = 0;
  virtual double c0() const = 0;

  CutoffKind kind;
  Vec3 center;
  double R, R0;
  RadialProfile profile;

 protected:
  // h(|x - c| / scale) with exact plateau and zero branches.
  double radial_value(const Vec3& x, const Vec3& c, double scale) const {
    return profile.value(norm(x - c) / scale);
  }
  Jet radial_jet(const Vec3& x, const Vec3& c, double scale) const {
    const double s = norm(x - c) / scale;
    if (s <= 1.0) return Jet::constant(1.0);
    if (s >= 2.0) return Jet::constant(0.0);
    const Jet sj = (1.0 / scale) * distance_jet(x, c);
    return compose(sj, profile.value(s), profile.d1(s), profile.d2(s));
  }
};

namespace {

Box ball_box(const Vec3& c, double r) { return {c - Vec3{r, r, r}, c + Vec3{r, r, r}}; }

class RadialPart final : public SpatialPart {
 public:
  using SpatialPart::SpatialPart;
  double scale() const { return kind == CutoffKind::integral ? R0 : R; }
  double value(const Vec3& x) const override { return radial_value(x, center, scale()); }
  Jet jet(const Vec3& x) const override { return radial_jet(x, center, scale()); }
  Box box() const override { return ball_box(center, 2 * scale()); }
  double c0() const override { return profile.C0(); }
};

// psi = psi0 * (1 - (1 - a)(1 - q)), a the ball profile at scale R, q = G(theta) w(r)
// an angular blend between the two cones times a radial ramp that switches the
// cone on across (r_a, R0).
class BoundaryPart final : public SpatialPart {
 public:
  BoundaryPart(Vec3 center, double R, double R0, RadialProfile profile)
      : SpatialPart(CutoffKind::boundary, center, R, R0, std::move(profile)) {
    d_ = norm(center);
    axis_ = center / d_;
    auto cone = [&](double rad) {
      const double c = (R0 * R0 + d_ * d_ - rad * rad) / (2 * R0 * d_);
      if (c <= -1) return std::numbers::pi;
      if (c >= 1) return 0.0;
      return std::acos(c);
    };
    th_in_ = cone(R);
    th_out_ = cone(2 * R);
    r_a_ = std::max(0.5 * R0, (d_ * d_ - 4 * R * R) / R0);
  }

  double theta_in() const { return th_in_; }
  double theta_out() const { return th_out_; }
  double r_a() const { return r_a_; }

  double angle(const Vec3& x) const {
    const double p = dot(x, axis_);
    return std::atan2(norm(x - p * axis_), p);
  }

  double value(const Vec3& x) const override {
    const double r = norm(x);
    const double p0 = profile.value(r / R0);
    if (p0 == 0.0) return 0.0;
    const double a = radial_value(x, center, R);
    double q = 0.0;
    if (r > r_a_) {
      const double w = profile.value(1.0 + (R0 - r) / (R0 - r_a_));
      if (w > 0) q = w * profile.value(1.0 + (angle(x) - th_in_) / (th_out_ - th_in_));
    }
    return p0 * (1.0 - (1.0 - a) * (1.0 - q));
  }

  Jet jet(const Vec3& x) const override {
    const Jet p0 = radial_jet(x, Vec3{}, R0);
    if (p0.v == 0.0) return Jet::constant(0.0);
    const Jet a = radial_jet(x, center, R);
    Jet q = Jet::constant(0.0);
    const double r = norm(x);
    if (r > r_a_) {
      const double W = R0 - r_a_;
      Jet w;
      const double sw = 1.0 + (R0 - r) / W;
      if (sw <= 1.0) {
        w = Jet::constant(1.0);
      } else {
        const Jet rj = distance_jet(x, Vec3{});
        const Jet sj{sw, (-1.0 / W) * rj.g, (-1.0 / W) * rj.H};
        w = compose(sj, profile.value(sw), profile.d1(sw), profile.d2(sw));
      }
      if (w.v > 0) {
        const double th = angle(x);
        Jet G;
        if (th <= th_in_) {
          G = Jet::constant(1.0);
        } else if (th >= th_out_) {
          G = Jet::constant(0.0);
        } else {
          const double D = th_out_ - th_in_;
          const Jet tj = angle_jet(x, axis_);
          const double sg = 1.0 + (th - th_in_) / D;
          const Jet sj{sg, (1.0 / D) * tj.g, (1.0 / D) * tj.H};
          G = compose(sj, profile.value(sg), profile.d1(sg), profile.d2(sg));
        }
        q = G * w;
      }
    }
    const Jet one = Jet::constant(1.0);
    const Jet A = one - (one - a) * (one - q);
    return p0 * A;
  }

  Box box() const override {
    const Box ball = ball_box(center, 2 * R);
    Box b = ball;
    // Cone segment {r w : r in [r_a, 2 R0], angle(w, axis) <= th_out}.
    for (int k = 0; k < 3; ++k) {
      const double alpha = std::acos(std::clamp(axis_[k], -1.0, 1.0));
      const double up = std::cos(std::max(0.0, alpha - th_out_));
      const double down = -std::cos(std::max(0.0, (std::numbers::pi - alpha) - th_out_));
      const double hi = up >= 0 ? 2 * R0 * up : r_a_ * up;
      const double lo = down <= 0 ? 2 * R0 * down : r_a_ * down;
      b.hi[k] = std::max(b.hi[k], hi);
      b.lo[k] = std::min(b.lo[k], lo);
      b.hi[k] = std::min(b.hi[k], 2 * R0);
      b.lo[k] = std::max(b.lo[k], -2 * R0);
    }
    return b;
  }

  double c0() const override {
    std::call_once(once_, [this] { c0_ = measure(); });
    return c0_;
  }

 private:
  double measure() const;

  double d_;
  Vec3 axis_;
  double th_in_, th_out_, r_a_;
  mutable std::once_flag once_;
  mutable double c0_ = 0;
};

struct Ratios {
  double grad = 0, hess = 0;
};

Ratios ratios_at(const SpatialPart& s, const Vec3& x, double scale) {
  const Jet j = s.jet(x);
  if (!(j.v > 0)) return {};
  const double rho = s.profile.rho();
  double hmax = 0;
  for (double v : j.H.a) hmax = std::max(hmax, std::abs(v));
  return {scale * norm(j.g) / std::pow(j.v, rho), scale * scale * hmax / std::pow(j.v, 2 * rho - 1)};
}

Vec3 uniform_in_ball(std::mt19937_64& rng, const Vec3& c, double r) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const Vec3 v{u(rng), u(rng), u(rng)};
    if (dot(v, v) <= 1.0) return c + r * v;
  }
}

Vec3 uniform_dir(std::mt19937_64& rng) {
  for (;;) {
    const Vec3 v = uniform_in_ball(rng, Vec3{}, 1.0);
    const double n = norm(v);
    if (n > 1e-3) return v / n;
  }
}

// Mixed sampling used for both measurement and verification: the box, the
// annulus of the ball profile, and (boundary kind) the cone shell.
Vec3 draw_point(std::mt19937_64& rng, const SpatialPart& s, std::size_t i) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Box b = s.box();
  const double scale = s.kind == CutoffKind::integral ? s.R0 : s.R;
  switch (i % 3) {
    case 0:
      return {b.lo.x + u(rng) * (b.hi.x - b.lo.x), b.lo.y + u(rng) * (b.hi.y - b.lo.y), b.lo.z + u(rng) * (b.hi.z - b.lo.z)};
    case 1:
      return s.center + scale * (1.0 + u(rng)) * uniform_dir(rng);
    default: {
      if (s.kind != CutoffKind::boundary) return s.center + scale * (1.9 + 0.1 * u(rng)) * uniform_dir(rng);
      const auto& bp = static_cast<const BoundaryPart&>(s);
      const Vec3 axis = s.center / norm(s.center);
      // Direction within the outer cone, radius across the shell (r_a, 2 R0).
      for (;;) {
        const Vec3 d = uniform_dir(rng);
        if (std::acos(std::clamp(dot(d, axis), -1.0, 1.0)) <= bp.theta_out()) {
          const double r = bp.r_a() + u(rng) * (2 * s.R0 - bp.r_a());
          return r * d;
        }
      }
    }
  }
}

double BoundaryPart::measure() const {
  std::mt19937_64 rng(0x5eedc0ffeeULL);
  const std::size_t n = 60000;
  std::vector<std::pair<double, Vec3>> top_g, top_h;
  double best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 x = draw_point(rng, *this, i);
    const Ratios r = ratios_at(*this, x, R);
    top_g.push_back({r.grad, x});
    top_h.push_back({r.hess, x});
    best = std::max({best, r.grad, r.hess});
  }
  // Hill-climb from the largest samples of each ratio.
  auto climb = [&](std::vector<std::pair<double, Vec3>>& top, bool grad) {
    const std::size_t k = std::min<std::size_t>(12, top.size());
    std::partial_sort(top.begin(), top.begin() + k, top.end(), [](auto& a, auto& b) { return a.first > b.first; });
    std::normal_distribution<double> nd(0.0, 1.0);
    for (std::size_t i = 0; i < k; ++i) {
      Vec3 x = top[i].second;
      double v = top[i].first;
      double step = 0.05 * R;
      for (int it = 0; it < 300 && step > 1e-7 * R; ++it) {
        const Vec3 y = x + step * Vec3{nd(rng), nd(rng), nd(rng)};
        const Ratios r = ratios_at(*this, y, R);
        const double w = grad ? r.grad : r.hess;
        if (w > v) {
          v = w;
          x = y;
        } else if (it % 20 == 19) {
          step *= 0.5;
        }
      }
      best = std::max(best, v);
    }
  };
  climb(top_g, true);
  climb(top_h, false);
  return 1.10 * best;
}

void require_profile(const CutoffParams& p) {
  p.validate();
}

}  // namespace

Cutoff::Cutoff(std::shared_ptr<const SpatialPart> space, TemporalCutoff time, CutoffParams params)
    : space_(std::move(space)), time_(std::move(time)), params_(params) {
  params_.C0 = std::max(space_->kind == CutoffKind::boundary ? space_->profile.C0() : space_->c0(), time_.C0());
}

CutoffKind Cutoff::kind() const { return space_->kind; }
Vec3 Cutoff::center() const { return space_->center; }
double Cutoff::R() const { return space_->R; }
double Cutoff::R0() const { return space_->R0; }
const RadialProfile& Cutoff::profile() const { return space_->profile; }
double Cutoff::psi(const Vec3& x) const { return space_->value(x); }

PointEval Cutoff::eval(const Vec3& x) const {
  const Jet j = space_->jet(x);
  return {j.v, j.g, j.H};
}

double Cutoff::c0_space() const { return space_->c0(); }
Box Cutoff::support_box() const { return space_->box(); }

Cutoff make_interior_cutoff(const Vec3& center, double R, double R0, const CutoffParams& params) {
  require_profile(params);
  if (!(R > 0) || !(R0 > 0)) throw PreconditionError("radii must be positive");
  if (norm(center) + 2 * R > 2 * R0 * (1 + 1e-12))
    throw PreconditionError("support B(center, 2R) is not contained in B(0, 2R0)");
  auto part = std::make_shared<RadialPart>(CutoffKind::interior, center, R, R0, make_radial_profile(params));
  return Cutoff(part, make_temporal_cutoff(params.T, params), params);
}

Cutoff make_boundary_cutoff(const Vec3& center, double R, double R0, const CutoffParams& params) {
  require_profile(params);
  if (!(R > 0) || !(R0 > 0)) throw PreconditionError("radii must be positive");
  if (norm(center) + R <= R0) throw PreconditionError("B(center, R) lies inside B(0, R0); use an interior cutoff");
  if (norm(center) <= R) throw PreconditionError("degenerate cone geometry: center within R of the origin");
  if (norm(center) > R0) throw PreconditionError("boundary cutoff center must lie in B(0, R0)");
  auto part = std::make_shared<BoundaryPart>(center, R, R0, make_radial_profile(params));
  return Cutoff(part, make_temporal_cutoff(params.T, params), params);
}

Cutoff make_integral_cutoff(double R0, const CutoffParams& params) {
  require_profile(params);
  if (!(R0 > 0)) throw PreconditionError("R0 must be positive");
  auto part = std::make_shared<RadialPart>(CutoffKind::integral, Vec3{}, R0, R0, make_radial_profile(params));
  return Cutoff(part, make_temporal_cutoff(params.T, params), params);
}

Cutoff make_cover_cutoff(const Vec3& center, double R, double R0, const CutoffParams& params) {
  if (R >= R0 && norm(center) == 0.0) return make_integral_cutoff(R0, params);
  if (norm(center) + R <= R0) return make_interior_cutoff(center, R, R0, params);
  return make_boundary_cutoff(center, R, R0, params);
}

// ---------------------------------------------------------------------------

BoundReport verify_cutoff_bounds(const Cutoff& c, std::size_t samples, std::uint64_t seed,
                                 std::optional<SampleBall> region) {
  BoundReport rep;
  const CutoffKind kind = c.kind();
  const double scale = kind == CutoffKind::integral ? c.R0() : c.R();
  const double rho = c.params().rho;
  rep.c0_space = c.c0_space();
  rep.c0_time = c.c0_time();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  bool range = true, plateau = true, support = true;
  double gmax = 0, hmax = 0;
  auto account = [&](const Vec3& x, const PointEval& e) {
    if (!(e.psi >= 0.0 && e.psi <= 1.0)) range = false;
    if (e.psi > 0) {
      ++rep.samples;
      double hm = 0;
      for (double v : e.hess.a) hm = std::max(hm, std::abs(v));
      gmax = std::max(gmax, scale * norm(e.grad) / std::pow(e.psi, rho));
      hmax = std::max(hmax, scale * scale * hm / std::pow(e.psi, 2 * rho - 1));
      const Vec3 d = x - c.center();
      const double gn = norm(e.grad);
      if (gn > 0 && dot(e.grad, d) > 1e-12 * gn * norm(d)) ++rep.inward_violations;
    }
  };

  // Same geometry as the boundary construction, recomputed here.
  double th_out = 0;
  if (kind == CutoffKind::boundary) {
    const double d = norm(c.center()), R = c.R(), R0 = c.R0();
    const double co = (R0 * R0 + d * d - 4 * R * R) / (2 * R0 * d);
    th_out = co <= -1 ? std::numbers::pi : (co >= 1 ? 0.0 : std::acos(co));
  }
  auto in_plateau = [&](const Vec3& x) {
    const double r = norm(x - c.center());
    if (kind == CutoffKind::boundary) return r <= c.R() && norm(x) <= c.R0();
    return r <= scale;
  };
  auto outside_support = [&](const Vec3& x) {
    const double r = norm(x - c.center());
    if (kind != CutoffKind::boundary) return r >= 2 * scale;
    const double rx = norm(x);
    if (rx >= 2 * c.R0()) return true;
    if (rx < c.R0()) return r >= 2 * c.R();
    const Vec3 axis = c.center() / norm(c.center());
    const double th = std::acos(std::clamp(dot(x, axis) / rx, -1.0, 1.0));
    return th >= th_out;
  };

  // Points are drawn the same way the boundary constant is measured, but from
  // an independent stream.
  const Box b = c.support_box();
  const Vec3 axis = kind == CutoffKind::boundary ? c.center() / norm(c.center()) : Vec3{1, 0, 0};
  for (std::size_t i = 0; i < samples; ++i) {
    Vec3 x;
    if (region) {
      x = uniform_in_ball(rng, region->center, region->radius);
    } else {
      switch (i % 4) {
        case 0:
          x = {b.lo.x + u(rng) * (b.hi.x - b.lo.x), b.lo.y + u(rng) * (b.hi.y - b.lo.y), b.lo.z + u(rng) * (b.hi.z - b.lo.z)};
          break;
        case 1:
          x = c.center() + scale * (1.0 + u(rng)) * uniform_dir(rng);
          break;
        case 2:
          x = c.center() + scale * (2.0 - std::pow(10.0, -8.0 * u(rng))) * uniform_dir(rng);
          break;
        default:
          if (kind == CutoffKind::boundary) {
            // Shell around the integral ball, near the cone axis and its rim.
            const double r = c.R0() * (1.0 + u(rng));
            const Vec3 d = uniform_dir(rng);
            x = r * (dot(d, axis) > 0 ? d : -1.0 * d);
          } else {
            x = c.center() + scale * 2.2 * u(rng) * uniform_dir(rng);
          }
      }
    }
    const PointEval e = c.eval(x);
    account(x, e);
    if (in_plateau(x) && (e.psi != 1.0 || norm(e.grad) != 0.0)) plateau = false;
    if (outside_support(x) && e.psi != 0.0) support = false;
  }

  if (!region) {
    // Probe the outer edge of the support along a fixed ray.
    const Vec3 base = kind == CutoffKind::boundary ? Vec3{} : c.center();
    const double edge = kind == CutoffKind::boundary ? 2 * c.R0() : 2 * scale;
    for (int k = 1; k <= 8; ++k) {
      const Vec3 x = base + (edge - std::pow(10.0, -k) * scale) * axis;
      const PointEval e = c.eval(x);
      account(x, e);
      double r = 0;
      if (e.psi > 0) r = scale * norm(e.grad) / std::pow(e.psi, rho);
      rep.edge_ratios.push_back(r);
    }
  }

  // Temporal ratio on (T/3, 2T/3), dense near the lower edge.
  const double T = c.params().T;
  const double delta = c.params().delta;
  double tmax = 0;
  const std::size_t nt = std::max<std::size_t>(1000, samples / 10);
  for (std::size_t i = 0; i < nt; ++i) {
    const double f = (i % 2) ? u(rng) : std::pow(10.0, -8.0 * u(rng));
    const double t = T / 3.0 + f * T / 3.0;
    const double e = c.eta(t);
    if (e > 0) tmax = std::max(tmax, T * std::abs(c.eta_dot(t)) / std::pow(e, delta));
  }

  rep.max_grad_ratio = gmax;
  rep.max_hess_ratio = hmax;
  rep.max_time_ratio = tmax;
  rep.grad_ok = std::isfinite(rep.c0_space) && gmax <= rep.c0_space;
  rep.hess_ok = std::isfinite(rep.c0_space) && hmax <= rep.c0_space;
  rep.time_ok = std::isfinite(rep.c0_time) && tmax <= rep.c0_time;
  rep.range_ok = range;
  rep.plateau_ok = plateau;
  rep.support_ok = support;
  return rep;
}

}  // namespace mhdc
