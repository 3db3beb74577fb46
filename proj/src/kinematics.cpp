#include "mhdcascade/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include "mhdcascade/errors.hpp"
#include "mhdcascade/flux.hpp"
#include "mhdcascade/stencil.hpp"

namespace mhdc {

namespace {

constexpr double kPi = std::numbers::pi;

void require_unit(const Vec3& y) {
  if (std::abs(norm(y) - 1.0) > 1e-12) throw PreconditionError("kernel direction is not a unit vector");
}

int wrap(int i, int n) { return ((i % n) + n) % n; }

// Grid index of a node position; throws when x is not a node.
std::array<int, 3> node_of(const GridSpec& g, const Vec3& x) {
  std::array<int, 3> k{};
  const double h = g.spacing(), half = 0.5 * g.box_length;
  for (int a = 0; a < 3; ++a) {
    const double s = (x[a] + half) / h;
    k[a] = int(std::lround(s));
    if (std::abs(s - k[a]) > 1e-9 || k[a] < 0 || k[a] >= g.n)
      throw PreconditionError("evaluation point is not a grid node of the box");
  }
  return k;
}

using Tensor = std::array<std::array<std::vector<double>, 3>, 3>;

double frobenius_at(const Tensor& G, std::size_t i) {
  double s = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) s += G[a][b][i] * G[a][b][i];
  return std::sqrt(s);
}

}  // namespace

Mat3 sigma_kernel(const Vec3& y) {
  require_unit(y);
  return 3.0 * outer(y, y) - Mat3::identity();
}

Mat3 m_kernel(const Vec3& y, const Vec3& f) {
  require_unit(y);
  const Vec3 v = cross(y, f);
  return 0.5 * (outer(y, v) + outer(v, y));
}

std::vector<Vec3> sphere_points(int nz) {
  if (nz < 1) throw PreconditionError("sphere_points needs nz >= 1");
  // Equal-area cells: uniform in z = cos(theta) (Archimedes) times uniform in phi.
  std::vector<Vec3> p;
  const int nphi = 2 * nz;
  for (int a = 0; a < nz; ++a) {
    const double z = -1.0 + (2.0 * a + 1.0) / nz, r = std::sqrt(1.0 - z * z);
    for (int b = 0; b < nphi; ++b) {
      const double phi = 2 * kPi * (b + 0.5 * (a % 2)) / nphi;
      p.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
  }
  return p;
}

Mat3 KernelSplit::grad_u() const {
  const Vec3 w = omega();
  const Mat3 S = strain();
  Mat3 D;
  for (int l = 0; l < 3; ++l) {
    Vec3 e;
    e[l] = 1;
    const Vec3 c = cross(w, e);
    for (int k = 0; k < 3; ++k) D(k, l) = S(k, l) - 0.5 * c[k];
  }
  return D;
}

KernelSplit gradu_split(const VectorField& omega, const Vec3& x, double R, std::optional<FreeSpaceSupport> support) {
  check_structure(omega);
  const GridSpec& g = omega.grid;
  const auto k0 = node_of(g, x);
  const double h = g.spacing(), L = g.box_length;
  if (!(R > 0)) throw PreconditionError("gradu_split needs R > 0");

  KernelSplit out;
  out.split_radius = std::cbrt(R * R);
  out.outer_radius = 0.5 * L;
  if (out.split_radius >= out.outer_radius)
    throw PreconditionError("split radius R^(2/3) = " + std::to_string(out.split_radius) +
                            " does not fit inside the box-inscribed radius");
  if (support && norm(x - support->center) + support->radius >= out.outer_radius)
    throw PreconditionError("the declared vorticity support is not inside B(x, L/2); periodic images would enter");

  const int n = g.n, m = n / 2;
  const Vec3 w0 = omega.at(g.index(k0[0], k0[1], k0[2]));
  const double r2max = out.outer_radius * out.outer_radius, s2 = out.split_radius * out.split_radius;
  Vec3 nw, fw;
  Mat3 ns, fs;
  for (int c = -m; c <= m; ++c)
    for (int b = -m; b <= m; ++b)
      for (int a = -m; a <= m; ++a) {
        const double r2 = h * h * double(a * a + b * b + c * c);
        if (r2 == 0.0 || r2 >= r2max) continue;
        const double r = std::sqrt(r2);
        const Vec3 yh{a * h / r, b * h / r, c * h / r};
        const Vec3 wy = omega.at(g.index(wrap(k0[0] + a, n), wrap(k0[1] + b, n), wrap(k0[2] + c, n)));
        const bool near = r2 < s2;
        const Vec3 f = near ? wy - w0 : wy;
        const double wt = 1.0 / (r2 * r);
        const Vec3 sf = (3.0 * dot(yh, f)) * yh - f;
        const Vec3 v = cross(yh, f);
        Mat3 M = 0.5 * (outer(yh, v) + outer(v, yh));
        M *= wt;
        if (near) {
          nw += wt * sf;
          ns += M;
        } else {
          fw += wt * sf;
          fs += M;
        }
      }
  const double pre = 3.0 / (4.0 * kPi) * h * h * h;
  out.I1 = {pre * nw, pre * ns};
  out.I2 = {pre * fw, pre * fs};

  if (!support) {
    double w2 = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Vec3 w = omega.at(i);
      w2 += dot(w, w);
    }
    const double r = out.outer_radius;
    out.tail_bound = 2.0 * 3.0 / (4.0 * kPi) * std::sqrt(4.0 * kPi / r) * std::sqrt(w2 * h * h * h) / r;
  }
  return out;
}

double strain_decomposition_check(const VectorField& u) {
  check_structure(u);
  const SpectralVector uh = forward(u);
  const Tensor G = gradient_tensor(uh);  // G[i][j] = d_j u_i
  const VectorField w = inverse(curl(uh));
  double worst = 0, scale = 0;
  for (std::size_t i = 0; i < u.grid.size(); ++i) {
    Mat3 D;
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) D(k, l) = G[l][k][i];
    const Mat3 S = 0.5 * (D + D.transpose());
    const Vec3 wi = w.at(i);
    for (int l = 0; l < 3; ++l) {
      Vec3 e;
      e[l] = 1;
      const Vec3 c = cross(wi, e);
      for (int k = 0; k < 3; ++k) {
        worst = std::max(worst, std::abs(D(k, l) - (S(k, l) - 0.5 * c[k])));
        scale = std::max(scale, std::abs(D(k, l)));
      }
    }
  }
  return scale == 0.0 ? 0.0 : worst / scale;
}

std::vector<double> gradient_norm(const VectorField& u) {
  const Tensor G = gradient_tensor(forward(u));
  std::vector<double> out(u.grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = frobenius_at(G, i);
  return out;
}

namespace {

struct A1Draw {
  std::size_t frame, node;
  std::array<int, 3> offset;
};

// Shared core: active lists per frame, then omega per frame on demand.
template <class OmegaOf>
A1Report run_a1(const GridSpec& g, const std::vector<std::vector<std::size_t>>& active, double M, double R0,
                std::size_t pair_samples, std::uint64_t seed, OmegaOf&& omega_of) {
  A1Report rep;
  rep.threshold_M = M;
  rep.frames = active.size();
  rep.max_offset = 2 * R0 + std::cbrt(R0 * R0);
  if (rep.max_offset >= 0.5 * g.box_length)
    throw PreconditionError("A1 offsets up to 2 R0 + R0^(2/3) would wrap around the periodic box");
  std::vector<std::size_t> nonempty;
  for (std::size_t f = 0; f < active.size(); ++f) {
    rep.active_points += active[f].size();
    if (!active[f].empty()) nonempty.push_back(f);
  }
  if (nonempty.empty()) {
    rep.vacuous = true;
    return rep;
  }

  const double h = g.spacing();
  const int shells = 8;
  const double rlo = h, rhi = rep.max_offset;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  std::normal_distribution<double> N(0, 1);
  std::vector<A1Draw> draws;
  for (std::size_t s = 0, tries = 0; s < pair_samples && tries < 20 * pair_samples + 100; ++tries) {
    const std::size_t f = nonempty[std::size_t(U(rng) * nonempty.size()) % nonempty.size()];
    const std::size_t node = active[f][std::size_t(U(rng) * active[f].size()) % active[f].size()];
    const int shell = int(s % shells);
    const double r = rlo * std::pow(rhi / rlo, (shell + U(rng)) / shells);
    Vec3 d{N(rng), N(rng), N(rng)};
    d = (r / h / norm(d)) * d;
    const std::array<int, 3> off{int(std::lround(d.x)), int(std::lround(d.y)), int(std::lround(d.z))};
    const double len = h * std::sqrt(double(off[0] * off[0] + off[1] * off[1] + off[2] * off[2]));
    if (len == 0.0 || len >= rep.max_offset) continue;
    draws.push_back({f, node, off});
    ++s;
  }
  std::stable_sort(draws.begin(), draws.end(), [](const A1Draw& a, const A1Draw& b) { return a.frame < b.frame; });

  std::set<std::pair<std::size_t, std::size_t>> points;
  const int n = g.n;
  for (std::size_t k = 0; k < draws.size();) {
    const std::size_t f = draws[k].frame;
    const VectorField& w = omega_of(f);
    for (; k < draws.size() && draws[k].frame == f; ++k) {
      const A1Draw& d = draws[k];
      points.insert({f, d.node});
      const int i = int(d.node % n), j = int((d.node / n) % n), l = int(d.node / (std::size_t(n) * n));
      const Vec3 wx = w.at(d.node);
      const Vec3 wy = w.at(g.index(wrap(i + d.offset[0], n), wrap(j + d.offset[1], n), wrap(l + d.offset[2], n)));
      const double ny = norm(wy);
      if (ny == 0.0) continue;
      const double len = h * std::sqrt(double(d.offset[0] * d.offset[0] + d.offset[1] * d.offset[1] +
                                              d.offset[2] * d.offset[2]));
      const double ratio = norm(wy - wx) / (ny * std::sqrt(len));
      ++rep.pairs_tested;
      if (ratio > 1.0) ++rep.violations;
      rep.worst_ratio = std::max(rep.worst_ratio, ratio);
    }
  }
  rep.points_tested = points.size();
  rep.violation_fraction = rep.pairs_tested ? double(rep.violations) / double(rep.pairs_tested) : 0.0;
  return rep;
}

std::vector<std::size_t> active_nodes(const GridSpec& g, const std::vector<double>& grad_norm, double M, double R0) {
  std::vector<std::size_t> a;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (grad_norm[i] > M && norm(g.position(i)) < 2 * R0) a.push_back(i);
  return a;
}

}  // namespace

A1Report verify_a1(const std::vector<A1Frame>& frames, double M, double R0, std::size_t pair_samples,
                   std::uint64_t seed) {
  if (!(M > 0)) throw PreconditionError("A1 threshold M must be positive");
  if (frames.empty()) throw PreconditionError("A1 needs at least one frame");
  const GridSpec& g = frames.front().omega.grid;
  std::vector<std::vector<std::size_t>> active;
  for (const A1Frame& f : frames) {
    require_same_grid(g, f.omega.grid);
    if (f.grad_norm.size() != g.size()) throw StructuralError("A1 gradient norm has the wrong size");
    active.push_back(active_nodes(g, f.grad_norm, M, R0));
  }
  return run_a1(g, active, M, R0, pair_samples, seed, [&](std::size_t f) -> const VectorField& {
    return frames[f].omega;
  });
}

A1Report verify_a1(const SnapshotSeries& series, double M, double R0, std::size_t pair_samples, std::uint64_t seed) {
  if (!(M > 0)) throw PreconditionError("A1 threshold M must be positive");
  if (series.empty()) throw PreconditionError("A1 needs at least one frame");
  series.validate();
  const GridSpec& g = series.grid();
  std::vector<std::vector<std::size_t>> active;
  for (const Snapshot& s : series.frames) active.push_back(active_nodes(g, gradient_norm(*s.u), M, R0));
  VectorField cache;
  return run_a1(g, active, M, R0, pair_samples, seed, [&](std::size_t f) -> const VectorField& {
    cache = curl(*series.frames[f].u);
    return cache;
  });
}

double default_a1_threshold(const SnapshotSeries& series, double R0) {
  if (series.empty()) throw PreconditionError("empty series");
  const GridSpec& g = series.grid();
  const std::vector<double> gn = gradient_norm(*series.frames.back().u);
  std::vector<double> in;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (norm(g.position(i)) < R0) in.push_back(gn[i]);
  if (in.empty()) throw PreconditionError("no grid nodes inside B(0, R0)");
  const std::size_t k = std::min(in.size() - 1, std::size_t(0.9 * double(in.size())));
  std::nth_element(in.begin(), in.begin() + k, in.end());
  return in[k];
}

A3Report verify_a3(const SnapshotSeries& series, const AnalysisParams& params) {
  params.validate();
  require_budget_series(series, params.T, 2);
  const GridSpec& g = series.grid();
  A3Report rep;
  rep.localization_radius = 2 * params.R0 + std::cbrt(params.R0 * params.R0);
  if (rep.localization_radius >= 0.5 * g.box_length)
    throw PreconditionError("the localization ball B(0, 2 R0 + R0^(2/3)) does not fit in the box");
  rep.localization_bound = 1.0 / params.C0_localization;

  const CutoffStencil s0 = make_stencil(make_integral_cutoff(params.R0, params.cutoff_params()), g);
  std::vector<std::size_t> ball;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (norm(g.position(i)) < rep.localization_radius) ball.push_back(i);

  const std::vector<double> w = trapezoid_weights(series);
  const double dv = std::pow(g.spacing(), 3);
  double loc = 0, sup_w = 0, sup_j = 0, end_w = 0, end_j = 0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const VectorField om = curl(*series.frames[k].u), cj = curl(*series.frames[k].b);
    double b2 = 0;
    for (std::size_t i : ball) {
      const Vec3 v = om.at(i);
      b2 += dot(v, v);
    }
    loc += w[k] * b2 * dv;
    double ew = 0, ej = 0;
    for (std::size_t n = 0; n < s0.size(); ++n) {
      const Vec3 a = om.at(s0.index[n]), b = cj.at(s0.index[n]);
      ew += dot(a, a) * s0.psi[n];
      ej += dot(b, b) * s0.psi[n];
    }
    sup_w = std::max(sup_w, ew);
    sup_j = std::max(sup_j, ej);
    if (k + 1 == series.size()) {
      end_w = ew;
      end_j = ej;
    }
  }
  rep.localization_lhs = std::sqrt(loc);
  rep.localization_ok = rep.localization_lhs <= rep.localization_bound;
  rep.modulation_degenerate = sup_w == 0.0 || sup_j == 0.0;
  if (sup_w > 0) rep.modulation_ratio_omega = end_w / (0.5 * sup_w);
  if (sup_j > 0) rep.modulation_ratio_j = end_j / (0.5 * sup_j);
  rep.modulation_ok =
      !rep.modulation_degenerate && rep.modulation_ratio_omega >= 1.0 && rep.modulation_ratio_j >= 1.0;
  return rep;
}

}  // namespace mhdc
