#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mhdcascade/errors.hpp"
#include "mhdcascade/kinematics.hpp"

using namespace mhdc;

namespace {

const double kL = 2 * std::numbers::pi;
const double kR0 = kL / 8;

double max_entry(const Mat3& m) {
  double r = 0;
  for (double v : m.a) r = std::max(r, std::abs(v));
  return r;
}

Mat3 sphere_mean(int nz, const std::function<Mat3(const Vec3&)>& f) {
  const std::vector<Vec3> p = sphere_points(nz);
  Mat3 s;
  for (const Vec3& y : p) s += f(y);
  return (1.0 / double(p.size())) * s;
}

// omega = curl A, A_i = g(|x - c_i|) e_i with g(r) = (1 - r^2/a^2)^4: divergence
// free and supported in the union of the balls B(c_i, a).
const double kA = 1.5;
const Vec3 kCenters[3] = {{0.3, 0, 0}, {0, -0.25, 0.1}, {-0.1, 0.2, -0.3}};

Vec3 test_vorticity(const Vec3& x) {
  Vec3 w;
  for (int i = 0; i < 3; ++i) {
    const Vec3 d = x - kCenters[i];
    const double r = norm(d);
    if (r == 0 || r >= kA) continue;
    const double gd = -8 * r / (kA * kA) * std::pow(1 - r * r / (kA * kA), 3);
    Vec3 e;
    e[i] = 1;
    w += cross((gd / r) * d, e);
  }
  return w;
}

VectorField sample(const GridSpec& g, Vec3 (*f)(const Vec3&)) {
  VectorField w(g);
  for (std::size_t i = 0; i < g.size(); ++i) w.set(i, f(g.position(i)));
  return w;
}

// Free-space grad u by a periodic solve on a box twice as large.
Mat3 padded_oracle(int n, const Vec3& x) {
  const GridSpec gp = GridSpec::make(2 * n, 2 * kL);
  SpectralVector wh = forward(sample(gp, test_vorticity));
  const Wavenumbers& K = wavenumbers(gp);
  for (auto& comp : wh.c)
    for (std::size_t s = 0; s < gp.spectral_size(); ++s) {
      const double k2 = K.k2(s);
      comp[s] = k2 > 0 ? comp[s] / k2 : cplx(0, 0);
    }
  const auto G = gradient_tensor(curl(wh));  // G[i][j] = d_j u_i
  const double h = gp.spacing();
  const int i = int(std::lround((x.x + kL) / h)), j = int(std::lround((x.y + kL) / h)),
            k = int(std::lround((x.z + kL) / h));
  Mat3 D;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) D(a, b) = G[b][a][gp.index(i, j, k)];
  return D;
}

// Relative l2 error of the reconstruction over a fixed set of physical nodes.
double reconstruction_error(int n) {
  const GridSpec g = GridSpec::make(n, kL);
  const VectorField w = sample(g, test_vorticity);
  const double h32 = kL / 32;
  double num = 0, den = 0;
  for (int t = 0; t < 12; ++t) {
    const Vec3 x{h32 * ((t * 7) % 5 - 2), h32 * ((t * 5) % 5 - 2), h32 * ((t * 3) % 5 - 2)};
    const KernelSplit ks = gradu_split(w, x, 0.3, FreeSpaceSupport{{0, 0, 0}, kA + 0.45});
    const Mat3 d = ks.grad_u() - padded_oracle(n, x);
    num += d.frobenius() * d.frobenius();
    den += std::pow(padded_oracle(n, x).frobenius(), 2);
  }
  return std::sqrt(num / den);
}

SnapshotSeries constant_series(const VectorField& u, const VectorField& b, double T, int intervals) {
  SnapshotSeries s;
  for (int k = 0; k <= intervals; ++k) s.push(T * k / intervals, u, b);
  return s;
}

}  // namespace

TEST_CASE("sigma kernel") {
  const Mat3 s = sigma_kernel({1, 0, 0});
  CHECK(s(0, 0) == 2.0);
  CHECK(s(1, 1) == -1.0);
  CHECK(s(2, 2) == -1.0);
  CHECK(s(0, 1) == 0.0);
  CHECK(s(1, 2) == 0.0);
  const Vec3 y = (1.0 / std::sqrt(14.0)) * Vec3{1, -2, 3};
  const Mat3 sy = sigma_kernel(y);
  CHECK(std::abs(sy.trace()) < 1e-15);
  CHECK(max_entry(sy - sy.transpose()) == 0.0);
  CHECK_THROWS_AS(sigma_kernel({1, 1, 0}), PreconditionError);

  const double e32 = max_entry(sphere_mean(32, [](const Vec3& v) { return sigma_kernel(v); }));
  const double e64 = max_entry(sphere_mean(64, [](const Vec3& v) { return sigma_kernel(v); }));
  CHECK(e32 <= 1e-3);
  CHECK(e64 <= 0.5 * e32);
}

TEST_CASE("M kernel") {
  const Vec3 y = (1.0 / std::sqrt(3.0)) * Vec3{1, 1, 1};
  CHECK(max_entry(m_kernel(y, 2.5 * y)) < 1e-15);
  const Mat3 m = m_kernel({1, 0, 0}, {0, 1, 0});
  Mat3 expect;
  expect(0, 2) = expect(2, 0) = 0.5;
  CHECK(max_entry(m - expect) == 0.0);
  const Vec3 f{0.3, -0.7, 0.5}, g{-1.1, 0.2, 0.4};
  const Vec3 yy = (1.0 / std::sqrt(14.0)) * Vec3{1, -2, 3};
  const Mat3 mf = m_kernel(yy, f);
  CHECK(max_entry(mf - mf.transpose()) == 0.0);
  CHECK(max_entry(m_kernel(yy, f + 2.0 * g) - (mf + 2.0 * m_kernel(yy, g))) < 1e-15);
  CHECK_THROWS_AS(m_kernel({0, 0, 2}, f), PreconditionError);

  const double e32 = max_entry(sphere_mean(32, [&](const Vec3& v) { return m_kernel(v, f); }));
  const double e64 = max_entry(sphere_mean(64, [&](const Vec3& v) { return m_kernel(v, f); }));
  CHECK(e32 <= 1e-3);
  CHECK(e64 <= 0.5 * e32);
}

TEST_CASE("near and far split") {
  const GridSpec g = GridSpec::make(32, kL);
  const Vec3 x = g.position(16, 16, 16);

  SUBCASE("zero vorticity") {
    const KernelSplit s = gradu_split(VectorField(g), x, 0.3);
    CHECK(norm(s.omega()) == 0.0);
    CHECK(s.strain().frobenius() == 0.0);
    CHECK(s.tail_bound == 0.0);
    CHECK(s.split_radius == doctest::Approx(std::pow(0.3, 2.0 / 3)));
  }

  SUBCASE("constant vorticity") {
    VectorField w(g);
    for (std::size_t i = 0; i < g.size(); ++i) w.set(i, {0.5, -1, 2});
    const KernelSplit s = gradu_split(w, g.position(3, 20, 9), 0.3);
    CHECK(norm(s.I1.omega) == 0.0);
    CHECK(s.I1.strain.frobenius() == 0.0);
    CHECK(std::isfinite(norm(s.I2.omega)));
    CHECK(std::isfinite(s.I2.strain.frobenius()));
    CHECK(s.tail_bound > 0);
  }

  SUBCASE("preconditions") {
    const VectorField w = sample(g, test_vorticity);
    CHECK_THROWS_AS(gradu_split(w, x + Vec3{0.01, 0, 0}, 0.3), PreconditionError);
    CHECK_THROWS_AS(gradu_split(w, x, 6.0), PreconditionError);
    CHECK_THROWS_AS(gradu_split(w, x, 0.0), PreconditionError);
    CHECK_THROWS_AS(gradu_split(w, g.position(28, 16, 16), 0.3, FreeSpaceSupport{{0, 0, 0}, kA + 0.45}),
                    PreconditionError);
  }
}

TEST_CASE("Biot-Savart reconstruction against the padded free-space solve") {
  const double e32 = reconstruction_error(32);
  const double e64 = reconstruction_error(64);
  const double order = std::log2(e32 / e64);
  MESSAGE("relative error 32^3 " << e32 << ", 64^3 " << e64 << ", observed order " << order);
  CHECK(e64 <= 0.02);
  CHECK(order >= 1.0);
}

TEST_CASE("strain decomposition") {
  const GridSpec g = GridSpec::make(32, kL);
  CHECK(strain_decomposition_check(VectorField(g)) == 0.0);
  const MhdState s = init_random_solenoidal(g, -5.0 / 3, 17);
  CHECK(strain_decomposition_check(s.u) <= 1e-10);
  CHECK(strain_decomposition_check(leray_project(random_smooth_field(g, 3))) <= 1e-10);
}

TEST_CASE("A1 verifier") {
  const GridSpec g = GridSpec::make(32, kL);
  auto frame = [&](Vec3 (*f)(const Vec3&), double grad) {
    A1Frame a;
    a.omega = sample(g, f);
    a.grad_norm.assign(g.size(), grad);
    return a;
  };

  SUBCASE("constant vorticity") {
    const A1Report r = verify_a1({frame([](const Vec3&) { return Vec3{0, 0, 1.5}; }, 2.0)}, 1.0, kR0, 2000, 1);
    CHECK_FALSE(r.vacuous);
    CHECK(r.pairs_tested > 1500);
    CHECK(r.violations == 0);
    CHECK(r.worst_ratio == 0.0);
  }

  SUBCASE("threshold above the gradient") {
    const A1Report r = verify_a1({frame([](const Vec3&) { return Vec3{0, 0, 1.5}; }, 2.0)}, 3.0, kR0, 2000, 1);
    CHECK(r.vacuous);
    CHECK(r.active_points == 0);
    CHECK(r.pairs_tested == 0);
  }

  SUBCASE("Hoelder-1/2 field") {
    // Fixed direction, magnitude in [1.9, 2.1] with |dm| <= 0.1 |y|.
    const A1Report r = verify_a1(
        {frame([](const Vec3& x) { return Vec3{0, 0, 2 + 0.1 * std::sin(x.x)}; }, 2.0)}, 1.0, kR0, 4000, 2);
    CHECK(r.pairs_tested > 3000);
    CHECK(r.violation_fraction == 0.0);
    CHECK(r.worst_ratio < 1.0);
  }

  SUBCASE("sign flip across a plane") {
    const A1Report r =
        verify_a1({frame([](const Vec3& x) { return Vec3{0, 0, x.x < 0.05 ? -1.0 : 1.0}; }, 2.0)}, 1.0, kR0, 4000, 3);
    // Every pair crossing the plane has ratio 2 / |y|^(1/2) > 1.
    CHECK(r.violations > 0);
    CHECK(r.worst_ratio > 1.0);
    CHECK(r.violation_fraction > 0.1);
    CHECK(r.violation_fraction < 0.9);
  }

  SUBCASE("solver run") {
    SolverConfig cfg;
    cfg.viscosity = cfg.resistivity = 0.05;
    cfg.dt = 0.01;
    cfg.t_end = 0.1;
    const SnapshotSeries s = run(init_orszag_tang_3d(g, 1.0), cfg);
    const double M = default_a1_threshold(s, kR0);
    const std::vector<double> gn = gradient_norm(*s.frames.back().u);
    std::size_t in = 0, above = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (norm(g.position(i)) < kR0) {
        ++in;
        above += gn[i] > M;
      }
    CHECK(double(above) / in == doctest::Approx(0.1).epsilon(0.1));

    const A1Report lo = verify_a1(s, 0.5 * M, kR0, 500, 4);
    const A1Report hi = verify_a1(s, M, kR0, 500, 4);
    CHECK(hi.active_points <= lo.active_points);
    CHECK(lo.frames == s.size());
    CHECK(hi.violation_fraction >= 0.0);
    CHECK(hi.violation_fraction <= 1.0);
    CHECK(hi.pairs_tested <= 500);
    const A1Report again = verify_a1(s, M, kR0, 500, 4);
    CHECK(again.violations == hi.violations);
    CHECK(again.worst_ratio == hi.worst_ratio);
  }
}

TEST_CASE("A3 verifier") {
  const GridSpec g = GridSpec::make(32, kL);
  AnalysisParams p;
  p.R0 = kR0;
  p.T = 1.0;
  p.C0_localization = 0.5;

  SUBCASE("zero series") {
    const VectorField z(g);
    const A3Report r = verify_a3(constant_series(z, z, 1.0, 10), p);
    CHECK(r.localization_lhs == 0.0);
    CHECK(r.localization_ok);
    CHECK(r.modulation_degenerate);
    CHECK_FALSE(r.modulation_ok);
  }

  // u = b = (0, 0, s(t) sin x): omega = j = (0, -s cos x, 0).
  auto scaled = [&](double (*s)(double)) {
    SnapshotSeries out;
    for (int k = 0; k <= 10; ++k) {
      const double t = k / 10.0;
      VectorField u(g);
      for (std::size_t i = 0; i < g.size(); ++i) u.set(i, {0, 0, s(t) * std::sin(g.position(i).x)});
      out.push(t, u, u);
    }
    return out;
  };

  SUBCASE("growing enstrophy") {
    const A3Report r = verify_a3(scaled([](double t) { return 1 + t; }), p);
    CHECK(r.modulation_ratio_omega == doctest::Approx(2.0));
    CHECK(r.modulation_ratio_j == doctest::Approx(2.0));
    CHECK(r.modulation_ok);
    // Localization: sum over the ball of cos^2 x, time integral of (1 + t)^2 by trapezoid.
    const double rad = 2 * kR0 + std::cbrt(kR0 * kR0);
    double ball = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (norm(g.position(i)) < rad) ball += std::pow(std::cos(g.position(i).x), 2);
    ball *= std::pow(g.spacing(), 3);
    double tw = 0;
    for (int k = 0; k <= 10; ++k) tw += (k == 0 || k == 10 ? 0.05 : 0.1) * std::pow(1 + k / 10.0, 2);
    CHECK(r.localization_lhs == doctest::Approx(std::sqrt(tw * ball)).epsilon(1e-12));
    CHECK(r.localization_bound == 2.0);
    CHECK(r.localization_ok == (r.localization_lhs <= 2.0));
  }

  SUBCASE("decaying enstrophy") {
    const A3Report r = verify_a3(scaled([](double t) { return 2 - 1.5 * t; }), p);
    // endpoint 0.5^2 over half of 2^2
    CHECK(r.modulation_ratio_omega == doctest::Approx(0.125));
    CHECK_FALSE(r.modulation_ok);
  }
}
