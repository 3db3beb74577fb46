#include "mhdcascade/selftest.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>

#include <unistd.h>

#include "mhdcascade/config.hpp"
#include "mhdcascade/covers.hpp"
#include "mhdcascade/cutoffs.hpp"
#include "mhdcascade/ensemble.hpp"
#include "mhdcascade/errors.hpp"
#include "mhdcascade/flux.hpp"
#include "mhdcascade/kinematics.hpp"
#include "mhdcascade/snapshot_io.hpp"

namespace mhdc {

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec small() { return GridSpec::make(16, 2 * kPi); }

template <class F>
VectorField vfield(const GridSpec& g, F f) {
  VectorField v(g);
  for (std::size_t i = 0; i < g.size(); ++i) v.set(i, f(g.position(i)));
  return v;
}

template <class F>
ScalarField sfield(const GridSpec& g, F f) {
  ScalarField s(g);
  for (std::size_t i = 0; i < g.size(); ++i) s[i] = f(g.position(i));
  return s;
}

double max_diff(const VectorField& a, const VectorField& b) {
  double m = 0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < a.c[c].size(); ++i) m = std::max(m, std::abs(a.c[c][i] - b.c[c][i]));
  return m;
}

double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

SnapshotSeries series_of(const VectorField& u, const VectorField& b, const std::vector<double>& scale, double T) {
  SnapshotSeries s;
  const std::size_t n = scale.size();
  for (std::size_t k = 0; k < n; ++k) s.push(T * double(k) / double(n - 1), scale[k] * u, scale[k] * b);
  return s;
}

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

bool throws_format_at(const std::filesystem::path& p, std::uint64_t offset) {
  try {
    read_snapshot(p);
  } catch (const FormatError& e) {
    return e.offset == offset;
  }
  return false;
}

}  // namespace

std::vector<SelfCheck> selftest_checks() {
  std::vector<SelfCheck> c;
  auto add = [&](std::string name, std::function<bool()> f) { c.push_back({std::move(name), std::move(f)}); };

  add("curl of (0, sin x, 0) is (0, 0, cos x)", [] {
    const GridSpec g = small();
    const VectorField f = vfield(g, [](const Vec3& x) { return Vec3{0, std::sin(x.x), 0}; });
    return max_diff(curl(f), vfield(g, [](const Vec3& x) { return Vec3{0, 0, std::cos(x.x)}; })) < 1e-12;
  });
  add("curl of a constant is zero", [] {
    const GridSpec g = small();
    return max_norm(curl(vfield(g, [](const Vec3&) { return Vec3{1, -2, 3}; }))) < 1e-12;
  });
  add("ABC flow is a curl eigenfield", [] {
    const GridSpec g = small();
    const VectorField f = vfield(g, [](const Vec3& x) {
      return Vec3{std::sin(x.z) + std::cos(x.y), std::sin(x.x) + std::cos(x.z), std::sin(x.y) + std::cos(x.x)};
    });
    return max_diff(curl(f), f) < 1e-12;
  });
  add("divergence of (sin x, 0, 0) is cos x", [] {
    const GridSpec g = small();
    const ScalarField d = divergence(vfield(g, [](const Vec3& x) { return Vec3{std::sin(x.x), 0, 0}; }));
    return max_diff(d, sfield(g, [](const Vec3& x) { return std::cos(x.x); })) < 1e-12;
  });
  add("divergence of a curl vanishes", [] {
    const GridSpec g = small();
    const VectorField f = random_smooth_field(g, 5);
    return max_abs(divergence(curl(f))) <= 1e-12 * max_norm(f);
  });
  add("Leray projection keeps solenoidal fields", [] {
    const GridSpec g = small();
    const VectorField f = curl(random_smooth_field(g, 6));
    return max_diff(leray_project(f), f) <= 1e-12 * max_norm(f);
  });
  add("Leray projection removes gradients", [] {
    const GridSpec g = small();
    const ScalarField s = random_smooth_scalar(g, 7);
    return max_norm(leray_project(gradient(s))) <= 1e-12 * max_norm(gradient(s));
  });
  add("Leray projection is orthogonal", [] {
    const GridSpec g = small();
    const VectorField f = random_smooth_field(g, 8), p = leray_project(f), q = f - p;
    const double a = inner(p, p) + inner(q, q), b = inner(f, f);
    return std::abs(a - b) <= 1e-10 * b;
  });
  add("gradient of sin x sin y", [] {
    const GridSpec g = small();
    const VectorField d = gradient(sfield(g, [](const Vec3& x) { return std::sin(x.x) * std::sin(x.y); }));
    return max_diff(d, vfield(g, [](const Vec3& x) {
             return Vec3{std::cos(x.x) * std::sin(x.y), std::sin(x.x) * std::cos(x.y), 0};
           })) < 1e-12;
  });
  add("integrals of 1, sin x and sin^2 x", [] {
    const GridSpec g = small();
    const double V = std::pow(2 * kPi, 3);
    const double i1 = integrate(ScalarField(g, 1.0));
    const double is = integrate(sfield(g, [](const Vec3& x) { return std::sin(x.x); }));
    const double i2 = integrate(sfield(g, [](const Vec3& x) { return std::sin(x.x) * std::sin(x.x); }));
    return std::abs(i1 - V) <= 1e-12 * V && std::abs(is) <= 1e-12 && std::abs(i2 - V / 2) <= 1e-10 * V;
  });

  add("zero state stays zero", [] {
    const GridSpec g = small();
    SolverConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 5e-2;
    const SnapshotSeries s = run({VectorField(g), VectorField(g), 0}, cfg);
    for (const Snapshot& f : s.frames)
      if (max_norm(*f.u) != 0 || max_norm(*f.b) != 0) return false;
    return true;
  });
  add("single mode decays viscously", [] {
    const GridSpec g = small();
    SolverConfig cfg;
    cfg.viscosity = 0.1;
    cfg.dt = 1e-2;
    const MhdState s0{vfield(g, [](const Vec3& x) { return Vec3{0, std::sin(x.x), 0}; }), VectorField(g), 0};
    const MhdState s1 = step(s0, cfg);
    const double f = std::exp(-cfg.viscosity * cfg.dt);
    return max_diff(s1.u, f * s0.u) <= 1e-8 * f;
  });
  add("initial states are solenoidal and scale linearly", [] {
    const GridSpec g = small();
    const MhdState a = init_orszag_tang_3d(g, 1.0), b = init_orszag_tang_3d(g, 2.0), z = init_orszag_tang_3d(g, 0);
    const MhdState r1 = init_random_solenoidal(g, -5.0 / 3, 4), r2 = init_random_solenoidal(g, -5.0 / 3, 4);
    return max_abs(divergence(a.u)) < 1e-10 && max_abs(divergence(a.b)) < 1e-10 &&
           max_abs(divergence(r1.u)) < 1e-10 && max_abs(divergence(r1.b)) < 1e-10 &&
           max_diff(b.u, 2.0 * a.u) == 0 && max_diff(b.b, 2.0 * a.b) == 0 && max_norm(z.u) == 0 &&
           max_norm(z.b) == 0 && max_diff(r1.u, r2.u) == 0 && max_diff(r1.b, r2.b) == 0;
  });

  add("a cover at R = R0 is the single ball at the origin", [] {
    CoverParams p;
    p.R0 = p.R = 1.0;
    const Cover cv = generate_cover(p, 1);
    return cv.size() == 1 && norm(cv.centers[0]) == 0 && verify_cover(cv, 8).ok();
  });
  add("duplicated centers exceed K2 = 1", [] {
    Cover cv;
    cv.params.K2 = 1;
    cv.centers = {{0, 0, 0}, {0, 0, 0}};
    cv.tag_boundary();
    const CoverReport r = verify_cover(cv, 8);
    return r.max_multiplicity == 2 && !r.multiplicity_ok;
  });
  add("too few centers break the count bound", [] {
    Cover cv;
    cv.params.R = 0.5;
    cv.centers = {{0, 0, 0}};
    cv.tag_boundary();
    return !verify_cover(cv, 8).count_ok;
  });
  add("multiplicity counts", [] {
    Cover cv;
    cv.params.R = 0.2;
    cv.centers = {{0, 0, 0}, {0.6, 0, 0}, {-0.6, 0, 0}};
    const bool a = multiplicity_at(cv, {0, 0.9, 0}) == 0 && multiplicity_at(cv, {0.6, 0, 0}) == 1;
    cv.centers.assign(3, Vec3{0.1, 0, 0});
    return a && multiplicity_at(cv, {0.1, 0.05, 0}) == 3;
  });

  add("radial profile plateau, support and monotonicity", [] {
    const RadialProfile h(0.8);
    if (h.value(0.5) != 1.0 || h.value(2.5) != 0.0) return false;
    for (double s = 1; s < 2; s += 1e-3)
      if (h.value(s + 1e-3) > h.value(s)) return false;
    return true;
  });
  add("interior cutoff is 1 on B(c, R) and 0 outside B(c, 2R)", [] {
    const Cutoff c = make_interior_cutoff({0.1, 0, 0}, 0.2, 1.0, {});
    const PointEval in = c.eval({0.2, 0.05, 0});
    return in.psi == 1.0 && norm(in.grad) == 0.0 && c.psi({0.6, 0, 0}) == 0.0;
  });
  add("boundary cutoff matches psi_0 on the cone axis", [] {
    const double R0 = 1.0, R = 0.25;
    const Vec3 center{0.9, 0, 0};
    const Cutoff cb = make_boundary_cutoff(center, R, R0, {}), c0 = make_integral_cutoff(R0, {});
    for (double r = R0; r < 2 * R0; r += R0 / 32)
      if (cb.psi({r, 0, 0}) != c0.psi({r, 0, 0})) return false;
    return cb.psi({-1.5, 0, 0}) == 0.0;
  });
  add("integral cutoff is 1 on B(0, R0) and supported in B(0, 2 R0)", [] {
    const Cutoff c = make_integral_cutoff(1.0, {});
    return c.psi({0.99, 0, 0}) == 1.0 && c.psi({0, 2.0, 0}) == 0.0 && c.psi({0, 0, 2.5}) == 0.0;
  });
  add("temporal cutoff values and monotonicity", [] {
    const TemporalCutoff e(1.0, 0.8);
    if (e.eta(0.25) != 0.0 || e.eta(0.75) != 1.0) return false;
    for (double t = 0; t < 1; t += 1e-3)
      if (e.eta(t + 1e-3) < e.eta(t)) return false;
    return true;
  });
  add("cutoff bounds hold on the plateau", [] {
    const Cutoff c = make_integral_cutoff(1.0, {});
    const BoundReport r = verify_cutoff_bounds(c, 2000, 1, SampleBall{{0, 0, 0}, 0.9});
    return r.max_grad_ratio == 0.0 && r.max_hess_ratio == 0.0 && r.grad_ok && r.hess_ok;
  });

  add("fluxes vanish with zero fields", [] {
    const GridSpec g = small();
    const VectorField z(g), u = random_smooth_field(g, 2);
    const Cutoff c = make_integral_cutoff(g.box_length / 8, {});
    return local_flux_kinetic(z, u, c, 1.0) == 0 && local_flux_kinetic(u, z, c, 1.0) == 0 &&
           local_flux_magnetic(u, z, c, 1.0) == 0;
  });
  add("combined flux adds the kinetic and magnetic parts", [] {
    const GridSpec g = small();
    const VectorField u = random_smooth_field(g, 2), w = random_smooth_field(g, 3), j = random_smooth_field(g, 4);
    const Cutoff c = make_integral_cutoff(g.box_length / 8, {});
    const double k = local_flux_kinetic(u, w, c, 1.0);
    return local_flux_magnetic(u, w, c, 1.0) == k && combined_flux(u, w, w, c, 1.0) == 2 * k &&
           combined_flux(u, w, j, c, 1.0) == k + local_flux_magnetic(u, j, c, 1.0);
  });
  add("zero series gives a zero budget and zero averages", [] {
    const GridSpec g = small();
    const SnapshotSeries s = series_of(VectorField(g), VectorField(g), ones(46), 1.0);
    const Cutoff c = make_integral_cutoff(g.box_length / 8, {});
    const FluxBudget b = budget_terms(s, c);
    return b.flux_kinetic == 0 && b.flux_magnetic == 0 && b.X == 0 && b.closure_residual_kinetic == 0 &&
           b.closure_residual_magnetic == 0 && time_averaged_flux(s, c) == 0;
  });
  add("hydrodynamic series zeroes every b and j term", [] {
    const GridSpec g = small();
    const MhdState st = init_random_solenoidal(g, -2.0, 3);
    const SnapshotSeries s = series_of(st.u, VectorField(g), ones(46), 1.0);
    const FluxBudget b = budget_terms(s, make_integral_cutoff(g.box_length / 8, {}));
    return b.flux_magnetic == 0 && b.X == 0 && b.L_omega == 0 && b.L_j == 0 && b.N2_omega == 0 && b.N1_j == 0 &&
           b.N2_j == 0 && b.flux_kinetic != 0;
  });

  add("ensemble averages of a zero density vanish", [] {
    const GridSpec g = small();
    const SnapshotSeries s = series_of(VectorField(g), VectorField(g), ones(4), 1.0);
    AnalysisParams p;
    p.R0 = g.box_length / 8;
    const Cover cv = generate_cover(p.cover_params(p.R0 / 2), 1);
    const CheckResult r = interpolation_check(s, cv, DensitySelector::enstrophy(), p);
    return ensemble_average(s, cv, DensitySelector::energy(), p.delta, p.cutoff_params()) == 0 && r.ok &&
           r.average == 0;
  });
  add("negative densities are rejected", [] {
    const GridSpec g = small();
    const SnapshotSeries s = series_of(VectorField(g), VectorField(g), ones(4), 1.0);
    AnalysisParams p;
    p.R0 = g.box_length / 8;
    const Cover cv = generate_cover(p.cover_params(p.R0), 1);
    try {
      interpolation_check(s, cv, DensitySelector::custom([](const Snapshot& f) {
                            return std::vector<double>(f.u->grid.size(), -1.0);
                          }),
                          p);
    } catch (const PreconditionError&) {
      return true;
    }
    return false;
  });
  add("zero series is flagged degenerate", [] {
    const GridSpec g = small();
    const SnapshotSeries s = series_of(VectorField(g), VectorField(g), ones(4), 1.0);
    AnalysisParams p;
    p.R0 = g.box_length / 8;
    const EnsembleReport r = cascade_check(s, p, 1, 1);
    for (const ScaleResult& sr : r.scales)
      if (sr.mean_flux != 0) return false;
    return r.degenerate && r.integral.P0 == 0 && r.integral.sigma0 == 0;
  });
  add("locality bounds at r = R and for flat fluxes", [] {
    const auto [lo, hi] = locality_bounds(1.0, 1.0, 16);
    EnsembleReport rep;
    for (double R : {1.0, 0.5, 0.25}) {
      ScaleResult s;
      s.R = R;
      s.per_cover = {2.0};
      s.per_cover_psi = {2.0 * R * R * R};
      s.mean_flux = 2.0;
      s.mean_psi = 2.0 * R * R * R;
      rep.scales.push_back(s);
    }
    const LocalityResult l = locality_check(rep, 16);
    bool ok = lo == 1.0 / (16 * 256) && hi == 16 * 256 && l.identity_ok;
    for (const LocalityPair& p : l.pairs) ok = ok && p.ratio == std::pow(p.r / p.R, 3) && p.within;
    return ok;
  });

  add("sigma kernel at e1 and its trace", [] {
    const Mat3 s = sigma_kernel({1, 0, 0});
    const Mat3 t = sigma_kernel((1.0 / std::sqrt(14.0)) * Vec3{1, -2, 3});
    return s(0, 0) == 2 && s(1, 1) == -1 && s(2, 2) == -1 && s(0, 1) == 0 && std::abs(t.trace()) < 1e-15;
  });
  add("M kernel for parallel f and for e1, e2", [] {
    const Vec3 y = (1.0 / std::sqrt(3.0)) * Vec3{1, 1, 1};
    const Mat3 a = m_kernel(y, 2.0 * y), b = m_kernel({1, 0, 0}, {0, 1, 0});
    return a.frobenius() < 1e-15 && b(0, 2) == 0.5 && b(2, 0) == 0.5 && std::abs(b.frobenius() - std::sqrt(0.5)) < 1e-15;
  });
  add("kernel split of zero and constant vorticity", [] {
    const GridSpec g = small();
    const KernelSplit z = gradu_split(VectorField(g), g.position(8, 8, 8), 0.3);
    const KernelSplit c = gradu_split(vfield(g, [](const Vec3&) { return Vec3{0.5, -1, 2}; }), g.position(3, 9, 5), 0.3);
    return norm(z.omega()) == 0 && z.strain().frobenius() == 0 && norm(c.I1.omega) == 0 &&
           c.I1.strain.frobenius() == 0 && std::isfinite(norm(c.I2.omega));
  });
  add("A1 with constant vorticity and with a high threshold", [] {
    const GridSpec g = small();
    A1Frame f;
    f.omega = vfield(g, [](const Vec3&) { return Vec3{0, 0, 1.5}; });
    f.grad_norm.assign(g.size(), 2.0);
    const A1Report a = verify_a1({f}, 1.0, g.box_length / 8, 200, 1);
    const A1Report b = verify_a1({f}, 3.0, g.box_length / 8, 200, 1);
    return !a.vacuous && a.violations == 0 && b.vacuous && b.active_points == 0;
  });
  add("A3 on zero, growing and decaying series", [] {
    const GridSpec g = small();
    AnalysisParams p;
    p.R0 = g.box_length / 8;
    const VectorField u = random_smooth_field(g, 9), b = random_smooth_field(g, 10);
    const A3Report z = verify_a3(series_of(VectorField(g), VectorField(g), ones(5), 1.0), p);
    const A3Report up = verify_a3(series_of(leray_project(u), leray_project(b), {1, 1.1, 1.2, 1.3, 1.5}, 1.0), p);
    const A3Report dn = verify_a3(series_of(leray_project(u), leray_project(b), {1, 0.9, 0.8, 0.7, 0.6}, 1.0), p);
    return z.localization_lhs == 0 && z.localization_ok && z.modulation_degenerate && up.modulation_ok &&
           up.modulation_ratio_omega >= 1 && !dn.modulation_ok && dn.modulation_ratio_omega < 1;
  });
  add("strain decomposition", [] {
    const GridSpec g = small();
    return strain_decomposition_check(VectorField(g)) == 0 &&
           strain_decomposition_check(init_random_solenoidal(g, -5.0 / 3, 2).u) <= 1e-10;
  });

  add("snapshot round trip, truncation and bad magic", [] {
    const GridSpec g = GridSpec::make(8, 2 * kPi);
    const MhdState s = init_random_solenoidal(g, -5.0 / 3, 11);
    const auto dir = std::filesystem::temp_directory_path() / ("mhdc_selftest_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const auto p = dir / "s.mhd";
    write_snapshot({s.u, s.b, 0.25}, p);
    const MhdState r = read_snapshot(p);
    bool ok = r.time == 0.25 && r.u.grid == g && r.u.c == s.u.c && r.b.c == s.b.c;
    const auto size = std::filesystem::file_size(p);
    std::filesystem::resize_file(p, size - 13);
    ok = ok && throws_format_at(p, size - 13);
    {
      std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
      f.seekp(0);
      f.write("NOTSNAP1", 8);
    }
    ok = ok && throws_format_at(p, 0);
    std::filesystem::remove_all(dir);
    return ok;
  });
  add("config defaults parse", [] {
    const RunConfig c = parse_config("[grid]\nn = 16\n");
    return c.n == 16 && c.analysis.R0 == c.box_length / 8 && c.analysis.T == c.solver.t_end;
  });

  return c;
}

bool run_selftest(std::ostream& out) {
  std::size_t failed = 0, total = 0;
  for (const SelfCheck& c : selftest_checks()) {
    ++total;
    bool ok = false;
    std::string note;
    try {
      ok = c.run();
    } catch (const std::exception& e) {
      note = std::string(" (") + e.what() + ")";
    }
    if (!ok) ++failed;
    out << (ok ? "PASS " : "FAIL ") << c.name << note << '\n';
  }
  out << (total - failed) << "/" << total << " checks passed\n";
  return failed == 0;
}

}  // namespace mhdc
