#include "mhdcascade/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "mhdcascade/errors.hpp"

namespace mhdc {

void SolverConfig::validate() const {
  if (!(viscosity >= 0) || !(resistivity >= 0)) throw ConfigError("viscosity and resistivity must be >= 0");
  if (!(dt > 0)) throw ConfigError("dt must be positive");
  if (!(t_end > 0)) throw ConfigError("t_end must be positive");
  if (snapshot_stride < 1) throw ConfigError("snapshot_stride must be >= 1");
  if (!(dealias_fraction > 0 && dealias_fraction <= 1)) throw ConfigError("dealias_fraction must lie in (0, 1]");
  if (!(cfl > 0)) throw ConfigError("cfl must be positive");
}

const GridSpec& SnapshotSeries::grid() const {
  if (frames.empty()) throw PreconditionError("empty snapshot series");
  return frames.front().u->grid;
}

void SnapshotSeries::push(double time, VectorField u, VectorField b) {
  frames.push_back({time, std::make_shared<const VectorField>(std::move(u)),
                    std::make_shared<const VectorField>(std::move(b))});
}

void SnapshotSeries::validate() const {
  if (frames.empty()) throw PreconditionError("empty snapshot series");
  const GridSpec& g = grid();
  for (const auto& f : frames) {
    if (!f.u || !f.b) throw StructuralError("snapshot without fields");
    if (f.u->grid != g || f.b->grid != g) throw StructuralError("snapshots live on different grids");
    check_structure(*f.u);
    check_structure(*f.b);
  }
  if (frames.size() < 2) return;
  const double span = horizon();
  const double d = span / double(frames.size() - 1);
  for (std::size_t i = 1; i < frames.size(); ++i) {
    const double gap = frames[i].time - frames[i - 1].time;
    if (!(gap > 0)) throw PreconditionError("snapshot times are not strictly increasing");
    if (std::abs(gap - d) > 1e-12 * std::max(1.0, span)) throw PreconditionError("snapshot times are not uniformly spaced");
  }
}

SnapshotSeries SnapshotSeries::subsample(int every) const {
  if (every < 1 || frames.empty() || (frames.size() - 1) % every != 0)
    throw PreconditionError("subsample stride must divide the number of intervals");
  SnapshotSeries out;
  out.viscosity = viscosity;
  out.resistivity = resistivity;
  for (std::size_t i = 0; i < frames.size(); i += every) {
    out.frames.push_back(frames[i]);
    if (i < energy.size()) out.energy.push_back(energy[i]);
  }
  return out;
}

namespace {

struct SpectralState {
  SpectralVector u, b;
};

double energy_of(const SpectralState& s) { return 0.5 * (parseval(s.u) + parseval(s.b)); }

double dissipation_of(const SpectralState& s, double nu, double eta) {
  return nu * parseval(curl(s.u)) + eta * parseval(curl(s.b));
}

class Rhs {
 public:
  explicit Rhs(double fraction) : fraction_(fraction) {}

  // Nonlinear terms only: P[u x w + j x b] and curl(u x b).
  SpectralState operator()(const SpectralState& s) const {
    const GridSpec& g = s.u.grid;
    const VectorField u = inverse(s.u);
    const VectorField b = inverse(s.b);
    const VectorField w = inverse(curl(s.u));
    const VectorField j = inverse(curl(s.b));
    VectorField lorentz(g), emf(g);
    for (std::size_t p = 0; p < g.size(); ++p) {
      const Vec3 up = u.at(p), bp = b.at(p);
      lorentz.set(p, cross(up, w.at(p)) + cross(j.at(p), bp));
      emf.set(p, cross(up, bp));
    }
    SpectralVector nl = forward(lorentz);
    SpectralVector ne = forward(emf);
    dealias(nl, fraction_);
    dealias(ne, fraction_);
    enforce_hermitian(nl);
    enforce_hermitian(ne);
    return {leray_project(nl), curl(ne)};
  }

 private:
  double fraction_;
};

void axpy(std::vector<cplx>& y, cplx a, const std::vector<cplx>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

class Integrator {
 public:
  Integrator(const GridSpec& g, const SolverConfig& cfg, double dt) : g_(g), cfg_(cfg), dt_(dt), rhs_(cfg.dealias_fraction) {
    const Wavenumbers& w = wavenumbers(g);
    const std::size_t m = g.spectral_size();
    eu_.resize(m);
    eu_half_.resize(m);
    eb_.resize(m);
    eb_half_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double k2 = w.k2(i);
      eu_[i] = std::exp(-cfg.viscosity * k2 * dt);
      eu_half_[i] = std::exp(-0.5 * cfg.viscosity * k2 * dt);
      eb_[i] = std::exp(-cfg.resistivity * k2 * dt);
      eb_half_[i] = std::exp(-0.5 * cfg.resistivity * k2 * dt);
    }
  }

  SpectralState advance(const SpectralState& s) const {
    const double h = dt_;
    const SpectralState n1 = rhs_(s);
    // a = E/2 (s + h/2 N1)
    SpectralState a = combine(s, n1, 0.5 * h, true);
    const SpectralState n2 = rhs_(a);
    // b = E/2 s + h/2 N2
    SpectralState b = scaled(s, true);
    add(b, n2, 0.5 * h);
    const SpectralState n3 = rhs_(b);
    // c = E s + h E/2 N3
    SpectralState c = scaled(s, false);
    SpectralState t3 = scaled(n3, true);
    add(c, t3, h);
    const SpectralState n4 = rhs_(c);
    // s' = E s + h/6 (E N1 + 2 E/2 (N2 + N3) + N4)
    SpectralState out = scaled(s, false);
    SpectralState e1 = scaled(n1, false);
    SpectralState mid = n2;
    add(mid, n3, 1.0);
    mid = scaled(mid, true);
    add(out, e1, h / 6.0);
    add(out, mid, h / 3.0);
    add(out, n4, h / 6.0);
    return out;
  }

 private:
  SpectralState scaled(const SpectralState& s, bool half) const {
    SpectralState out = s;
    const auto& fu = half ? eu_half_ : eu_;
    const auto& fb = half ? eb_half_ : eb_;
    for (int a = 0; a < 3; ++a)
      for (std::size_t i = 0; i < fu.size(); ++i) {
        out.u.c[a][i] *= fu[i];
        out.b.c[a][i] *= fb[i];
      }
    return out;
  }

  SpectralState combine(const SpectralState& s, const SpectralState& n, double h, bool half) const {
    SpectralState t = s;
    add(t, n, h);
    return scaled(t, half);
  }

  static void add(SpectralState& y, const SpectralState& x, double a) {
    for (int c = 0; c < 3; ++c) {
      axpy(y.u.c[c], a, x.u.c[c]);
      axpy(y.b.c[c], a, x.b.c[c]);
    }
  }

  GridSpec g_;
  SolverConfig cfg_;
  double dt_;
  Rhs rhs_;
  std::vector<double> eu_, eu_half_, eb_, eb_half_;
};

SpectralState to_spectral(const MhdState& s, double fraction) {
  SpectralState out{forward(s.u), forward(s.b)};
  dealias(out.u, fraction);
  dealias(out.b, fraction);
  enforce_hermitian(out.u);
  enforce_hermitian(out.b);
  return out;
}

double max_speed(const SpectralState& s) {
  return std::max(max_norm(inverse(s.u)), max_norm(inverse(s.b)));
}

double admissible(const GridSpec& g, double speed, double cfl) {
  return speed > 0 ? cfl * g.spacing() / speed : INFINITY;
}

bool finite(const SpectralState& s, double& energy) {
  energy = energy_of(s);
  return std::isfinite(energy);
}

}  // namespace

double total_energy(const VectorField& u, const VectorField& b) {
  return 0.5 * (integrate(norm2(u)) + integrate(norm2(b)));
}

double dissipation_rate(const VectorField& u, const VectorField& b, double nu, double eta) {
  return nu * integrate(norm2(curl(u))) + eta * integrate(norm2(curl(b)));
}

double admissible_dt(const MhdState& s, const SolverConfig& cfg) {
  return admissible(s.u.grid, std::max(max_norm(s.u), max_norm(s.b)), cfg.cfl);
}

MhdState step(const MhdState& state, const SolverConfig& cfg) {
  cfg.validate();
  require_same_grid(state.u.grid, state.b.grid);
  const GridSpec& g = state.u.grid;
  const SpectralState s = to_spectral(state, cfg.dealias_fraction);
  const double adm = admissible(g, max_speed(s), cfg.cfl);
  if (cfg.dt > adm) throw CflViolation(cfg.dt, adm);
  const Integrator integ(g, cfg, cfg.dt);
  const SpectralState next = integ.advance(s);
  double e;
  if (!finite(next, e)) throw DivergedError(1);
  return {inverse(next.u), inverse(next.b), state.time + cfg.dt};
}

SnapshotSeries run(const MhdState& init, const SolverConfig& cfg) {
  cfg.validate();
  require_same_grid(init.u.grid, init.b.grid);
  const GridSpec& g = init.u.grid;
  const long nsteps = std::max(1L, long(std::ceil(cfg.t_end / cfg.dt - 1e-9)));
  const double dt = cfg.t_end / double(nsteps);
  const Integrator integ(g, cfg, dt);

  SnapshotSeries out;
  out.viscosity = cfg.viscosity;
  out.resistivity = cfg.resistivity;

  SpectralState s = to_spectral(init, cfg.dealias_fraction);
  double e_prev = energy_of(s);
  double d_prev = dissipation_of(s, cfg.viscosity, cfg.resistivity);
  double e_emit = e_prev;
  double dissipated = 0.0;
  out.push(init.time, inverse(s.u), inverse(s.b));
  out.energy.push_back(e_prev);

  for (long k = 1; k <= nsteps; ++k) {
    const double speed = max_speed(s);
    const double adm = admissible(g, speed, cfg.cfl);
    if (!std::isfinite(speed)) throw DivergedError(k);
    if (dt > adm) throw CflViolation(dt, adm);
    s = integ.advance(s);
    double e;
    if (!finite(s, e)) throw DivergedError(k);
    const double d = dissipation_of(s, cfg.viscosity, cfg.resistivity);
    dissipated += 0.5 * dt * (d + d_prev);
    d_prev = d;
    e_prev = e;
    if (k % cfg.snapshot_stride == 0) {
      const double change = e - e_emit;
      const double denom = std::abs(dissipated) > 0 ? std::abs(dissipated) : std::abs(e_emit);
      out.energy_residual.push_back(denom > 0 ? std::abs(change + dissipated) / denom : 0.0);
      out.push(init.time + k * dt, inverse(s.u), inverse(s.b));
      out.energy.push_back(e);
      e_emit = e;
      dissipated = 0.0;
    }
  }
  return out;
}

MhdState init_orszag_tang_3d(const GridSpec& grid, double amplitude) {
  MhdState s{VectorField(grid), VectorField(grid), 0.0};
  const double k0 = grid.k0();
  for (int k = 0; k < grid.n; ++k)
    for (int j = 0; j < grid.n; ++j)
      for (int i = 0; i < grid.n; ++i) {
        const std::size_t p = grid.index(i, j, k);
        const double x = k0 * grid.coord(i), y = k0 * grid.coord(j), z = k0 * grid.coord(k);
        s.u.set(p, amplitude * Vec3{-2.0 * std::sin(y), 2.0 * std::sin(x), 0.0});
        s.b.set(p, amplitude * Vec3{-2.0 * std::sin(2.0 * y) + std::sin(z), 2.0 * std::sin(x) + std::sin(z),
                                    std::sin(x) + std::sin(y)});
      }
  return s;
}

namespace {

SpectralVector shaped_field(const GridSpec& g, double slope, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  VectorField raw(g);
  for (auto& c : raw.c)
    for (double& x : c) x = nd(rng);
  SpectralVector f = leray_project(forward(raw));
  const Wavenumbers& w = wavenumbers(g);
  const double radius = (2.0 / 3.0) * (g.n / 2);
  std::map<int, double> shell;
  std::vector<int> shell_of(g.spectral_size(), -1);
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    int ix, iy, iz;
    w.unpack(i, ix, iy, iz);
    const double m = std::sqrt(double(w.mx[ix]) * w.mx[ix] + double(w.my[iy]) * w.my[iy] + double(w.mz[iz]) * w.mz[iz]);
    if (m == 0.0 || m >= radius - 1e-9) {
      for (int a = 0; a < 3; ++a) f.c[a][i] = 0.0;
      continue;
    }
    const int s = int(std::lround(m));
    shell_of[i] = s;
    const double wgt = (ix == 0 || ix == g.n / 2) ? 1.0 : 2.0;
    shell[s] += wgt * (std::norm(f.c[0][i]) + std::norm(f.c[1][i]) + std::norm(f.c[2][i]));
  }
  double total = 0.0;
  for (const auto& [s, e] : shell)
    if (e > 0) total += std::pow(double(s), slope);
  for (std::size_t i = 0; i < g.spectral_size(); ++i) {
    const int s = shell_of[i];
    if (s < 0 || shell[s] <= 0) continue;
    // Mean of |f|^2 over the box equals the sum of weighted |f_k|^2; target one in total.
    const double scale = std::sqrt(std::pow(double(s), slope) / total / shell[s]);
    for (int a = 0; a < 3; ++a) f.c[a][i] *= scale;
  }
  enforce_hermitian(f);
  return f;
}

}  // namespace

MhdState init_random_solenoidal(const GridSpec& grid, double spectrum_slope, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const SpectralVector u = shaped_field(grid, spectrum_slope, rng);
  const SpectralVector b = shaped_field(grid, spectrum_slope, rng);
  return {inverse(u), inverse(b), 0.0};
}

}  // namespace mhdc
