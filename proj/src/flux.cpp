#include "mhdcascade/flux.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mhdcascade/errors.hpp"

namespace mhdc {

namespace {

// sum over the stencil of 1/2 |f|^2 (u . grad psi).
double advective_sum(const VectorField& u, const VectorField& f, const CutoffStencil& s) {
  double acc = 0;
  for (std::size_t n = 0; n < s.size(); ++n) {
    const std::size_t i = s.index[n];
    const Vec3 fi = f.at(i);
    acc += 0.5 * dot(fi, fi) * dot(u.at(i), s.grad[n]);
  }
  return acc * s.cell_volume();
}

double flux_with(const VectorField& u, const VectorField& f, const Cutoff& c, double t) {
  require_same_grid(u.grid, f.grid);
  check_structure(u);
  check_structure(f);
  const double eta = c.eta(t);
  if (eta == 0.0) return 0.0;
  return eta * advective_sum(u, f, make_stencil(c, u.grid));
}

using Tensor = std::array<std::array<std::vector<double>, 3>, 3>;

// sum_ij a_i b_j g[i][j] at node n, i.e. (b . grad) f . a with g = grad f.
double contract(const Vec3& a, const Vec3& b, const Tensor& g, std::size_t n) {
  double r = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r += a[i] * b[j] * g[i][j][n];
  return r;
}

double frobenius2(const Tensor& g, std::size_t n) {
  double r = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r += g[i][j][n] * g[i][j][n];
  return r;
}

Vec3 row(const Tensor& g, int l, std::size_t n) { return {g[l][0][n], g[l][1][n], g[l][2][n]}; }

// Per-snapshot integrals against one stencil; the cutoff factor psi (or its
// derivatives) is applied here, eta in the time combination.
struct SpatialIntegrals {
  double flux_omega = 0, flux_j = 0;
  double ens_omega = 0, ens_j = 0;          // int 1/2|.|^2 psi
  double ens_omega_lap = 0, ens_j_lap = 0;  // int 1/2|.|^2 lap psi
  double grad_omega2 = 0, grad_j2 = 0;
  double n1_omega = 0, l_omega = 0, n2_omega = 0, n1_j = 0, l_j = 0, n2_j = 0, x = 0;
};

SpatialIntegrals integrate_on(const SnapshotDensities& d, const CutoffStencil& s) {
  SpatialIntegrals r;
  const VectorField& u = *d.u;
  for (std::size_t n = 0; n < s.size(); ++n) {
    const std::size_t i = s.index[n];
    const double psi = s.psi[n], lap = s.lap[n];
    const double adv = dot(u.at(i), s.grad[n]);
    r.flux_omega += d.ens_omega[i] * adv;
    r.flux_j += d.ens_j[i] * adv;
    r.ens_omega += d.ens_omega[i] * psi;
    r.ens_j += d.ens_j[i] * psi;
    r.ens_omega_lap += d.ens_omega[i] * lap;
    r.ens_j_lap += d.ens_j[i] * lap;
    r.grad_omega2 += d.grad_omega2[i] * psi;
    r.grad_j2 += d.grad_j2[i] * psi;
    r.n1_omega += d.n1_omega[i] * psi;
    r.l_omega += d.l_omega[i] * psi;
    r.n2_omega += d.n2_omega[i] * psi;
    r.n1_j += d.n1_j[i] * psi;
    r.l_j += d.l_j[i] * psi;
    r.n2_j += d.n2_j[i] * psi;
    r.x += d.x[i] * psi;
  }
  const double dv = s.cell_volume();
  for (double* p : {&r.flux_omega, &r.flux_j, &r.ens_omega, &r.ens_j, &r.ens_omega_lap, &r.ens_j_lap,
                    &r.grad_omega2, &r.grad_j2, &r.n1_omega, &r.l_omega, &r.n2_omega, &r.n1_j, &r.l_j, &r.n2_j,
                    &r.x})
    *p *= dv;
  return r;
}

double residual(double lhs, std::initializer_list<double> terms) {
  double sum = 0, big = 0;
  for (double t : terms) {
    sum += t;
    big = std::max(big, std::abs(t));
  }
  if (big == 0.0) return lhs == 0.0 ? 0.0 : INFINITY;
  return std::abs(lhs - sum) / big;
}

}  // namespace

double local_flux_kinetic(const VectorField& u, const VectorField& omega, const Cutoff& c, double t) {
  return flux_with(u, omega, c, t);
}

double local_flux_magnetic(const VectorField& u, const VectorField& j, const Cutoff& c, double t) {
  return flux_with(u, j, c, t);
}

double combined_flux(const VectorField& u, const VectorField& omega, const VectorField& j, const Cutoff& c,
                     double t) {
  return local_flux_kinetic(u, omega, c, t) + local_flux_magnetic(u, j, c, t);
}

SnapshotDensities compute_densities(const Snapshot& s, DensityLevel level) {
  const VectorField& u = *s.u;
  const VectorField& b = *s.b;
  require_same_grid(u.grid, b.grid);
  const GridSpec& g = u.grid;
  const std::size_t N = g.size();

  SnapshotDensities d;
  d.time = s.time;
  d.grid = g;
  d.u = s.u;

  const SpectralVector uh = forward(u), bh = forward(b);
  const SpectralVector wh = curl(uh), jh = curl(bh);
  const VectorField w = inverse(wh), j = inverse(jh);
  const Tensor gw = gradient_tensor(wh), gj = gradient_tensor(jh);

  d.ens_omega.resize(N);
  d.ens_j.resize(N);
  d.energy.resize(N);
  d.grad_omega2.resize(N);
  d.grad_j2.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const Vec3 wi = w.at(i), ji = j.at(i), ui = u.at(i), bi = b.at(i);
    d.ens_omega[i] = 0.5 * dot(wi, wi);
    d.ens_j[i] = 0.5 * dot(ji, ji);
    d.energy[i] = 0.5 * (dot(ui, ui) + dot(bi, bi));
    d.grad_omega2[i] = frobenius2(gw, i);
    d.grad_j2[i] = frobenius2(gj, i);
  }
  if (level == DensityLevel::fluxes) return d;

  const Tensor gu = gradient_tensor(uh), gb = gradient_tensor(bh);
  for (auto* v : {&d.n1_omega, &d.l_omega, &d.n2_omega, &d.n1_j, &d.l_j, &d.n2_j, &d.x}) v->resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const Vec3 wi = w.at(i), ji = j.at(i), bi = b.at(i);
    d.n1_omega[i] = contract(wi, wi, gu, i);
    d.l_omega[i] = contract(wi, bi, gj, i);
    d.n2_omega[i] = contract(wi, ji, gb, i);
    d.n1_j[i] = contract(ji, wi, gb, i);
    d.l_j[i] = contract(ji, bi, gw, i);
    d.n2_j[i] = contract(ji, ji, gu, i);
    double x = 0;
    for (int l = 0; l < 3; ++l) x += dot(cross(row(gu, l, i), row(gb, l, i)), ji);
    d.x[i] = 2.0 * x;
  }
  return d;
}

std::vector<double> trapezoid_weights(const SnapshotSeries& series) {
  const std::size_t m = series.size();
  std::vector<double> w(m, 0.0);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double dt = series.frames[k + 1].time - series.frames[k].time;
    w[k] += 0.5 * dt;
    w[k + 1] += 0.5 * dt;
  }
  return w;
}

void require_budget_series(const SnapshotSeries& series, double T, std::size_t min_active) {
  if (series.size() < 2) throw PreconditionError("series needs at least two frames");
  series.validate();
  const double tol = 1e-9 * std::max(1.0, T);
  if (std::abs(series.t_begin()) > tol) throw PreconditionError("series must start at t = 0");
  if (std::abs(series.t_end() - T) > tol)
    throw PreconditionError("series ends at " + std::to_string(series.t_end()) + " but the cutoff horizon is " +
                            std::to_string(T));
  std::size_t active = 0;
  for (const Snapshot& f : series.frames)
    if (f.time > T / 3.0 + tol) ++active;
  if (active < min_active)
    throw PreconditionError("only " + std::to_string(active) + " frames in (T/3, T]; need at least " +
                            std::to_string(min_active));
}

BudgetAccumulator::BudgetAccumulator(std::vector<Cutoff> cutoffs, const GridSpec& g, double viscosity,
                                     double resistivity)
    : cutoffs_(std::move(cutoffs)), acc_(cutoffs_.size()), nu_(viscosity), eta_(resistivity) {
  for (const Cutoff& c : cutoffs_) {
    if (c.temporal().T() != cutoffs_.front().temporal().T())
      throw PreconditionError("cutoffs in one budget pass must share the horizon T");
    stencils_.push_back(make_stencil(c, g));
  }
}

bool BudgetAccumulator::needs(double t) const {
  for (const Cutoff& c : cutoffs_)
    if (c.eta(t) != 0.0 || c.eta_dot(t) != 0.0) return true;
  return false;
}

void BudgetAccumulator::add(const SnapshotDensities& d, double weight) {
  if (d.x.empty()) throw PreconditionError("budget accumulation needs budget-level densities");
  const double t = d.time;
  for (std::size_t ci = 0; ci < cutoffs_.size(); ++ci) {
    const Cutoff& c = cutoffs_[ci];
    const double e = c.eta(t) * weight, ed = c.eta_dot(t) * weight;
    if (e == 0.0 && ed == 0.0) continue;
    const SpatialIntegrals s = integrate_on(d, stencils_[ci]);
    FluxBudget& b = acc_[ci];
    b.flux_kinetic += e * s.flux_omega;
    b.flux_magnetic += e * s.flux_j;
    b.dissipation_kinetic += e * s.grad_omega2;
    b.dissipation_magnetic += e * s.grad_j2;
    b.H_omega -= ed * s.ens_omega + nu_ * e * s.ens_omega_lap;
    b.H_j -= ed * s.ens_j + eta_ * e * s.ens_j_lap;
    b.N1_omega -= e * s.n1_omega;
    b.L_omega -= e * s.l_omega;
    b.N2_omega += e * s.n2_omega;
    b.N1_j += e * s.n1_j;
    b.L_j -= e * s.l_j;
    b.N2_j -= e * s.n2_j;
    b.X += e * s.x;
  }
}

void BudgetAccumulator::set_endpoint(const SnapshotDensities& d) {
  for (std::size_t ci = 0; ci < cutoffs_.size(); ++ci) {
    acc_[ci].endpoint_enstrophy_kinetic = stencil_sum(stencils_[ci], d.ens_omega, stencils_[ci].psi);
    acc_[ci].endpoint_enstrophy_magnetic = stencil_sum(stencils_[ci], d.ens_j, stencils_[ci].psi);
  }
}

std::vector<FluxBudget> BudgetAccumulator::finish() const {
  std::vector<FluxBudget> out = acc_;
  for (FluxBudget& b : out) {
    b.viscosity = nu_;
    b.resistivity = eta_;
    b.closure_residual_kinetic =
        residual(b.flux_kinetic, {b.endpoint_enstrophy_kinetic, nu_ * b.dissipation_kinetic, b.H_omega, b.N1_omega,
                                  b.L_omega, b.N2_omega});
    b.closure_residual_magnetic =
        residual(b.flux_magnetic, {b.endpoint_enstrophy_magnetic, eta_ * b.dissipation_magnetic, b.H_j, b.N1_j,
                                   b.L_j, b.N2_j, b.X});
  }
  return out;
}

std::vector<FluxBudget> budget_terms(const SnapshotSeries& series, const std::vector<Cutoff>& cutoffs) {
  if (cutoffs.empty()) return {};
  require_budget_series(series, cutoffs.front().temporal().T());
  BudgetAccumulator acc(cutoffs, series.grid(), series.viscosity, series.resistivity);
  const std::vector<double> w = trapezoid_weights(series);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const bool last = k + 1 == series.size();
    if (!last && !acc.needs(series.frames[k].time)) continue;
    const SnapshotDensities d = compute_densities(series.frames[k], DensityLevel::budget);
    acc.add(d, w[k]);
    if (last) acc.set_endpoint(d);
  }
  return acc.finish();
}

FluxBudget budget_terms(const SnapshotSeries& series, const Cutoff& c) {
  return budget_terms(series, std::vector<Cutoff>{c}).front();
}

std::vector<double> time_averaged_flux(const SnapshotSeries& series, const std::vector<Cutoff>& cutoffs) {
  if (cutoffs.empty()) return {};
  const double T = cutoffs.front().temporal().T();
  for (const Cutoff& c : cutoffs)
    if (c.temporal().T() != T) throw PreconditionError("cutoffs in one pass must share the horizon T");
  require_budget_series(series, T);

  const GridSpec& g = series.grid();
  std::vector<CutoffStencil> st;
  for (const Cutoff& c : cutoffs) st.push_back(make_stencil(c, g));
  const std::vector<double> w = trapezoid_weights(series);
  std::vector<double> out(cutoffs.size(), 0.0);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double t = series.frames[k].time;
    bool needed = false;
    for (const Cutoff& c : cutoffs) needed = needed || c.eta(t) != 0.0;
    if (!needed) continue;
    const Snapshot& f = series.frames[k];
    const VectorField w_f = curl(*f.u), j_f = curl(*f.b);
    for (std::size_t ci = 0; ci < cutoffs.size(); ++ci) {
      const double e = cutoffs[ci].eta(t);
      if (e == 0.0) continue;
      out[ci] += w[k] * e * (advective_sum(*f.u, w_f, st[ci]) + advective_sum(*f.u, j_f, st[ci]));
    }
  }
  for (double& v : out) v /= T;
  return out;
}

double time_averaged_flux(const SnapshotSeries& series, const Cutoff& c) {
  return time_averaged_flux(series, std::vector<Cutoff>{c}).front();
}

}  // namespace mhdc
