#include "mhdcascade/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mhdcascade/errors.hpp"
#include "mhdcascade/flux.hpp"
#include "mhdcascade/stencil.hpp"
#include "parallel.hpp"

namespace mhdc {

double AnalysisParams::min_K_star(int K1, int K2) {
  return std::max({std::sqrt(double(K1) * K2), 0.75 * K2, double(K1)});
}

void AnalysisParams::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("analysis: " + m); };
  if (K1 < 1 || K2 < 1) fail("K1 and K2 must be positive");
  const double kmin = min_K_star(K1, K2);
  if (!(K_star >= kmin * (1 - 1e-12)))
    fail("K_star = " + std::to_string(K_star) + " is below max{sqrt(K1 K2), 3 K2/4, K1} = " + std::to_string(kmin));
  if (!(beta > 0 && beta < 1)) fail("beta must lie in (0, 1)");
  if (!(M > 0)) fail("M must be positive");
  if (!(C0_localization > 0)) fail("C0_localization must be positive");
  if (!(T > 0)) fail("T must be positive");
  if (!(R0 > 0)) fail("R0 must be positive");
  for (double R : scales)
    if (!(R > 0 && R <= R0)) fail("scale " + std::to_string(R) + " is outside (0, R0]");
  if (!(jitter_fraction >= 0 && jitter_fraction < 1)) fail("jitter_fraction must lie in [0, 1)");
  if (covers_per_scale < 1) fail("covers_per_scale must be positive");
  if (threads < 0) fail("threads must be non-negative");
  try {
    cutoff_params().validate();
  } catch (const PreconditionError& e) {
    fail(e.what());
  }
}

CutoffParams AnalysisParams::cutoff_params() const {
  CutoffParams p;
  p.delta = delta;
  p.rho = rho;
  p.shape = shape;
  p.T = T;
  return p;
}

CoverParams AnalysisParams::cover_params(double R) const {
  CoverParams c;
  c.K1 = K1;
  c.K2 = K2;
  c.R0 = R0;
  c.R = R;
  c.jitter_fraction = jitter_fraction;
  return c;
}

std::string to_string(DensityKind k) {
  switch (k) {
    case DensityKind::combined_flux: return "combined_flux";
    case DensityKind::enstrophy: return "enstrophy";
    case DensityKind::energy: return "energy";
    case DensityKind::custom: return "custom";
  }
  return "?";
}

namespace {

struct Element {
  CutoffStencil stencil;
  std::vector<double> weight;  // psi^p; unused for the flux
};

// theta at every node of one frame; for the flux, 1/2 (|omega|^2 + |j|^2).
std::vector<double> frame_density(const Snapshot& f, const DensitySelector& d) {
  const VectorField& u = *f.u;
  const VectorField& b = *f.b;
  const std::size_t N = u.grid.size();
  std::vector<double> out(N);
  switch (d.kind) {
    case DensityKind::combined_flux:
    case DensityKind::enstrophy: {
      const VectorField w = curl(u), j = curl(b);
      const double s = d.kind == DensityKind::enstrophy ? 1.0 : 0.5;
      for (std::size_t i = 0; i < N; ++i) {
        const Vec3 wi = w.at(i), ji = j.at(i);
        out[i] = s * (dot(wi, wi) + dot(ji, ji));
      }
      break;
    }
    case DensityKind::energy:
      for (std::size_t i = 0; i < N; ++i) {
        const Vec3 ui = u.at(i), bi = b.at(i);
        out[i] = 0.5 * (dot(ui, ui) + dot(bi, bi));
      }
      break;
    case DensityKind::custom:
      if (!d.field) throw PreconditionError("custom density without a field function");
      out = d.field(f);
      if (out.size() != N) throw StructuralError("custom density has the wrong number of nodes");
      break;
  }
  return out;
}

// Raw (1/T) int int theta phi^p (or the flux integrand) per element, [cover][element].
std::vector<std::vector<double>> raw_averages(const SnapshotSeries& series, const std::vector<Cover>& covers,
                                              const DensitySelector& density, double p, const CutoffParams& params,
                                              int threads, bool require_nonneg) {
  params.validate();
  const bool flux = density.kind == DensityKind::combined_flux;
  if (!flux && !(p > 0)) throw PreconditionError("the weight power must be positive");
  require_budget_series(series, params.T, 2);
  const GridSpec& g = series.grid();

  std::vector<std::pair<std::size_t, std::size_t>> where;
  for (std::size_t c = 0; c < covers.size(); ++c)
    for (std::size_t i = 0; i < covers[c].size(); ++i) where.emplace_back(c, i);

  std::vector<Element> el(where.size());
  TemporalCutoff eta;
  detail::parallel_for(where.size(), threads, [&](std::size_t k) {
    const auto [c, i] = where[k];
    const Cover& cv = covers[c];
    try {
      const Cutoff cut = make_cover_cutoff(cv.centers[i], cv.params.R, cv.params.R0, params);
      el[k].stencil = make_stencil(cut, g);
    } catch (const Error& e) {
      throw PreconditionError("cover " + std::to_string(c) + " element " + std::to_string(i) + ": " + e.what());
    }
    if (!flux) {
      el[k].weight.resize(el[k].stencil.size());
      for (std::size_t n = 0; n < el[k].stencil.size(); ++n) el[k].weight[n] = std::pow(el[k].stencil.psi[n], p);
    }
  });
  if (!where.empty()) eta = make_temporal_cutoff(params.T, params);

  std::vector<double> acc(where.size(), 0.0);
  const std::vector<double> w = trapezoid_weights(series);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Snapshot& f = series.frames[k];
    const double e = eta.eta(f.time);
    if (e == 0.0) continue;
    const std::vector<double> theta = frame_density(f, density);
    if (require_nonneg)
      for (double v : theta)
        if (v < 0) throw PreconditionError("density is negative at t = " + std::to_string(f.time));
    const double tw = w[k] * (flux ? e : std::pow(e, p));
    detail::parallel_for(where.size(), threads, [&](std::size_t m) {
      const CutoffStencil& s = el[m].stencil;
      double sum = 0;
      if (flux) {
        const VectorField& u = *f.u;
        for (std::size_t n = 0; n < s.size(); ++n) sum += theta[s.index[n]] * dot(u.at(s.index[n]), s.grad[n]);
      } else {
        for (std::size_t n = 0; n < s.size(); ++n) sum += theta[s.index[n]] * el[m].weight[n];
      }
      acc[m] += tw * sum * s.cell_volume();
    });
  }

  std::vector<std::vector<double>> out(covers.size());
  for (std::size_t k = 0; k < where.size(); ++k) out[where[k].first].push_back(acc[k] / params.T);
  return out;
}

Cover integral_cover(double R0) {
  Cover c;
  c.params.R0 = R0;
  c.params.R = R0;
  c.centers = {Vec3{}};
  c.boundary = {false};
  return c;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / double(v.size());
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::vector<std::vector<double>> element_averages(const SnapshotSeries& series, const std::vector<Cover>& covers,
                                                  const DensitySelector& density, double delta_power,
                                                  const CutoffParams& params, int threads) {
  std::vector<std::vector<double>> out = raw_averages(series, covers, density, delta_power, params, threads, false);
  for (std::size_t c = 0; c < covers.size(); ++c) {
    const double R3 = std::pow(covers[c].params.R, 3);
    for (double& v : out[c]) v /= R3;
  }
  return out;
}

double ensemble_average(const SnapshotSeries& series, const Cover& cover, const DensitySelector& density,
                        double delta_power, const CutoffParams& params) {
  return mean(element_averages(series, {cover}, density, delta_power, params).front());
}

double integral_average(const SnapshotSeries& series, double R0, const DensitySelector& density, double delta_power,
                        const CutoffParams& params) {
  return element_averages(series, {integral_cover(R0)}, density, delta_power, params).front().front();
}

IntegralScaleQuantities integral_quantities(const SnapshotSeries& series, const AnalysisParams& params) {
  params.validate();
  const CutoffParams cp = params.cutoff_params();
  require_budget_series(series, cp.T, 2);
  const Cutoff c0 = make_integral_cutoff(params.R0, cp);
  const CutoffStencil s = make_stencil(c0, series.grid());
  const double pe = 4 * params.rho - 3, pE = 2 * params.rho - 1;
  std::vector<double> we(s.size()), wE(s.size());
  for (std::size_t n = 0; n < s.size(); ++n) {
    we[n] = std::pow(s.psi[n], pe);
    wE[n] = std::pow(s.psi[n], pE);
  }

  IntegralScaleQuantities q;
  const std::vector<double> w = trapezoid_weights(series);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Snapshot& f = series.frames[k];
    const double e = c0.eta(f.time);
    const bool last = k + 1 == series.size();
    if (e == 0.0 && !last) continue;
    const SnapshotDensities d = compute_densities(f, DensityLevel::fluxes);
    if (e != 0.0) {
      double se = 0, sE = 0, sP = 0;
      for (std::size_t n = 0; n < s.size(); ++n) {
        const std::size_t i = s.index[n];
        se += d.energy[i] * we[n];
        sE += 2 * (d.ens_omega[i] + d.ens_j[i]) * wE[n];
        sP += (d.grad_omega2[i] + d.grad_j2[i]) * s.psi[n];
      }
      q.e0 += w[k] * std::pow(e, pe) * se;
      q.E0 += w[k] * std::pow(e, pE) * sE;
      q.P0 += w[k] * e * sP;
    }
    if (last) q.P0_endpoint = stencil_sum(s, d.ens_omega, s.psi);
  }
  const double dv = s.cell_volume(), norm = params.T * std::pow(params.R0, 3);
  q.e0 *= dv / norm;
  q.E0 *= dv / norm;
  q.P0 *= dv / norm;
  q.P0_endpoint /= norm;
  q.P0 += q.P0_endpoint;
  if (q.P0 > 0) {
    q.curly_E0 = std::sqrt(q.E0 / q.P0);
    q.eps0 = std::pow(q.e0 / q.P0, 0.25);
    q.sigma0 = std::max(q.curly_E0, q.eps0);
  } else {
    q.degenerate = true;
  }
  return q;
}

CheckResult interpolation_check(const SnapshotSeries& series, const Cover& cover, const DensitySelector& density,
                                const AnalysisParams& params) {
  params.validate();
  if (density.kind == DensityKind::combined_flux)
    throw PreconditionError("the interpolation inequality needs a non-negative density, not the flux");
  const CutoffParams cp = params.cutoff_params();
  const std::vector<std::vector<double>> raw =
      raw_averages(series, {cover, integral_cover(cover.params.R0)}, density, params.delta, cp, params.threads, true);

  CheckResult r;
  r.density = to_string(density.kind);
  r.R = cover.params.R;
  r.n = cover.size();
  r.average = mean(raw[0]) / std::pow(cover.params.R, 3);
  r.theta0 = raw[1][0] / std::pow(cover.params.R0, 3);
  r.lower = r.theta0 / params.K1;
  r.upper = params.K2 * r.theta0;
  r.ok = r.average >= r.lower * (1 - r.slack) && r.average <= r.upper * (1 + r.slack);
  return r;
}

std::vector<double> analysis_scales(const AnalysisParams& params) {
  if (!params.scales.empty()) return params.scales;
  return {params.R0, params.R0 / 2, params.R0 / 4};
}

std::uint64_t cover_seed(std::uint64_t seed, std::size_t s, int c) { return mix(seed ^ mix(s * 1000003ULL + c)); }

EnsembleReport cascade_check(const SnapshotSeries& series, const AnalysisParams& params, int covers_per_scale,
                             std::uint64_t seed) {
  params.validate();
  if (covers_per_scale < 1) throw PreconditionError("covers_per_scale must be positive");
  const std::vector<double> scales = analysis_scales(params);

  EnsembleReport rep;
  rep.seed = seed;
  rep.K_star = params.K_star;
  rep.beta = params.beta;
  rep.R0 = params.R0;
  rep.integral = integral_quantities(series, params);
  rep.degenerate = rep.integral.degenerate;
  rep.admissible_lo = rep.integral.sigma0 / params.beta;
  rep.admissible_hi = params.R0;

  std::vector<Cover> covers;
  for (std::size_t s = 0; s < scales.size(); ++s)
    for (int c = 0; c < covers_per_scale; ++c)
      covers.push_back(generate_cover(params.cover_params(scales[s]), cover_seed(seed, s, c)));
  const std::vector<std::vector<double>> raw =
      raw_averages(series, covers, DensitySelector::flux(), 1.0, params.cutoff_params(), params.threads, false);

  const double P0 = rep.integral.P0;
  for (std::size_t s = 0; s < scales.size(); ++s) {
    ScaleResult sr;
    sr.R = scales[s];
    const double R3 = std::pow(sr.R, 3);
    for (int c = 0; c < covers_per_scale; ++c) {
      const std::vector<double>& v = raw[s * covers_per_scale + c];
      double phi = 0;
      for (double x : v) phi += x / R3;
      sr.per_cover.push_back(phi / double(v.size()));
      sr.per_cover_psi.push_back(mean(v));
      sr.n.push_back(v.size());
    }
    sr.mean_flux = mean(sr.per_cover);
    sr.mean_psi = mean(sr.per_cover_psi);
    sr.min_flux = *std::min_element(sr.per_cover.begin(), sr.per_cover.end());
    sr.max_flux = *std::max_element(sr.per_cover.begin(), sr.per_cover.end());
    sr.spread = sr.min_flux > 0 ? sr.max_flux / sr.min_flux : std::numeric_limits<double>::infinity();
    sr.lower_bound = P0 / (4 * params.K_star);
    sr.upper_bound = 4 * params.K_star * P0;
    sr.in_band = sr.lower_bound <= sr.mean_flux && sr.mean_flux <= sr.upper_bound;
    sr.admissible = rep.admissible_lo <= sr.R && sr.R <= rep.admissible_hi * (1 + 1e-12);
    rep.scales.push_back(std::move(sr));
  }
  return rep;
}

std::pair<double, double> locality_bounds(double r, double R, double K_star) {
  const double q = std::pow(r / R, 3), k = 16 * K_star * K_star;
  return {q / k, k * q};
}

LocalityResult locality_check(const EnsembleReport& report, double K_star) {
  if (report.scales.size() < 2) throw PreconditionError("locality needs at least two scales");
  LocalityResult res;
  res.degenerate = true;
  for (const ScaleResult& s : report.scales) {
    if (s.mean_psi != 0.0) res.degenerate = false;
    const double d = std::abs(s.mean_psi - std::pow(s.R, 3) * s.mean_flux);
    const double scale = std::max(std::abs(s.mean_psi), std::numeric_limits<double>::min());
    res.identity_error = std::max(res.identity_error, s.mean_psi == 0.0 && d == 0.0 ? 0.0 : d / scale);
  }
  res.identity_ok = res.identity_error <= 1e-12;
  for (const ScaleResult& a : report.scales)
    for (const ScaleResult& b : report.scales) {
      if (!(a.R < b.R) || b.mean_psi == 0.0) continue;
      LocalityPair p;
      p.r = a.R;
      p.R = b.R;
      p.ratio = a.mean_psi / b.mean_psi;
      std::tie(p.lower, p.upper) = locality_bounds(p.r, p.R, K_star);
      p.within = p.lower <= p.ratio && p.ratio <= p.upper;
      res.pairs.push_back(p);
    }
  return res;
}

}  // namespace mhdc
