#include "mhdcascade/report.hpp"

#include <charconv>
#include <cmath>

#include "mhdcascade/errors.hpp"

namespace mhdc {

using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json vec(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

std::string fmt(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

json to_json(const RunConfig& c) {
  const AnalysisParams& a = c.analysis;
  json j;
  j["grid"] = {{"n", c.n}, {"box_length", c.box_length}};
  j["init"] = {{"kind", c.init.kind == InitKind::orszag_tang ? "orszag_tang" : "random"},
               {"amplitude", c.init.amplitude},
               {"slope", c.init.slope},
               {"seed", c.init.seed}};
  j["solver"] = {{"viscosity", c.solver.viscosity},     {"resistivity", c.solver.resistivity},
                 {"dt", c.solver.dt},                   {"t_end", c.solver.t_end},
                 {"snapshot_stride", c.solver.snapshot_stride}, {"dealias_fraction", c.solver.dealias_fraction},
                 {"cfl", c.solver.cfl}};
  j["analysis"] = {{"K1", a.K1},
                   {"K2", a.K2},
                   {"K_star", a.K_star},
                   {"beta", a.beta},
                   {"M", a.M},
                   {"C0_localization", a.C0_localization},
                   {"T", a.T},
                   {"R0", a.R0},
                   {"scales", analysis_scales(a)},
                   {"jitter_fraction", a.jitter_fraction},
                   {"covers_per_scale", a.covers_per_scale},
                   {"threads", a.threads},
                   {"seed", c.cover_seed}};
  j["cutoffs"] = {{"delta", a.delta}, {"rho", a.rho}, {"shape", to_string(a.shape)}, {"samples", c.cutoff_samples}};
  j["verify"] = {{"a1_threshold", c.a1_threshold ? json(*c.a1_threshold) : json("auto")},
                 {"a1_pairs", c.a1_pairs},
                 {"a1_seed", c.a1_seed}};
  j["output"] = {{"flux_csv", c.flux_csv}};
  return j;
}

json to_json(const IntegralScaleQuantities& q) {
  return {{"e0", num(q.e0)},         {"E0", num(q.E0)},         {"P0", num(q.P0)},
          {"P0_endpoint", num(q.P0_endpoint)}, {"curly_E0", num(q.curly_E0)}, {"eps0", num(q.eps0)},
          {"sigma0", num(q.sigma0)}, {"degenerate", q.degenerate}};
}

json to_json(const CheckResult& r) {
  return {{"density", r.density}, {"R", num(r.R)},         {"n", r.n},
          {"theta0", num(r.theta0)}, {"average", num(r.average)}, {"lower", num(r.lower)},
          {"upper", num(r.upper)}, {"slack", r.slack},      {"ok", r.ok}};
}

json to_json(const EnsembleReport& r) {
  json scales = json::array();
  for (const ScaleResult& s : r.scales)
    scales.push_back({{"R", num(s.R)},
                      {"per_cover", nums(s.per_cover)},
                      {"per_cover_psi", nums(s.per_cover_psi)},
                      {"n", s.n},
                      {"mean_flux", num(s.mean_flux)},
                      {"min_flux", num(s.min_flux)},
                      {"max_flux", num(s.max_flux)},
                      {"mean_psi", num(s.mean_psi)},
                      {"spread", num(s.spread)},
                      {"lower_bound", num(s.lower_bound)},
                      {"upper_bound", num(s.upper_bound)},
                      {"in_band", s.in_band},
                      {"admissible", s.admissible}});
  return {{"scales", scales},
          {"integral", to_json(r.integral)},
          {"K_star", r.K_star},
          {"beta", r.beta},
          {"R0", r.R0},
          {"admissible_lo", num(r.admissible_lo)},
          {"admissible_hi", num(r.admissible_hi)},
          {"degenerate", r.degenerate},
          {"seed", r.seed}};
}

json to_json(const LocalityResult& r) {
  json pairs = json::array();
  for (const LocalityPair& p : r.pairs)
    pairs.push_back({{"r", p.r},
                     {"R", p.R},
                     {"ratio", num(p.ratio)},
                     {"lower", num(p.lower)},
                     {"upper", num(p.upper)},
                     {"within", p.within}});
  return {{"pairs", pairs},
          {"identity_error", num(r.identity_error)},
          {"identity_ok", r.identity_ok},
          {"degenerate", r.degenerate}};
}

json to_json(const A1Report& r) {
  return {{"threshold_M", num(r.threshold_M)},
          {"max_offset", num(r.max_offset)},
          {"frames", r.frames},
          {"active_points", r.active_points},
          {"points_tested", r.points_tested},
          {"pairs_tested", r.pairs_tested},
          {"violations", r.violations},
          {"violation_fraction", num(r.violation_fraction)},
          {"worst_ratio", num(r.worst_ratio)},
          {"vacuous", r.vacuous}};
}

json to_json(const A3Report& r) {
  return {{"localization_radius", num(r.localization_radius)},
          {"localization_lhs", num(r.localization_lhs)},
          {"localization_bound", num(r.localization_bound)},
          {"localization_ok", r.localization_ok},
          {"modulation_ratio_omega", num(r.modulation_ratio_omega)},
          {"modulation_ratio_j", num(r.modulation_ratio_j)},
          {"modulation_ok", r.modulation_ok},
          {"modulation_degenerate", r.modulation_degenerate}};
}

json to_json(const AnalysisReport& r) {
  json interp = json::array();
  for (const CheckResult& c : r.interpolation) interp.push_back(to_json(c));
  return {{"schema_version", kReportSchemaVersion},
          {"config", to_json(r.config)},
          {"run", {{"n", r.grid.n}, {"box_length", r.grid.box_length}, {"frames", r.frames}, {"t_end", r.t_end},
                   {"max_energy_residual", num(r.max_energy_residual)}}},
          {"integral", to_json(r.integral)},
          {"interpolation", interp},
          {"cascade", to_json(r.cascade)},
          {"locality", r.locality ? to_json(*r.locality) : json(nullptr)},
          {"a1", to_json(r.a1)},
          {"a3", to_json(r.a3)}};
}

json to_json(const Cover& c) {
  const CoverParams& p = c.params;
  json centers = json::array();
  for (const Vec3& x : c.centers) centers.push_back(vec(x));
  json boundary = json::array();
  for (bool b : c.boundary) boundary.push_back(bool(b));
  return {{"params",
           {{"K1", p.K1}, {"K2", p.K2}, {"R0", p.R0}, {"R", p.R}, {"jitter_fraction", p.jitter_fraction},
            {"lattice", p.lattice == Lattice::bcc ? "bcc" : "cubic"}}},
          {"centers", centers},
          {"boundary", boundary}};
}

Cover cover_from_json(const json& j) {
  Cover c;
  try {
    const json& p = j.at("params");
    c.params.K1 = p.at("K1").get<int>();
    c.params.K2 = p.at("K2").get<int>();
    c.params.R0 = p.at("R0").get<double>();
    c.params.R = p.at("R").get<double>();
    c.params.jitter_fraction = p.value("jitter_fraction", 0.0);
    const std::string lat = p.value("lattice", std::string("bcc"));
    if (lat != "bcc" && lat != "cubic") throw FormatError("cover: unknown lattice '" + lat + "'", 0);
    c.params.lattice = lat == "bcc" ? Lattice::bcc : Lattice::cubic;
    for (const json& x : j.at("centers")) {
      if (!x.is_array() || x.size() != 3) throw FormatError("cover: centers must be [x, y, z] triples", 0);
      c.centers.push_back({x[0].get<double>(), x[1].get<double>(), x[2].get<double>()});
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("cover: ") + e.what(), 0);
  }
  try {
    c.params.validate();
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("cover: ") + e.what(), 0);
  }
  c.tag_boundary();
  return c;
}

json to_json(const CoverReport& r) {
  return {{"n", r.n},
          {"count_lower", r.count_lower},
          {"count_upper", r.count_upper},
          {"count_ok", r.count_ok},
          {"samples", r.samples},
          {"coverage_fraction", num(r.coverage_fraction)},
          {"coverage_ok", r.coverage_ok},
          {"max_multiplicity", r.max_multiplicity},
          {"multiplicity_ok", r.multiplicity_ok},
          {"ok", r.ok()}};
}

json to_json(const BoundReport& r) {
  return {{"samples", r.samples},
          {"c0_space", num(r.c0_space)},
          {"c0_time", num(r.c0_time)},
          {"max_grad_ratio", num(r.max_grad_ratio)},
          {"max_hess_ratio", num(r.max_hess_ratio)},
          {"max_time_ratio", num(r.max_time_ratio)},
          {"grad_ok", r.grad_ok},
          {"hess_ok", r.hess_ok},
          {"time_ok", r.time_ok},
          {"range_ok", r.range_ok},
          {"plateau_ok", r.plateau_ok},
          {"support_ok", r.support_ok},
          {"inward_violations", r.inward_violations},
          {"edge_ratios", nums(r.edge_ratios)},
          {"ok", r.ok()}};
}

std::string flux_csv(const EnsembleReport& r) {
  std::string out = "scale,R,cover,elements,flux,psi,lower_bound,upper_bound,in_band,admissible\n";
  for (std::size_t s = 0; s < r.scales.size(); ++s) {
    const ScaleResult& sr = r.scales[s];
    for (std::size_t c = 0; c < sr.per_cover.size(); ++c) {
      out += std::to_string(s) + ',' + fmt(sr.R) + ',' + std::to_string(c) + ',' + std::to_string(sr.n[c]) + ',' +
             fmt(sr.per_cover[c]) + ',' + fmt(sr.per_cover_psi[c]) + ',' + fmt(sr.lower_bound) + ',' +
             fmt(sr.upper_bound) + ',' + (sr.in_band ? "1" : "0") + ',' + (sr.admissible ? "1" : "0") + '\n';
    }
  }
  return out;
}

}  // namespace mhdc
