#pragma once

#include <memory>
#include <vector>

#include "mhdcascade/cutoffs.hpp"
#include "mhdcascade/grid.hpp"
#include "mhdcascade/solver.hpp"
#include "mhdcascade/stencil.hpp"

namespace mhdc {

// Terms of the localized enstrophy budgets. Everything is a raw space-time
// integral over (0, T); no 1/(T R^3) normalization is applied here.
//
//   F^w = endpoint_w + nu  * dissipation_w + H_w + N1_w + L_w + N2_w
//   F^j = endpoint_j + eta * dissipation_j + H_j + N1_j + L_j + N2_j + X
struct FluxBudget {
  double flux_kinetic = 0, flux_magnetic = 0;
  double endpoint_enstrophy_kinetic = 0, endpoint_enstrophy_magnetic = 0;  // int 1/2|.|^2 psi at T
  double dissipation_kinetic = 0, dissipation_magnetic = 0;                // int int |grad .|^2 phi
  double H_omega = 0, H_j = 0;
  double N1_omega = 0, N2_omega = 0, N1_j = 0, N2_j = 0;
  double L_omega = 0, L_j = 0;
  double X = 0;
  double viscosity = 0, resistivity = 0;
  // |F - sum of right-hand terms| / max |right-hand term|; 0 when every term is 0.
  double closure_residual_kinetic = 0, closure_residual_magnetic = 0;
};

// Phi^w = int 1/2 |omega|^2 (u . grad phi) at time t, with grad phi = eta(t) grad psi.
double local_flux_kinetic(const VectorField& u, const VectorField& omega, const Cutoff& c, double t);
double local_flux_magnetic(const VectorField& u, const VectorField& j, const Cutoff& c, double t);
double combined_flux(const VectorField& u, const VectorField& omega, const VectorField& j, const Cutoff& c,
                     double t);

enum class DensityLevel { fluxes, budget };

// Pointwise densities of one snapshot. The flux level carries what the fluxes
// and integral-scale quantities need; the budget level adds every integrand of
// the budget identities (without the cutoff factor).
struct SnapshotDensities {
  double time = 0;
  GridSpec grid;
  std::shared_ptr<const VectorField> u;
  std::vector<double> ens_omega, ens_j;  // 1/2 |omega|^2, 1/2 |j|^2
  std::vector<double> energy;            // 1/2 |u|^2 + 1/2 |b|^2
  std::vector<double> grad_omega2, grad_j2;  // |grad omega|^2, |grad j|^2 (Frobenius)

  // Budget level only.
  std::vector<double> n1_omega;  // (omega . grad) u . omega
  std::vector<double> l_omega;   // (b . grad) j . omega
  std::vector<double> n2_omega;  // (j . grad) b . omega
  std::vector<double> n1_j;      // (omega . grad) b . j
  std::vector<double> l_j;       // (b . grad) omega . j
  std::vector<double> n2_j;      // (j . grad) u . j
  std::vector<double> x;         // 2 sum_l (grad u_l x grad b_l) . j
};

SnapshotDensities compute_densities(const Snapshot& s, DensityLevel level);

// Trapezoid weights for the frame times.
std::vector<double> trapezoid_weights(const SnapshotSeries& series);

// Checks the series against a horizon T: starts at 0, ends at T, at least
// min_active frames in (T/3, T]. Throws PreconditionError.
void require_budget_series(const SnapshotSeries& series, double T, std::size_t min_active = 30);

// Streaming form of budget_terms: frames are added one at a time with their
// time-quadrature weight, so long runs need not be held in memory.
class BudgetAccumulator {
 public:
  BudgetAccumulator(std::vector<Cutoff> cutoffs, const GridSpec& g, double viscosity, double resistivity);

  // False when eta and eta' vanish at t for every cutoff.
  bool needs(double t) const;
  void add(const SnapshotDensities& d, double weight);
  // Endpoint enstrophies from the frame at t = T.
  void set_endpoint(const SnapshotDensities& d);
  std::vector<FluxBudget> finish() const;

 private:
  std::vector<Cutoff> cutoffs_;
  std::vector<CutoffStencil> stencils_;
  std::vector<FluxBudget> acc_;
  double nu_, eta_;
};

FluxBudget budget_terms(const SnapshotSeries& series, const Cutoff& c);
// One pass over the series for many cutoffs sharing the horizon.
std::vector<FluxBudget> budget_terms(const SnapshotSeries& series, const std::vector<Cutoff>& cutoffs);

// (1/T) int_0^T Phi dt by trapezoid over the frames.
double time_averaged_flux(const SnapshotSeries& series, const Cutoff& c);
std::vector<double> time_averaged_flux(const SnapshotSeries& series, const std::vector<Cutoff>& cutoffs);

}  // namespace mhdc
