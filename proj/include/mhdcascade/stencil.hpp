#pragma once

#include <cstddef>
#include <vector>

#include "mhdcascade/cutoffs.hpp"
#include "mhdcascade/grid.hpp"

namespace mhdc {

// A cutoff sampled on the grid nodes where psi > 0, with its analytic
// gradient and Laplacian. Quadrature over the support is a plain sum times
// the cell volume.
struct CutoffStencil {
  GridSpec grid;
  std::vector<std::size_t> index;
  std::vector<double> psi, lap;
  std::vector<Vec3> grad;

  std::size_t size() const { return index.size(); }
  double cell_volume() const { return grid.spacing() * grid.spacing() * grid.spacing(); }
};

// Throws PreconditionError when the support box does not fit in [-L/2, L/2)^3:
// the periodic images of the support would overlap.
CutoffStencil make_stencil(const Cutoff& c, const GridSpec& g);

// sum over the stencil of f[idx] * w, times the cell volume.
double stencil_sum(const CutoffStencil& s, const std::vector<double>& f, const std::vector<double>& w);

}  // namespace mhdc
