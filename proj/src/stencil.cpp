#include "mhdcascade/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mhdcascade/errors.hpp"

namespace mhdc {

CutoffStencil make_stencil(const Cutoff& c, const GridSpec& g) {
  const Box b = c.support_box();
  const double half = 0.5 * g.box_length, h = g.spacing();
  for (int k = 0; k < 3; ++k) {
    if (b.lo[k] < -half || b.hi[k] >= half)
      throw PreconditionError("cutoff support [" + std::to_string(b.lo[k]) + ", " + std::to_string(b.hi[k]) +
                              "] leaves the periodic box along axis " + std::to_string(k));
  }
  int lo[3], hi[3];
  for (int k = 0; k < 3; ++k) {
    lo[k] = std::max(0, int(std::ceil((b.lo[k] + half) / h - 1e-9)));
    hi[k] = std::min(g.n - 1, int(std::floor((b.hi[k] + half) / h + 1e-9)));
  }
  CutoffStencil s;
  s.grid = g;
  for (int kz = lo[2]; kz <= hi[2]; ++kz)
    for (int ky = lo[1]; ky <= hi[1]; ++ky)
      for (int kx = lo[0]; kx <= hi[0]; ++kx) {
        const Vec3 x = g.position(kx, ky, kz);
        const PointEval e = c.eval(x);
        if (!(e.psi > 0)) continue;
        s.index.push_back(g.index(kx, ky, kz));
        s.psi.push_back(e.psi);
        s.grad.push_back(e.grad);
        s.lap.push_back(e.laplacian());
      }
  return s;
}

double stencil_sum(const CutoffStencil& s, const std::vector<double>& f, const std::vector<double>& w) {
  double acc = 0;
  for (std::size_t n = 0; n < s.size(); ++n) acc += f[s.index[n]] * w[n];
  return acc * s.cell_volume();
}

}  // namespace mhdc
