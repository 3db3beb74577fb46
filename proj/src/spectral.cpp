#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "mhdcascade/errors.hpp"
#include "mhdcascade/grid.hpp"

namespace mhdc {

namespace {

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

// The FFTW planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const Plans& plans_for(int n) {
  static std::map<int, Plans> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const std::size_t real_n = std::size_t(n) * n * n;
  const std::size_t cplx_n = std::size_t(n) * n * (n / 2 + 1);
  double* r = fftw_alloc_real(real_n);
  fftw_complex* c = fftw_alloc_complex(cplx_n);
  // ESTIMATE keeps plans deterministic and leaves the scratch arrays untouched.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  Plans p;
  p.r2c = fftw_plan_dft_r2c_3d(n, n, n, r, c, flags);
  p.c2r = fftw_plan_dft_c2r_3d(n, n, n, c, r, flags);
  fftw_free(r);
  fftw_free(c);
  return cache.emplace(n, p).first->second;
}

}  // namespace

double GridSpec::k0() const { return 2.0 * std::numbers::pi / box_length; }

GridSpec GridSpec::make(int n, double box_length) {
  if (n < 8 || n % 2 != 0)
    throw PreconditionError("grid points per axis must be even and >= 8, got " + std::to_string(n));
  if (!(box_length > 0) || !std::isfinite(box_length))
    throw PreconditionError("box length must be positive");
  return GridSpec{n, box_length};
}

Vec3 GridSpec::position(std::size_t flat) const {
  const int i = int(flat % n);
  const int j = int((flat / n) % n);
  const int k = int(flat / (std::size_t(n) * n));
  return position(i, j, k);
}

Wavenumbers::Wavenumbers(const GridSpec& g) : grid(g) {
  const int n = g.n;
  const double k0 = g.k0();
  kx.resize(g.nxh());
  mx.resize(g.nxh());
  for (int i = 0; i < g.nxh(); ++i) {
    mx[i] = i;
    kx[i] = (i == n / 2) ? 0.0 : k0 * i;
  }
  ky.resize(n);
  my.resize(n);
  for (int i = 0; i < n; ++i) {
    my[i] = g.mode(i);
    ky[i] = (i == n / 2) ? 0.0 : k0 * my[i];
  }
  kz = ky;
  mz = my;
}

void Wavenumbers::unpack(std::size_t s, int& ix, int& iy, int& iz) const {
  const std::size_t nxh = kx.size();
  ix = int(s % nxh);
  iy = int((s / nxh) % grid.n);
  iz = int(s / (nxh * grid.n));
}

Vec3 Wavenumbers::k(std::size_t s) const {
  int ix, iy, iz;
  unpack(s, ix, iy, iz);
  return {kx[ix], ky[iy], kz[iz]};
}

double Wavenumbers::k2(std::size_t s) const {
  const Vec3 w = k(s);
  return dot(w, w);
}

const Wavenumbers& wavenumbers(const GridSpec& g) {
  static std::mutex m;
  static std::map<std::pair<int, double>, std::unique_ptr<Wavenumbers>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto& slot = cache[{g.n, g.box_length}];
  if (!slot) slot = std::make_unique<Wavenumbers>(g);
  return *slot;
}

SpectralScalar forward(const ScalarField& f) {
  check_structure(f);
  const Plans& p = plans_for(f.grid.n);
  SpectralScalar out(f.grid);
  // Out-of-place r2c does not modify its input.
  fftw_execute_dft_r2c(p.r2c, const_cast<double*>(f.v.data()),
                       reinterpret_cast<fftw_complex*>(out.v.data()));
  const double scale = 1.0 / double(f.grid.size());
  for (auto& c : out.v) c *= scale;
  return out;
}

ScalarField inverse(const SpectralScalar& f) {
  if (f.v.size() != f.grid.spectral_size()) throw StructuralError("spectral array size does not match grid");
  const Plans& p = plans_for(f.grid.n);
  // c2r destroys its input.
  std::vector<cplx> scratch = f.v;
  ScalarField out(f.grid);
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out.v.data());
  return out;
}

SpectralVector forward(const VectorField& f) {
  check_structure(f);
  SpectralVector out;
  out.grid = f.grid;
  for (int a = 0; a < 3; ++a) {
    ScalarField s;
    s.grid = f.grid;
    s.v = f.c[a];
    out.c[a] = forward(s).v;
  }
  return out;
}

VectorField inverse(const SpectralVector& f) {
  check_structure(f);
  VectorField out;
  out.grid = f.grid;
  for (int a = 0; a < 3; ++a) {
    SpectralScalar s;
    s.grid = f.grid;
    s.v = f.c[a];
    out.c[a] = inverse(s).v;
  }
  return out;
}

}  // namespace mhdc
