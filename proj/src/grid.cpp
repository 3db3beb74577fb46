#include <algorithm>
#include <cmath>
#include <random>

#include "mhdcascade/errors.hpp"
#include "mhdcascade/grid.hpp"

namespace mhdc {

namespace {
const cplx I(0.0, 1.0);
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (a != b) throw StructuralError("fields live on different grids");
}

void check_structure(const ScalarField& f) {
  if (f.v.size() != f.grid.size()) throw StructuralError("scalar array size does not match grid");
}

void check_structure(const VectorField& f) {
  for (const auto& a : f.c)
    if (a.size() != f.grid.size()) throw StructuralError("vector component size does not match grid");
}

void check_structure(const SpectralVector& f) {
  for (const auto& a : f.c)
    if (a.size() != f.grid.spectral_size())
      throw StructuralError("spectral component size does not match grid");
}

SpectralScalar partial(const SpectralScalar& s, int axis) {
  const Wavenumbers& w = wavenumbers(s.grid);
  SpectralScalar out(s.grid);
  for (std::size_t i = 0; i < s.v.size(); ++i) out.v[i] = I * w.k(i)[axis] * s.v[i];
  return out;
}

SpectralVector curl(const SpectralVector& f) {
  check_structure(f);
  const Wavenumbers& w = wavenumbers(f.grid);
  SpectralVector out(f.grid);
  for (std::size_t i = 0; i < f.grid.spectral_size(); ++i) {
    const Vec3 k = w.k(i);
    const cplx a = f.c[0][i], b = f.c[1][i], c = f.c[2][i];
    out.c[0][i] = I * (k.y * c - k.z * b);
    out.c[1][i] = I * (k.z * a - k.x * c);
    out.c[2][i] = I * (k.x * b - k.y * a);
  }
  return out;
}

SpectralScalar divergence(const SpectralVector& f) {
  check_structure(f);
  const Wavenumbers& w = wavenumbers(f.grid);
  SpectralScalar out(f.grid);
  for (std::size_t i = 0; i < f.grid.spectral_size(); ++i) {
    const Vec3 k = w.k(i);
    out.v[i] = I * (k.x * f.c[0][i] + k.y * f.c[1][i] + k.z * f.c[2][i]);
  }
  return out;
}

SpectralVector gradient(const SpectralScalar& s) {
  const Wavenumbers& w = wavenumbers(s.grid);
  SpectralVector out(s.grid);
  for (std::size_t i = 0; i < s.v.size(); ++i) {
    const Vec3 k = w.k(i);
    for (int a = 0; a < 3; ++a) out.c[a][i] = I * k[a] * s.v[i];
  }
  return out;
}

SpectralVector leray_project(const SpectralVector& f) {
  check_structure(f);
  const Wavenumbers& w = wavenumbers(f.grid);
  SpectralVector out = f;
  for (std::size_t i = 0; i < f.grid.spectral_size(); ++i) {
    const Vec3 k = w.k(i);
    const double k2 = dot(k, k);
    if (k2 == 0.0) continue;
    const cplx kf = k.x * f.c[0][i] + k.y * f.c[1][i] + k.z * f.c[2][i];
    for (int a = 0; a < 3; ++a) out.c[a][i] -= k[a] * kf / k2;
  }
  return out;
}

SpectralScalar laplacian(const SpectralScalar& s) {
  const Wavenumbers& w = wavenumbers(s.grid);
  SpectralScalar out(s.grid);
  for (std::size_t i = 0; i < s.v.size(); ++i) out.v[i] = -w.k2(i) * s.v[i];
  return out;
}

SpectralVector laplacian(const SpectralVector& f) {
  const Wavenumbers& w = wavenumbers(f.grid);
  SpectralVector out(f.grid);
  for (std::size_t i = 0; i < f.grid.spectral_size(); ++i) {
    const double k2 = w.k2(i);
    for (int a = 0; a < 3; ++a) out.c[a][i] = -k2 * f.c[a][i];
  }
  return out;
}

VectorField curl(const VectorField& f) { return inverse(curl(forward(f))); }
ScalarField divergence(const VectorField& f) { return inverse(divergence(forward(f))); }
VectorField gradient(const ScalarField& s) { return inverse(gradient(forward(s))); }
VectorField leray_project(const VectorField& f) { return inverse(leray_project(forward(f))); }

bool kept_by_dealias(int m, int n, double fraction) {
  return std::abs(m) < fraction * (n / 2) - 1e-9;
}

void dealias(SpectralScalar& f, double fraction) {
  const Wavenumbers& w = wavenumbers(f.grid);
  const int n = f.grid.n;
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    int ix, iy, iz;
    w.unpack(i, ix, iy, iz);
    if (!kept_by_dealias(w.mx[ix], n, fraction) || !kept_by_dealias(w.my[iy], n, fraction) ||
        !kept_by_dealias(w.mz[iz], n, fraction))
      f.v[i] = 0.0;
  }
}

void dealias(SpectralVector& f, double fraction) {
  const Wavenumbers& w = wavenumbers(f.grid);
  const int n = f.grid.n;
  for (std::size_t i = 0; i < f.grid.spectral_size(); ++i) {
    int ix, iy, iz;
    w.unpack(i, ix, iy, iz);
    if (!kept_by_dealias(w.mx[ix], n, fraction) || !kept_by_dealias(w.my[iy], n, fraction) ||
        !kept_by_dealias(w.mz[iz], n, fraction))
      for (int a = 0; a < 3; ++a) f.c[a][i] = 0.0;
  }
}

namespace {

void hermitian_planes(std::vector<cplx>& v, const GridSpec& g) {
  const int n = g.n, nxh = g.nxh();
  for (int ix : {0, n / 2}) {
    for (int iz = 0; iz < n; ++iz) {
      for (int iy = 0; iy < n; ++iy) {
        const int jy = (n - iy) % n, jz = (n - iz) % n;
        const std::size_t a = ix + std::size_t(nxh) * (iy + std::size_t(n) * iz);
        const std::size_t b = ix + std::size_t(nxh) * (jy + std::size_t(n) * jz);
        if (b < a) continue;
        if (a == b) {
          v[a] = cplx(v[a].real(), 0.0);
        } else {
          const cplx m = 0.5 * (v[a] + std::conj(v[b]));
          v[a] = m;
          v[b] = std::conj(m);
        }
      }
    }
  }
}

}  // namespace

void enforce_hermitian(SpectralScalar& f) { hermitian_planes(f.v, f.grid); }
void enforce_hermitian(SpectralVector& f) {
  for (auto& c : f.c) hermitian_planes(c, f.grid);
}

double integrate(const std::vector<double>& values, const GridSpec& g) {
  if (values.size() != g.size()) throw StructuralError("array size does not match grid");
  double s = 0.0;
  for (double x : values) s += x;
  const double h = g.spacing();
  return s * h * h * h;
}

double integrate(const ScalarField& s) { return integrate(s.v, s.grid); }

namespace {

double weight(std::size_t i, const GridSpec& g) {
  const int ix = int(i % std::size_t(g.nxh()));
  return (ix == 0 || ix == g.n / 2) ? 1.0 : 2.0;
}

}  // namespace

double parseval(const SpectralScalar& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.v.size(); ++i) s += weight(i, f.grid) * std::norm(f.v[i]);
  return s * std::pow(f.grid.box_length, 3);
}

double parseval(const SpectralVector& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.grid.spectral_size(); ++i)
    s += weight(i, f.grid) * (std::norm(f.c[0][i]) + std::norm(f.c[1][i]) + std::norm(f.c[2][i]));
  return s * std::pow(f.grid.box_length, 3);
}

double inner(const SpectralVector& f, const SpectralVector& g) {
  require_same_grid(f.grid, g.grid);
  double s = 0.0;
  for (std::size_t i = 0; i < f.grid.spectral_size(); ++i)
    for (int a = 0; a < 3; ++a) s += weight(i, f.grid) * std::real(f.c[a][i] * std::conj(g.c[a][i]));
  return s * std::pow(f.grid.box_length, 3);
}

double inner(const VectorField& f, const VectorField& g) { return integrate(dot(f, g)); }

ScalarField dot(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid, b.grid);
  ScalarField out(a.grid);
  for (std::size_t i = 0; i < a.grid.size(); ++i)
    out.v[i] = a.c[0][i] * b.c[0][i] + a.c[1][i] * b.c[1][i] + a.c[2][i] * b.c[2][i];
  return out;
}

VectorField cross(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid, b.grid);
  VectorField out(a.grid);
  for (std::size_t i = 0; i < a.grid.size(); ++i) out.set(i, mhdc::cross(a.at(i), b.at(i)));
  return out;
}

ScalarField norm2(const VectorField& a) { return dot(a, a); }

double max_abs(const ScalarField& s) {
  double m = 0.0;
  for (double x : s.v) m = std::max(m, std::abs(x));
  return m;
}

double max_norm(const VectorField& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i) m = std::max(m, norm(f.at(i)));
  return m;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid, b.grid);
  VectorField out = a;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < a.grid.size(); ++i) out.c[c][i] += b.c[c][i];
  return out;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid, b.grid);
  VectorField out = a;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < a.grid.size(); ++i) out.c[c][i] -= b.c[c][i];
  return out;
}

VectorField operator*(double s, const VectorField& a) {
  VectorField out = a;
  for (auto& comp : out.c)
    for (double& x : comp) x *= s;
  return out;
}

std::array<std::array<std::vector<double>, 3>, 3> gradient_tensor(const SpectralVector& f_hat) {
  std::array<std::array<std::vector<double>, 3>, 3> g;
  for (int i = 0; i < 3; ++i) {
    SpectralScalar fi;
    fi.grid = f_hat.grid;
    fi.v = f_hat.c[i];
    for (int j = 0; j < 3; ++j) g[i][j] = inverse(partial(fi, j)).v;
  }
  return g;
}

VectorField advective(const VectorField& a, const SpectralVector& b_hat) {
  require_same_grid(a.grid, b_hat.grid);
  VectorField out(a.grid);
  for (int i = 0; i < 3; ++i) {
    SpectralScalar bi;
    bi.grid = b_hat.grid;
    bi.v = b_hat.c[i];
    for (int j = 0; j < 3; ++j) {
      const std::vector<double> d = inverse(partial(bi, j)).v;
      for (std::size_t p = 0; p < a.grid.size(); ++p) out.c[i][p] += a.c[j][p] * d[p];
    }
  }
  return out;
}

namespace {

std::vector<cplx> random_modes(const GridSpec& g, std::mt19937_64& rng, int kmax) {
  const Wavenumbers& w = wavenumbers(g);
  std::normal_distribution<double> nd(0.0, 1.0);
  kmax = std::min(kmax, g.n / 2 - 1);
  std::vector<cplx> v(g.spectral_size(), cplx(0, 0));
  for (std::size_t i = 0; i < v.size(); ++i) {
    int ix, iy, iz;
    w.unpack(i, ix, iy, iz);
    const double re = nd(rng), im = nd(rng);
    if (std::abs(w.mx[ix]) <= kmax && std::abs(w.my[iy]) <= kmax && std::abs(w.mz[iz]) <= kmax)
      v[i] = cplx(re, im);
  }
  hermitian_planes(v, g);
  return v;
}

}  // namespace

VectorField random_smooth_field(const GridSpec& g, std::uint64_t seed, int kmax) {
  std::mt19937_64 rng(seed);
  SpectralVector s(g);
  for (auto& c : s.c) c = random_modes(g, rng, kmax);
  return inverse(s);
}

ScalarField random_smooth_scalar(const GridSpec& g, std::uint64_t seed, int kmax) {
  std::mt19937_64 rng(seed);
  SpectralScalar s(g);
  s.v = random_modes(g, rng, kmax);
  return inverse(s);
}

}  // namespace mhdc
