#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "mhdcascade/types.hpp"

namespace mhdc {

using cplx = std::complex<double>;

// Uniform periodic grid on [-L/2, L/2)^3. The origin sits at node (n/2, n/2, n/2).
struct GridSpec {
  int n = 0;
  double box_length = 0;

  static GridSpec make(int n, double box_length);  // throws PreconditionError

  double spacing() const { return box_length / n; }
  double k0() const;  // 2*pi / L
  std::size_t size() const { return std::size_t(n) * n * n; }
  int nxh() const { return n / 2 + 1; }
  std::size_t spectral_size() const { return std::size_t(n) * n * nxh(); }
  std::size_t index(int i, int j, int k) const { return std::size_t(i) + std::size_t(n) * (j + std::size_t(n) * k); }
  double coord(int i) const { return -0.5 * box_length + i * spacing(); }
  Vec3 position(int i, int j, int k) const { return {coord(i), coord(j), coord(k)}; }
  Vec3 position(std::size_t flat) const;
  // Integer Fourier index of storage slot i along a full axis.
  int mode(int i) const { return i <= n / 2 ? i : i - n; }

  bool operator==(const GridSpec& o) const { return n == o.n && box_length == o.box_length; }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

struct ScalarField {
  GridSpec grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double fill = 0.0) : grid(g), v(g.size(), fill) {}
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
};

struct VectorField {
  GridSpec grid;
  std::array<std::vector<double>, 3> c;

  VectorField() = default;
  explicit VectorField(const GridSpec& g) : grid(g) {
    for (auto& a : c) a.assign(g.size(), 0.0);
  }
  Vec3 at(std::size_t i) const { return {c[0][i], c[1][i], c[2][i]}; }
  void set(std::size_t i, const Vec3& w) {
    c[0][i] = w.x;
    c[1][i] = w.y;
    c[2][i] = w.z;
  }
};

// Half-complex storage, kx fastest with n/2+1 slots, then ky, then kz.
// Coefficients are normalized: f(x) = sum_k f_k exp(i k.x).
struct SpectralScalar {
  GridSpec grid;
  std::vector<cplx> v;

  SpectralScalar() = default;
  explicit SpectralScalar(const GridSpec& g) : grid(g), v(g.spectral_size(), cplx(0, 0)) {}
};

struct SpectralVector {
  GridSpec grid;
  std::array<std::vector<cplx>, 3> c;

  SpectralVector() = default;
  explicit SpectralVector(const GridSpec& g) : grid(g) {
    for (auto& a : c) a.assign(g.spectral_size(), cplx(0, 0));
  }
};

// Wavenumber vector of a spectral slot. Derivative wavenumbers drop the Nyquist
// component so odd derivatives of real fields stay real.
struct Wavenumbers {
  explicit Wavenumbers(const GridSpec& g);
  GridSpec grid;
  std::vector<double> kx, ky, kz;     // derivative wavenumbers per axis slot
  std::vector<int> mx, my, mz;        // integer modes per axis slot
  Vec3 k(std::size_t s) const;
  double k2(std::size_t s) const;
  void unpack(std::size_t s, int& ix, int& iy, int& iz) const;
};

const Wavenumbers& wavenumbers(const GridSpec& g);  // cached, thread-safe

// Transforms. Forward divides by n^3.
SpectralScalar forward(const ScalarField& f);
ScalarField inverse(const SpectralScalar& f);
SpectralVector forward(const VectorField& f);
VectorField inverse(const SpectralVector& f);

// Spectral-space operators.
SpectralVector curl(const SpectralVector& f);
SpectralScalar divergence(const SpectralVector& f);
SpectralVector gradient(const SpectralScalar& s);
SpectralVector leray_project(const SpectralVector& f);
SpectralScalar laplacian(const SpectralScalar& s);
SpectralVector laplacian(const SpectralVector& f);
SpectralScalar partial(const SpectralScalar& s, int axis);

// Physical-space wrappers.
VectorField curl(const VectorField& f);
ScalarField divergence(const VectorField& f);
VectorField gradient(const ScalarField& s);
VectorField leray_project(const VectorField& f);

// Zero every mode with |m_a| >= fraction * n/2 on any axis.
void dealias(SpectralVector& f, double fraction);
void dealias(SpectralScalar& f, double fraction);
bool kept_by_dealias(int m, int n, double fraction);

// Make the kx = 0 and kx = n/2 planes conjugate-symmetric.
void enforce_hermitian(SpectralScalar& f);
void enforce_hermitian(SpectralVector& f);

// Quadrature: h^3 * sum.
double integrate(const ScalarField& s);
double integrate(const std::vector<double>& values, const GridSpec& g);
// integrate(|f|^2) computed from coefficients.
double parseval(const SpectralScalar& f);
double parseval(const SpectralVector& f);
// integrate(f g) from coefficients.
double inner(const SpectralVector& f, const SpectralVector& g);
double inner(const VectorField& f, const VectorField& g);

// Pointwise helpers.
ScalarField dot(const VectorField& a, const VectorField& b);
VectorField cross(const VectorField& a, const VectorField& b);
ScalarField norm2(const VectorField& a);
double max_abs(const ScalarField& s);
double max_norm(const VectorField& f);
VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double s, const VectorField& a);
// (a . grad) B with B given spectrally.
VectorField advective(const VectorField& a, const SpectralVector& b_hat);
// Full gradient tensor G(i, j) = d_j f_i, as nine fields g[i][j].
std::array<std::array<std::vector<double>, 3>, 3> gradient_tensor(const SpectralVector& f_hat);

// Smooth random field (not solenoidal) with modes |m| <= kmax, deterministic in seed.
VectorField random_smooth_field(const GridSpec& g, std::uint64_t seed, int kmax = 4);
ScalarField random_smooth_scalar(const GridSpec& g, std::uint64_t seed, int kmax = 4);

void require_same_grid(const GridSpec& a, const GridSpec& b);
void check_structure(const VectorField& f);
void check_structure(const SpectralVector& f);
void check_structure(const ScalarField& f);

}  // namespace mhdc
