#include "mhdcascade/covers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "mhdcascade/errors.hpp"

namespace mhdc {

void CoverParams::validate() const {
  if (K1 < 1 || K2 < 1) throw PreconditionError("K1 and K2 must be >= 1");
  if (!(R0 > 0)) throw PreconditionError("R0 must be positive");
  if (!(R > 0 && R <= R0)) throw PreconditionError("R must lie in (0, R0]");
  if (!(jitter_fraction >= 0 && jitter_fraction < 1)) throw PreconditionError("jitter_fraction must lie in [0, 1)");
}

double CoverParams::count_lower() const { return std::pow(R0 / R, 3); }
double CoverParams::count_upper() const { return K1 * count_lower(); }

void Cover::tag_boundary() {
  boundary.resize(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) boundary[i] = norm(centers[i]) + params.R > params.R0;
}

namespace {

Vec3 random_in_ball(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const Vec3 v{u(rng), u(rng), u(rng)};
    if (dot(v, v) <= 1.0) return radius * v;
  }
}

}  // namespace

int multiplicity_at(const Cover& cover, const Vec3& x) {
  const double r2 = cover.params.R * cover.params.R;
  int m = 0;
  for (const Vec3& c : cover.centers) {
    const Vec3 d = x - c;
    if (dot(d, d) < r2) ++m;
  }
  return m;
}

CoverReport verify_cover(const Cover& cover, int sample_density) {
  if (sample_density < 1) throw PreconditionError("sample_density must be >= 1");
  const CoverParams& p = cover.params;
  CoverReport r;
  r.n = cover.size();
  r.count_lower = p.count_lower();
  r.count_upper = p.count_upper();
  r.count_ok = double(r.n) >= r.count_lower * (1 - 1e-12) && double(r.n) <= r.count_upper * (1 + 1e-12);

  const double h = p.R / sample_density;
  double lo = -p.R0, hi = p.R0;
  for (const Vec3& c : cover.centers)
    for (int a = 0; a < 3; ++a) {
      lo = std::min(lo, c[a] - p.R);
      hi = std::max(hi, c[a] + p.R);
    }
  // Sample nodes sit at cell midpoints; each ball stamps the nodes it contains.
  const long m = long(std::ceil((hi - lo) / h));
  if (m > 1500) throw PreconditionError("cover sampling grid too large; lower sample_density");
  auto node = [&](long i) { return lo + (i + 0.5) * h; };
  std::vector<std::uint16_t> count(std::size_t(m) * m * m, 0);
  const double r2 = p.R * p.R;
  for (const Vec3& c : cover.centers) {
    long b[3], e[3];
    for (int a = 0; a < 3; ++a) {
      b[a] = std::max(0L, long(std::floor((c[a] - p.R - lo) / h - 0.5)));
      e[a] = std::min(m - 1, long(std::ceil((c[a] + p.R - lo) / h - 0.5)));
    }
    for (long k = b[2]; k <= e[2]; ++k) {
      const double dz = node(k) - c.z;
      for (long j = b[1]; j <= e[1]; ++j) {
        const double dy = node(j) - c.y;
        const double rest = r2 - dz * dz - dy * dy;
        if (rest <= 0) continue;
        for (long i = b[0]; i <= e[0]; ++i) {
          const double dx = node(i) - c.x;
          if (dx * dx < rest) ++count[std::size_t(i) + std::size_t(m) * (j + std::size_t(m) * k)];
        }
      }
    }
  }
  std::size_t in_ball = 0, covered = 0;
  int worst = 0;
  for (long k = 0; k < m; ++k)
    for (long j = 0; j < m; ++j)
      for (long i = 0; i < m; ++i) {
        const int c = count[std::size_t(i) + std::size_t(m) * (j + std::size_t(m) * k)];
        worst = std::max(worst, c);
        const Vec3 x{node(i), node(j), node(k)};
        if (dot(x, x) < p.R0 * p.R0) {
          ++in_ball;
          if (c > 0) ++covered;
        }
      }
  r.samples = in_ball;
  r.coverage_fraction = in_ball ? double(covered) / double(in_ball) : 0.0;
  r.coverage_ok = in_ball > 0 && covered == in_ball;
  r.max_multiplicity = worst;
  r.multiplicity_ok = worst <= p.K2;
  return r;
}

Cover generate_cover(const CoverParams& params, std::uint64_t seed) {
  params.validate();
  Cover cover;
  cover.params = params;
  const double R = params.R, R0 = params.R0;

  if (R >= R0) {
    cover.centers.push_back({0, 0, 0});
  } else {
    const double slack = (1.0 - params.jitter_fraction) * R * 0.999;
    // Covering radius of the lattice: a sqrt(5)/4 for bcc, a sqrt(3)/2 for cubic.
    const double a = params.lattice == Lattice::bcc ? 4.0 * slack / std::sqrt(5.0) : 2.0 * slack / std::sqrt(3.0);
    const double cover_radius = params.lattice == Lattice::bcc ? a * std::sqrt(5.0) / 4.0 : a * std::sqrt(3.0) / 2.0;
    const long m = long(std::ceil((R0 + cover_radius) / a)) + 1;
    std::vector<Vec3> lattice;
    for (long k = -m; k <= m; ++k)
      for (long j = -m; j <= m; ++j)
        for (long i = -m; i <= m; ++i) {
          lattice.push_back({a * i, a * j, a * k});
          if (params.lattice == Lattice::bcc) lattice.push_back({a * (i + 0.5), a * (j + 0.5), a * (k + 0.5)});
        }
    std::mt19937_64 rng(seed);
    // Slightly inside the sphere so every center lies in the open ball.
    const double rmax = R0 * (1.0 - 1e-9);
    for (const Vec3& q : lattice) {
      if (norm(q) > R0 + cover_radius) continue;
      Vec3 c = q + random_in_ball(rng, params.jitter_fraction * R);
      const double r = norm(c);
      if (r > rmax) c = (rmax / r) * c;
      cover.centers.push_back(c);
    }
  }
  cover.tag_boundary();

  const double n = double(cover.size());
  if (n > params.count_upper() * (1 + 1e-12))
    throw InfeasibleCover("K1 bound violated: " + std::to_string(cover.size()) + " centers exceed K1 (R0/R)^3 = " +
                          std::to_string(params.count_upper()));
  if (n < params.count_lower() * (1 - 1e-12))
    throw InfeasibleCover("count lower bound (R0/R)^3 violated");
  const CoverReport rep = verify_cover(cover);
  if (!rep.coverage_ok) throw InfeasibleCover("coverage of B(0, R0) not achieved");
  if (!rep.multiplicity_ok)
    throw InfeasibleCover("K2 bound violated: sampled multiplicity " + std::to_string(rep.max_multiplicity) + " exceeds K2 = " +
                          std::to_string(params.K2));
  return cover;
}

}  // namespace mhdc
