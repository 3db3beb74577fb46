#include <cmath>

#include "doctest.h"
#include "mhdcascade/covers.hpp"
#include "mhdcascade/errors.hpp"

using namespace mhdc;

namespace {

CoverParams params(double R0, double R) {
  CoverParams p;
  p.R0 = R0;
  p.R = R;
  return p;
}

// Largest number of points of the infinite cubic lattice a Z^3 inside an open
// ball of radius R, scanned over one unit cell.
int cubic_lattice_bound(double a, double R, int steps) {
  int best = 0;
  for (int k = 0; k < steps; ++k)
    for (int j = 0; j < steps; ++j)
      for (int i = 0; i < steps; ++i) {
        const Vec3 x{a * i / steps, a * j / steps, a * k / steps};
        int c = 0;
        for (int pz = -3; pz <= 4; ++pz)
          for (int py = -3; py <= 4; ++py)
            for (int px = -3; px <= 4; ++px) {
              const Vec3 d = x - Vec3{a * px, a * py, a * pz};
              if (dot(d, d) < R * R) ++c;
            }
        best = std::max(best, c);
      }
  return best;
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(generate_cover(params(1.0, 2.0), 0), PreconditionError);
  CoverParams p = params(1.0, 0.5);
  p.K1 = 0;
  CHECK_THROWS_AS(generate_cover(p, 0), PreconditionError);
}

TEST_CASE("full-size scale uses one ball") {
  const Cover c = generate_cover(params(2.0, 2.0), 3);
  REQUIRE(c.size() == 1);
  CHECK(norm(c.centers[0]) == 0.0);
  const CoverReport r = verify_cover(c);
  CHECK(r.ok());
  CHECK(r.n >= 1);
  CHECK(double(r.n) <= r.count_upper);
}

TEST_CASE("half scale respects the count bounds") {
  const CoverParams p = params(1.0, 0.5);
  const Cover c = generate_cover(p, 1);
  CHECK(c.size() >= 8);
  CHECK(c.size() <= std::size_t(8 * p.K1));
  const CoverReport r = verify_cover(c, 16);
  CHECK(r.coverage_fraction == 1.0);
  CHECK(r.max_multiplicity <= p.K2);
  CHECK(r.ok());
  for (const Vec3& x : c.centers) CHECK(norm(x) < p.R0);
}

TEST_CASE("seeds give distinct jittered covers") {
  const CoverParams p = params(1.0, 0.25);
  const Cover a = generate_cover(p, 10);
  const Cover b = generate_cover(p, 10);
  const Cover d = generate_cover(p, 11);
  REQUIRE(a.size() == b.size());
  double same = 0, diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += norm(a.centers[i] - b.centers[i]);
  for (std::size_t i = 0; i < std::min(a.size(), d.size()); ++i) diff += norm(a.centers[i] - d.centers[i]);
  CHECK(same == 0.0);
  CHECK(diff > 0.0);
}

TEST_CASE("boundary tags") {
  const CoverParams p = params(1.0, 0.25);
  const Cover c = generate_cover(p, 2);
  std::size_t nb = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(c.boundary[i] == (norm(c.centers[i]) + p.R > p.R0));
    nb += c.boundary[i];
  }
  CHECK(nb > 0);
  CHECK(nb < c.size());
}

TEST_CASE("infeasible parameters are rejected with the violated bound") {
  CoverParams p = params(1.0, 0.25);
  p.K1 = 1;
  try {
    generate_cover(p, 0);
    FAIL("expected infeasibility");
  } catch (const InfeasibleCover& e) {
    CHECK(std::string(e.what()).find("K1") != std::string::npos);
  }
  p.K1 = 16;
  p.K2 = 2;
  try {
    generate_cover(p, 0);
    FAIL("expected infeasibility");
  } catch (const InfeasibleCover& e) {
    CHECK(std::string(e.what()).find("K2") != std::string::npos);
  }
}

TEST_CASE("multiplicity counts") {
  Cover c;
  c.params = params(1.0, 0.2);
  c.centers = {{0, 0, 0}, {0.6, 0, 0}, {-0.6, 0, 0}};
  CHECK(multiplicity_at(c, {0, 0.9, 0}) == 0);
  CHECK(multiplicity_at(c, {0.6, 0, 0}) == 1);
  c.centers = {{0.1, 0, 0}, {0.1, 0, 0}, {0.1, 0, 0}, {0.1, 0, 0}};
  CHECK(multiplicity_at(c, {0.1, 0.05, 0}) == 4);
}

TEST_CASE("verify flags violations") {
  SUBCASE("duplicated centers") {
    Cover c;
    c.params = params(1.0, 1.0);
    c.params.K2 = 1;
    c.centers = {{0, 0, 0}, {0, 0, 0}};
    const CoverReport r = verify_cover(c, 8);
    CHECK(r.max_multiplicity == 2);
    CHECK_FALSE(r.multiplicity_ok);
  }
  SUBCASE("too few centers") {
    Cover c;
    c.params = params(1.0, 0.5);
    c.centers = {{0, 0, 0}};
    const CoverReport r = verify_cover(c, 8);
    CHECK_FALSE(r.count_ok);
    CHECK_FALSE(r.coverage_ok);
    CHECK(r.coverage_fraction < 1.0);
  }
}

TEST_CASE("raising K1 and K2 keeps a valid cover valid") {
  const CoverParams p = params(1.0, 0.5);
  const Cover c = generate_cover(p, 4);
  const CoverReport base = verify_cover(c);
  REQUIRE(base.ok());
  for (int extra : {1, 5, 50}) {
    Cover d = c;
    d.params.K1 += extra;
    d.params.K2 += extra;
    CHECK(verify_cover(d).ok());
  }
}

TEST_CASE("cubic lattice clipped to the integral ball") {
  const double R0 = 1.0, R = 0.25;
  const double a = 2 * R / std::sqrt(3.0);
  Cover c;
  c.params = params(R0, R);
  const int m = int(std::ceil(R0 / a)) + 1;
  for (int k = -m; k <= m; ++k)
    for (int j = -m; j <= m; ++j)
      for (int i = -m; i <= m; ++i) {
        const Vec3 x{a * i, a * j, a * k};
        if (norm(x) < R0) c.centers.push_back(x);
      }
  const int bound = cubic_lattice_bound(a, R, 40);
  CHECK(bound >= 1);

  // Exhaustive oracle on an independent grid.
  int oracle = 0;
  const int s = 64;
  for (int k = 0; k < s; ++k)
    for (int j = 0; j < s; ++j)
      for (int i = 0; i < s; ++i) {
        const Vec3 x{-1.25 + 2.5 * (i + 0.31) / s, -1.25 + 2.5 * (j + 0.17) / s, -1.25 + 2.5 * (k + 0.43) / s};
        oracle = std::max(oracle, multiplicity_at(c, x));
      }
  CHECK(oracle <= bound);

  for (int K2 : {bound - 1, bound, bound + 1}) {
    c.params.K2 = K2;
    const CoverReport r = verify_cover(c, 16);
    CHECK(r.max_multiplicity <= bound);
    CHECK(r.multiplicity_ok == (r.max_multiplicity <= K2));
  }
}

TEST_CASE("cubic generator option") {
  CoverParams p = params(1.0, 0.25);
  p.lattice = Lattice::cubic;
  // The cubic lattice overlaps more than bcc and needs a looser K2.
  CHECK_THROWS_AS(generate_cover(p, 5), InfeasibleCover);
  p.K2 = 16;
  const Cover c = generate_cover(p, 5);
  CHECK(verify_cover(c).ok());
}
