#pragma once

#include <cstdint>
#include <vector>

#include "mhdcascade/types.hpp"

namespace mhdc {

enum class Lattice { bcc, cubic };

struct CoverParams {
  int K1 = 16;
  int K2 = 8;
  double R0 = 1.0;
  double R = 1.0;
  double jitter_fraction = 0.1;
  Lattice lattice = Lattice::bcc;

  void validate() const;  // throws PreconditionError
  double count_lower() const;  // (R0/R)^3
  double count_upper() const;  // K1 (R0/R)^3
};

struct Cover {
  CoverParams params;
  std::vector<Vec3> centers;
  // B(x_i, R) reaches outside B(0, R0).
  std::vector<bool> boundary;

  std::size_t size() const { return centers.size(); }
  void tag_boundary();
};

struct CoverReport {
  std::size_t n = 0;
  double count_lower = 0, count_upper = 0;
  bool count_ok = false;
  std::size_t samples = 0;
  double coverage_fraction = 0;
  bool coverage_ok = false;
  int max_multiplicity = 0;
  bool multiplicity_ok = false;
  bool ok() const { return count_ok && coverage_ok && multiplicity_ok; }
};

// Lattice centers, jittered by at most jitter_fraction * R and pulled onto the
// closed integral ball. At R = R0 the single ball at the origin is returned.
// Throws InfeasibleCover when the lattice breaks a count or multiplicity bound.
Cover generate_cover(const CoverParams& params, std::uint64_t seed);

// Samples at spacing R / sample_density. Coverage is measured on B(0, R0),
// multiplicity on the bounding box of all balls.
CoverReport verify_cover(const Cover& cover, int sample_density = 16);

// Number of centers with |x - x_i| < R.
int multiplicity_at(const Cover& cover, const Vec3& x);

}  // namespace mhdc
