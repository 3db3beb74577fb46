#pragma once

#include <cstdint>
#include <filesystem>

#include "mhdcascade/solver.hpp"

namespace mhdc {

// MHDSNAP1 layout, all little-endian:
//   0   char[8]  "MHDSNAP1"
//   8   uint32   n
//   12  uint32   field count (6)
//   16  float64  box length
//   24  float64  time
//   32  float64  u1, u2, u3, b1, b2, b3, each n^3 values, x fastest
inline constexpr std::uint64_t kSnapshotHeaderBytes = 32;

void write_snapshot(const MhdState& state, const std::filesystem::path& path);
// Throws FormatError naming the byte offset of the first bad field.
MhdState read_snapshot(const std::filesystem::path& path);

// A run directory holds snap_00000.mhd ... plus series.json with the times,
// viscosity, resistivity, energies and energy residuals.
void write_series(const SnapshotSeries& series, const std::filesystem::path& dir);
// Throws FormatError when the directory has no series.json or a listed file
// is bad, and PreconditionError when the frames do not form a valid series.
SnapshotSeries read_series(const std::filesystem::path& dir);

}  // namespace mhdc
