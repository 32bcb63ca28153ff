#pragma once

// Binary snapshot files (.oddf).
//
//   header: five little-endian 64-bit words
//     [0] magic 0x4F444446 ("ODDF")   (uint64)
//     [1] format version = 1          (uint64)
//     [2] n                           (uint64)
//     [3] box length L                (IEEE-754 double)
//     [4] time t                      (IEEE-754 double)
//   body: n*n little-endian doubles per field, row-major (index i*n + j is
//   the value at x_i, y_j), fields in the order
//     rho, u_x, u_y [, Pi [, U_x, U_y]]
//   The field count (3, 4 or 6) follows from the file size.

#include <cstdint>
#include <filesystem>
#include <optional>

#include "oddflow/grid.hpp"

namespace oddflow {

inline constexpr std::uint64_t kSnapshotMagic = 0x4F444446ULL;
inline constexpr std::uint64_t kSnapshotVersion = 1;

struct Snapshot {
  double t = 0.0;
  ScalarField rho;
  VectorField u;
  std::optional<ScalarField> Pi;
  std::optional<VectorField> U;  // requires Pi
};

/// Throws FormatError when U is given without Pi or grids disagree, IoError on I/O failure.
void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
/// Throws FormatError on a bad magic, version or size.
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace oddflow
