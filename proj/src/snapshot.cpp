#include "oddflow/snapshot.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "oddflow/errors.hpp"

namespace oddflow {

namespace {

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xFFu));
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

void put_field(std::vector<unsigned char>& out, const ScalarField& f) {
  for (double v : f.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
}

ScalarField get_field(const Grid& g, const unsigned char*& p) {
  std::vector<double> values(g.size());
  for (double& v : values) {
    v = std::bit_cast<double>(get_u64(p));
    p += 8;
  }
  return ScalarField(g, std::move(values));
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  const Grid& g = snap.rho.grid();
  if (!(snap.u.grid() == g) || (snap.Pi && !(snap.Pi->grid() == g)) ||
      (snap.U && !(snap.U->grid() == g))) {
    throw FormatError("snapshot fields live on different grids");
  }
  if (snap.U && !snap.Pi) throw FormatError("snapshot with U must also carry Pi");

  std::vector<unsigned char> bytes;
  bytes.reserve(40 + 6 * 8 * g.size());
  put_u64(bytes, kSnapshotMagic);
  put_u64(bytes, kSnapshotVersion);
  put_u64(bytes, g.n());
  put_u64(bytes, std::bit_cast<std::uint64_t>(g.length()));
  put_u64(bytes, std::bit_cast<std::uint64_t>(snap.t));
  put_field(bytes, snap.rho);
  put_field(bytes, snap.u.x);
  put_field(bytes, snap.u.y);
  if (snap.Pi) put_field(bytes, *snap.Pi);
  if (snap.U) {
    put_field(bytes, snap.U->x);
    put_field(bytes, snap.U->y);
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open snapshot for writing: " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("failed writing snapshot: " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open snapshot: " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 40) throw FormatError("snapshot too short: " + path.string());
  const unsigned char* p = bytes.data();
  if (get_u64(p) != kSnapshotMagic) throw FormatError("bad snapshot magic: " + path.string());
  if (get_u64(p + 8) != kSnapshotVersion) {
    throw FormatError("unsupported snapshot version: " + path.string());
  }
  const std::uint64_t n = get_u64(p + 16);
  const double length = std::bit_cast<double>(get_u64(p + 24));
  const double t = std::bit_cast<double>(get_u64(p + 32));
  std::optional<Grid> grid;
  try {
    grid.emplace(static_cast<std::size_t>(n), length);
  } catch (const Error& e) {
    throw FormatError(std::string("bad snapshot header: ") + e.what());
  }
  const Grid& g = *grid;

  const std::size_t field_bytes = 8 * g.size();
  const std::size_t body = bytes.size() - 40;
  if (body % field_bytes != 0) throw FormatError("snapshot body is not a whole number of fields");
  const std::size_t count = body / field_bytes;
  if (count != 3 && count != 4 && count != 6) {
    throw FormatError("snapshot holds " + std::to_string(count) + " fields; expected 3, 4 or 6");
  }

  p += 40;
  ScalarField rho = get_field(g, p);
  ScalarField ux = get_field(g, p);
  ScalarField uy = get_field(g, p);
  Snapshot snap{t, std::move(rho), VectorField(std::move(ux), std::move(uy)), std::nullopt,
                std::nullopt};
  if (count >= 4) snap.Pi = get_field(g, p);
  if (count == 6) {
    ScalarField Ux = get_field(g, p);
    ScalarField Uy = get_field(g, p);
    snap.U = VectorField(std::move(Ux), std::move(Uy));
  }
  return snap;
}

}  // namespace oddflow
