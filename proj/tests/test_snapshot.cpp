#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "doctest.h"
#include "oddflow/errors.hpp"
#include "oddflow/snapshot.hpp"
#include "support.hpp"

using namespace oddflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "oddflow_snapshot_test";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<unsigned char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Snapshot sample(std::size_t n, bool with_pi, bool with_U) {
  const Grid g(n, 3.5);
  std::mt19937_64 rng(1);
  Snapshot s{0.25, oddflow::testing::random_field(g, rng, 3),
             VectorField(oddflow::testing::random_field(g, rng, 3), oddflow::testing::random_field(g, rng, 3)),
             std::nullopt, std::nullopt};
  if (with_pi) s.Pi = oddflow::testing::random_field(g, rng, 3);
  if (with_U) s.U = VectorField(oddflow::testing::random_field(g, rng, 3), oddflow::testing::random_field(g, rng, 3));
  return s;
}

}  // namespace

TEST_CASE("header layout and field order on disk") {
  const Snapshot s = sample(8, true, false);
  const fs::path p = scratch("layout.oddf");
  write_snapshot(p, s);
  const auto bytes = slurp(p);
  REQUIRE(bytes.size() == 5 * 8 + 4 * 64 * 8);

  std::uint64_t words[3];
  std::memcpy(words, bytes.data(), sizeof(words));
  CHECK(words[0] == 0x4F444446ULL);
  CHECK(words[1] == 1);
  CHECK(words[2] == 8);
  double L = 0.0;
  double t = 0.0;
  std::memcpy(&L, bytes.data() + 24, 8);
  std::memcpy(&t, bytes.data() + 32, 8);
  CHECK(L == 3.5);
  CHECK(t == 0.25);

  // value (i=2, j=5) of u_y: third field, row-major
  double v = 0.0;
  std::memcpy(&v, bytes.data() + 40 + (2 * 64 + 2 * 8 + 5) * 8, 8);
  CHECK(v == s.u.y(2, 5));
}

TEST_CASE("round trip with 3, 4 and 6 fields") {
  for (auto [pi, U] : {std::pair{false, false}, std::pair{true, false}, std::pair{true, true}}) {
    const Snapshot s = sample(16, pi, U);
    const fs::path p = scratch("rt.oddf");
    write_snapshot(p, s);
    const Snapshot r = read_snapshot(p);
    CHECK(r.t == s.t);
    CHECK(r.rho.grid() == s.rho.grid());
    CHECK((r.rho - s.rho).max_abs() == 0.0);
    CHECK((r.u - s.u).max_magnitude() == 0.0);
    CHECK(r.Pi.has_value() == pi);
    CHECK(r.U.has_value() == U);
    if (U) CHECK((*r.U - *s.U).max_magnitude() == 0.0);
  }
}

TEST_CASE("format errors") {
  Snapshot bad = sample(8, false, true);
  CHECK_THROWS_AS(write_snapshot(scratch("bad.oddf"), bad), FormatError);

  const Snapshot s = sample(8, false, false);
  const fs::path p = scratch("corrupt.oddf");
  write_snapshot(p, s);
  auto bytes = slurp(p);

  auto write_bytes = [&](const std::vector<unsigned char>& b) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  };

  auto magic = bytes;
  magic[0] ^= 0xFF;
  write_bytes(magic);
  CHECK_THROWS_AS(read_snapshot(p), FormatError);

  auto version = bytes;
  version[8] = 2;
  write_bytes(version);
  CHECK_THROWS_AS(read_snapshot(p), FormatError);

  auto truncated = bytes;
  truncated.resize(truncated.size() - 8);
  write_bytes(truncated);
  CHECK_THROWS_AS(read_snapshot(p), FormatError);

  CHECK_THROWS_AS(read_snapshot(scratch("missing.oddf")), Error);
}

TEST_CASE("unwritable destination") {
  const Snapshot s = sample(8, false, false);
  CHECK_THROWS_AS(write_snapshot("/proc/oddflow/none/x.oddf", s), IoError);
}
