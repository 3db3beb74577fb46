#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "mhdcascade/config.hpp"
#include "mhdcascade/errors.hpp"
#include "mhdcascade/report.hpp"
#include "mhdcascade/snapshot_io.hpp"

using namespace mhdc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("mhdc_" + tag + "_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::uint64_t format_offset(const fs::path& p) {
  try {
    read_snapshot(p);
  } catch (const FormatError& e) {
    return e.offset;
  }
  FAIL("no FormatError");
  return 0;
}

void patch(const fs::path& p, std::uint64_t at, const void* bytes, std::size_t n) {
  std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(std::streamoff(at));
  f.write(static_cast<const char*>(bytes), std::streamsize(n));
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "t.toml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("snapshot round trip is bit-exact") {
  TempDir d("io");
  const GridSpec g = GridSpec::make(8, 2 * std::numbers::pi);
  MhdState s = init_random_solenoidal(g, -5.0 / 3, 21);
  s.u.c[1][5] = -0.0;
  s.b.c[2][7] = 5e-324;  // subnormal
  s.time = 0.1 + 0.2;
  write_snapshot(s, d.path / "a.mhd");
  CHECK(fs::file_size(d.path / "a.mhd") == kSnapshotHeaderBytes + 6 * g.size() * 8);
  const MhdState r = read_snapshot(d.path / "a.mhd");
  CHECK(r.u.grid == g);
  CHECK(r.time == s.time);
  for (int c = 0; c < 3; ++c) {
    CHECK(std::memcmp(r.u.c[c].data(), s.u.c[c].data(), g.size() * 8) == 0);
    CHECK(std::memcmp(r.b.c[c].data(), s.b.c[c].data(), g.size() * 8) == 0);
  }
}

TEST_CASE("snapshot header layout") {
  TempDir d("io");
  const GridSpec g = GridSpec::make(8, 3.0);
  MhdState s{VectorField(g), VectorField(g), 0.5};
  s.u.c[0][0] = 1.0;
  s.b.c[2][g.size() - 1] = 2.0;
  write_snapshot(s, d.path / "h.mhd");
  std::ifstream is(d.path / "h.mhd", std::ios::binary);
  std::vector<unsigned char> b((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  CHECK(std::string(b.begin(), b.begin() + 8) == "MHDSNAP1");
  CHECK(b[8] == 8);
  CHECK(b[9] == 0);
  CHECK(b[12] == 6);
  // 3.0 = 0x4008000000000000, little-endian.
  CHECK(b[23] == 0x40);
  CHECK(b[22] == 0x08);
  // First payload value u1[0] = 1.0 = 0x3FF0...
  CHECK(b[39] == 0x3F);
  CHECK(b[38] == 0xF0);
  // Last value b3[last] = 2.0 = 0x4000...
  CHECK(b.back() == 0x40);
}

TEST_CASE("snapshot format errors name the offset") {
  TempDir d("io");
  const GridSpec g = GridSpec::make(8, 1.0);
  const MhdState s = init_random_solenoidal(g, -2.0, 1);
  const fs::path p = d.path / "s.mhd";
  const std::uint64_t full = kSnapshotHeaderBytes + 6 * g.size() * 8;

  SUBCASE("truncated payload") {
    write_snapshot(s, p);
    fs::resize_file(p, full - 100);
    CHECK(format_offset(p) == full - 100);
  }
  SUBCASE("truncated header") {
    write_snapshot(s, p);
    fs::resize_file(p, 20);
    CHECK(format_offset(p) == 20);
  }
  SUBCASE("trailing bytes") {
    write_snapshot(s, p);
    fs::resize_file(p, full + 8);
    CHECK(format_offset(p) == full);
  }
  SUBCASE("wrong magic") {
    write_snapshot(s, p);
    patch(p, 0, "MHDSNAP2", 8);
    CHECK(format_offset(p) == 0);
  }
  SUBCASE("wrong field count") {
    write_snapshot(s, p);
    const std::uint32_t five = 5;
    patch(p, 12, &five, 4);
    CHECK(format_offset(p) == 12);
  }
  SUBCASE("shape mismatch") {
    write_snapshot(s, p);
    const std::uint32_t n = 10;  // grid claims 10^3 but the payload holds 8^3
    patch(p, 8, &n, 4);
    CHECK(format_offset(p) == full);
  }
  SUBCASE("bad box length") {
    write_snapshot(s, p);
    const double L = -1;
    patch(p, 16, &L, 8);
    CHECK(format_offset(p) == 8);
  }
  SUBCASE("missing file") { CHECK(format_offset(d.path / "nope.mhd") == 0); }
}

TEST_CASE("series round trip") {
  TempDir d("series");
  const GridSpec g = GridSpec::make(8, 2 * std::numbers::pi);
  SolverConfig cfg;
  cfg.viscosity = cfg.resistivity = 0.05;
  cfg.dt = 0.01;
  cfg.t_end = 0.04;
  const SnapshotSeries s = run(init_orszag_tang_3d(g, 1.0), cfg);
  write_series(s, d.path / "run");
  const SnapshotSeries r = read_series(d.path / "run");
  REQUIRE(r.size() == s.size());
  CHECK(r.viscosity == s.viscosity);
  CHECK(r.energy == s.energy);
  CHECK(r.energy_residual == s.energy_residual);
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(r.frames[k].time == s.frames[k].time);
    CHECK(r.frames[k].u->c == s.frames[k].u->c);
    CHECK(r.frames[k].b->c == s.frames[k].b->c);
  }

  CHECK_THROWS_AS(read_series(d.path / "empty"), FormatError);
  fs::remove(d.path / "run" / "snap_00002.mhd");
  CHECK_THROWS_AS(read_series(d.path / "run"), FormatError);
}

TEST_CASE("config defaults") {
  const RunConfig c = parse_config("");
  CHECK(c.n == 32);
  CHECK(c.box_length == doctest::Approx(2 * std::numbers::pi));
  CHECK(c.analysis.R0 == c.box_length / 8);
  CHECK(c.analysis.T == c.solver.t_end);
  CHECK_FALSE(c.a1_threshold.has_value());
  CHECK(c.flux_csv == "flux_vs_scale.csv");
}

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(R"(# comment
[grid]
n = 16
box_length = 6.0   # trailing comment

[init]
kind = "random"
slope = -2
seed = 7

[solver]
viscosity = 5e-3
resistivity = 0.005
dt = 1e-3
t_end = 0.05
snapshot_stride = 5

[analysis]
K_star = 20
beta = 0.25
scales = [0.7, 0.35]
covers_per_scale = 3
seed = 99
R0 = 0.7

[cutoffs]
shape = "smooth"
samples = 1_000

[verify]
a1_threshold = 2.5
a1_pairs = 100

[output]
flux_csv = "f.csv"
)");
  CHECK(c.n == 16);
  CHECK(c.box_length == 6.0);
  CHECK(c.init.kind == InitKind::random);
  CHECK(c.init.slope == -2.0);
  CHECK(c.init.seed == 7);
  CHECK(c.solver.viscosity == 5e-3);
  CHECK(c.solver.snapshot_stride == 5);
  CHECK(c.analysis.T == 0.05);
  CHECK(c.analysis.K_star == 20);
  CHECK(c.analysis.scales == std::vector<double>{0.7, 0.35});
  CHECK(c.analysis.covers_per_scale == 3);
  CHECK(c.analysis.R0 == 0.7);
  CHECK(c.cover_seed == 99);
  CHECK(c.analysis.shape == ProfileShape::smooth);
  CHECK(c.analysis.cutoff_params().shape == ProfileShape::smooth);
  CHECK(c.cutoff_samples == 1000);
  CHECK(c.a1_threshold == 2.5);
  CHECK(c.a1_pairs == 100);
  CHECK(c.flux_csv == "f.csv");
  CHECK(parse_config("[verify]\na1_threshold = \"auto\"\n").a1_threshold == std::nullopt);
}

TEST_CASE("config errors name the line") {
  CHECK(config_error("[grid]\nn = 16\nfoo = 1\n").find("t.toml:3") != std::string::npos);
  CHECK(config_error("[grid]\nfoo = 1\n").find("unknown key 'grid.foo'") != std::string::npos);
  CHECK(config_error("[nope]\n").find("unknown section") != std::string::npos);
  CHECK(config_error("n = 3\n").find("outside a section") != std::string::npos);
  CHECK(config_error("[grid]\nn = 16\nn = 32\n").find("duplicate") != std::string::npos);
  CHECK(config_error("[grid]\nn = 16.5\n").find("integer") != std::string::npos);
  CHECK(config_error("[grid]\nn = \"x\"\n").find("number") != std::string::npos);
  CHECK(config_error("[init]\nkind = \"vortex\"\n").find("orszag_tang") != std::string::npos);
  CHECK(config_error("[init]\nseed = -1\n").find("non-negative") != std::string::npos);
  CHECK(config_error("[analysis]\nscales = [1, x]\n").find("array") != std::string::npos);
  CHECK(config_error("[grid]\nn\n").find("key = value") != std::string::npos);
  CHECK(config_error("[grid\n").find("section header") != std::string::npos);
  CHECK(config_error("[init]\nkind = \"random\n").find("unterminated") != std::string::npos);
}

TEST_CASE("config range checks from the owning modules") {
  CHECK_FALSE(config_error("[grid]\nn = 2\n").empty());
  CHECK_FALSE(config_error("[solver]\ndt = 0\n").empty());
  CHECK_FALSE(config_error("[solver]\nviscosity = -1\n").empty());
  CHECK_FALSE(config_error("[analysis]\nK_star = 2\n").empty());
  CHECK_FALSE(config_error("[analysis]\nbeta = 1\n").empty());
  CHECK_FALSE(config_error("[analysis]\nscales = [2.0]\n").empty());
  CHECK_FALSE(config_error("[cutoffs]\nrho = 0.4\n").empty());
  CHECK_FALSE(config_error("[verify]\na1_threshold = 0\n").empty());
  // supp phi_0 must fit inside half the box.
  CHECK(config_error("[analysis]\nR0 = 1.6\n").find("2 R0") != std::string::npos);
  // 2 R0 < L/2 holds but the (A1) offsets wrap.
  CHECK(config_error("[analysis]\nR0 = 1.2\n").find("R0^(2/3)") != std::string::npos);
}

TEST_CASE("load_config reads files") {
  TempDir d("cfg");
  {
    std::ofstream os(d.path / "c.toml");
    os << "[grid]\nn = 8\n";
  }
  CHECK(load_config(d.path / "c.toml").n == 8);
  CHECK_THROWS_AS(load_config(d.path / "missing.toml"), ConfigError);
  try {
    load_config(d.path / "c.toml");
    std::ofstream os(d.path / "c.toml");
    os << "[grid]\nbad = 1\n";
    os.close();
    load_config(d.path / "c.toml");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("c.toml:2") != std::string::npos);
  }
}

TEST_CASE("cover JSON round trip") {
  CoverParams p;
  p.R0 = 1.0;
  p.R = 0.5;
  const Cover c = generate_cover(p, 3);
  const Cover r = cover_from_json(nlohmann::json::parse(to_json(c).dump()));
  REQUIRE(r.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(r.centers[i].x == c.centers[i].x);
    CHECK(r.centers[i].y == c.centers[i].y);
    CHECK(r.centers[i].z == c.centers[i].z);
  }
  CHECK(r.boundary == c.boundary);
  CHECK(r.params.R == 0.5);
  CHECK_THROWS_AS(cover_from_json(nlohmann::json::parse(R"({"params": {"K1": 16}})")), FormatError);
  CHECK_THROWS_AS(cover_from_json(nlohmann::json::parse(
                      R"({"params": {"K1": 16, "K2": 8, "R0": 1, "R": 0.5}, "centers": [[0, 0]]})")),
                  FormatError);
}

TEST_CASE("flux CSV rows") {
  EnsembleReport r;
  ScaleResult s;
  s.R = 0.5;
  s.per_cover = {1.25, 0.1};
  s.per_cover_psi = {0.15625, 0.0125};
  s.n = {9, 10};
  s.lower_bound = 0.5;
  s.upper_bound = 1e3;
  s.in_band = true;
  r.scales = {s};
  CHECK(flux_csv(r) ==
        "scale,R,cover,elements,flux,psi,lower_bound,upper_bound,in_band,admissible\n"
        "0,0.5,0,9,1.25,0.15625,0.5,1000,1,0\n"
        "0,0.5,1,10,0.1,0.0125,0.5,1000,1,0\n");
}

TEST_CASE("non-finite report numbers become null") {
  ScaleResult s;
  s.spread = std::numeric_limits<double>::infinity();
  EnsembleReport r;
  r.scales = {s};
  CHECK(to_json(r)["scales"][0]["spread"].is_null());
}
