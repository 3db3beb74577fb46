#include "mhdcascade/snapshot_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "mhdcascade/errors.hpp"

namespace mhdc {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'M', 'H', 'D', 'S', 'N', 'A', 'P', '1'};
constexpr std::uint32_t kFields = 6;

template <class T>
void put(std::vector<char>& out, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

template <class T>
T get(const std::vector<char>& in, std::uint64_t at) {
  char b[sizeof(T)];
  std::memcpy(b, in.data() + at, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

std::string frame_name(std::size_t k) {
  std::ostringstream s;
  s << "snap_" << std::setw(5) << std::setfill('0') << k << ".mhd";
  return s.str();
}

}  // namespace

void write_snapshot(const MhdState& state, const fs::path& path) {
  require_same_grid(state.u.grid, state.b.grid);
  check_structure(state.u);
  check_structure(state.b);
  const GridSpec& g = state.u.grid;
  std::vector<char> buf;
  buf.reserve(kSnapshotHeaderBytes + 6 * g.size() * 8);
  buf.insert(buf.end(), kMagic, kMagic + 8);
  put<std::uint32_t>(buf, std::uint32_t(g.n));
  put<std::uint32_t>(buf, kFields);
  put<double>(buf, g.box_length);
  put<double>(buf, state.time);
  for (const VectorField* f : {&state.u, &state.b})
    for (const auto& comp : f->c)
      for (double v : comp) put<double>(buf, v);

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw PreconditionError("cannot open " + path.string() + " for writing");
  os.write(buf.data(), std::streamsize(buf.size()));
  if (!os) throw PreconditionError("write failed for " + path.string());
}

MhdState read_snapshot(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string(), 0);
  std::vector<char> buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  const std::string where = path.string() + ": ";

  if (buf.size() < 8 || std::memcmp(buf.data(), kMagic, 8) != 0) throw FormatError(where + "bad magic", 0);
  if (buf.size() < kSnapshotHeaderBytes) throw FormatError(where + "truncated header", buf.size());
  const std::uint32_t n = get<std::uint32_t>(buf, 8);
  const std::uint32_t fields = get<std::uint32_t>(buf, 12);
  const double L = get<double>(buf, 16);
  const double t = get<double>(buf, 24);
  if (fields != kFields) throw FormatError(where + "expected 6 fields, found " + std::to_string(fields), 12);
  GridSpec g;
  try {
    g = GridSpec::make(int(n), L);
  } catch (const PreconditionError& e) {
    throw FormatError(where + "bad grid: " + e.what(), 8);
  }
  if (!std::isfinite(t)) throw FormatError(where + "non-finite time", 24);
  const std::uint64_t want = kSnapshotHeaderBytes + std::uint64_t(kFields) * g.size() * 8;
  if (buf.size() < want) throw FormatError(where + "truncated payload", buf.size());
  if (buf.size() > want) throw FormatError(where + "trailing bytes after payload", want);

  MhdState s{VectorField(g), VectorField(g), t};
  std::uint64_t at = kSnapshotHeaderBytes;
  for (VectorField* f : {&s.u, &s.b})
    for (auto& comp : f->c)
      for (double& v : comp) {
        v = get<double>(buf, at);
        at += 8;
      }
  return s;
}

void write_series(const SnapshotSeries& series, const fs::path& dir) {
  if (series.empty()) throw PreconditionError("empty series");
  fs::create_directories(dir);
  nlohmann::json meta;
  meta["format"] = "MHDSNAP1";
  meta["n"] = series.grid().n;
  meta["box_length"] = series.grid().box_length;
  meta["viscosity"] = series.viscosity;
  meta["resistivity"] = series.resistivity;
  meta["energy"] = series.energy;
  meta["energy_residual"] = series.energy_residual;
  nlohmann::json frames = nlohmann::json::array();
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Snapshot& f = series.frames[k];
    write_snapshot({*f.u, *f.b, f.time}, dir / frame_name(k));
    frames.push_back({{"file", frame_name(k)}, {"time", f.time}});
  }
  meta["frames"] = frames;
  std::ofstream os(dir / "series.json");
  os << meta.dump(2) << '\n';
  if (!os) throw PreconditionError("cannot write " + (dir / "series.json").string());
}

SnapshotSeries read_series(const fs::path& dir) {
  const fs::path mp = dir / "series.json";
  std::ifstream is(mp);
  if (!is) throw FormatError("no series.json in " + dir.string(), 0);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(mp.string() + ": " + e.what(), e.byte);
  }
  SnapshotSeries s;
  try {
    s.viscosity = meta.at("viscosity").get<double>();
    s.resistivity = meta.at("resistivity").get<double>();
    s.energy = meta.value("energy", std::vector<double>{});
    s.energy_residual = meta.value("energy_residual", std::vector<double>{});
    const auto& frames = meta.at("frames");
    if (!frames.is_array() || frames.empty()) throw FormatError(mp.string() + ": no frames listed", 0);
    for (const auto& f : frames) {
      MhdState st = read_snapshot(dir / f.at("file").get<std::string>());
      if (st.time != f.at("time").get<double>())
        throw FormatError((dir / f.at("file").get<std::string>()).string() + ": time disagrees with series.json", 24);
      s.push(st.time, std::move(st.u), std::move(st.b));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(mp.string() + ": " + e.what(), 0);
  }
  s.validate();
  return s;
}

}  // namespace mhdc
