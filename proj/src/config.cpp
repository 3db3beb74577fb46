#include "mhdcascade/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <variant>
#include <vector>

#include "mhdcascade/errors.hpp"

namespace mhdc {

namespace {

using Value = std::variant<double, std::string, bool, std::vector<double>>;

struct Line {
  int number;
  std::string key;
  Value value;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Drops a # comment that is not inside a string.
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

bool parse_number(const std::string& s, double& out) {
  std::string t;
  for (char c : s)
    if (c != '_') t += c;
  if (!t.empty() && t[0] == '+') t.erase(0, 1);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), out);
  return r.ec == std::errc() && r.ptr == t.data() + t.size() && !t.empty();
}

Value parse_value(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  if (s.empty()) throw ConfigError(where + "missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') throw ConfigError(where + "unterminated string");
    return s.substr(1, s.size() - 2);
  }
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '[') {
    if (s.back() != ']') throw ConfigError(where + "unterminated array");
    std::vector<double> v;
    std::stringstream ss(s.substr(1, s.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      double d;
      if (!parse_number(item, d)) throw ConfigError(where + "array entries must be numbers, got '" + item + "'");
      v.push_back(d);
    }
    return v;
  }
  double d;
  if (!parse_number(s, d)) throw ConfigError(where + "cannot parse value '" + s + "'");
  return d;
}

class Binder {
 public:
  Binder(std::string origin) : origin_(std::move(origin)) {}

  void add(const std::string& key, std::function<void(const Value&, const std::string&)> f) { slots_[key] = std::move(f); }

  void apply(const std::string& key, const Line& l) {
    const std::string where = origin_ + ":" + std::to_string(l.number) + ": ";
    auto it = slots_.find(key);
    if (it == slots_.end()) throw ConfigError(where + "unknown key '" + key + "'");
    it->second(l.value, where + key + ": ");
  }

  bool has_section(const std::string& s) const {
    const std::string p = s + ".";
    for (const auto& [k, f] : slots_)
      if (k.compare(0, p.size(), p) == 0) return true;
    return false;
  }

 private:
  std::string origin_;
  std::map<std::string, std::function<void(const Value&, const std::string&)>> slots_;
};

double as_number(const Value& v, const std::string& where) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  throw ConfigError(where + "expected a number");
}

long as_integer(const Value& v, const std::string& where) {
  const double d = as_number(v, where);
  if (d != std::floor(d) || std::abs(d) > 9.0e15) throw ConfigError(where + "expected an integer");
  return long(d);
}

std::uint64_t as_seed(const Value& v, const std::string& where) {
  const long i = as_integer(v, where);
  if (i < 0) throw ConfigError(where + "expected a non-negative integer");
  return std::uint64_t(i);
}

std::string as_string(const Value& v, const std::string& where) {
  if (const std::string* s = std::get_if<std::string>(&v)) return *s;
  throw ConfigError(where + "expected a string");
}

}  // namespace

MhdState RunConfig::initial_state() const {
  const GridSpec g = grid();
  if (init.kind == InitKind::orszag_tang) return init_orszag_tang_3d(g, init.amplitude);
  return init_random_solenoidal(g, init.slope, init.seed);
}

void RunConfig::validate() const {
  try {
    grid();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  if (init.kind == InitKind::orszag_tang && !(std::isfinite(init.amplitude) && init.amplitude != 0))
    throw ConfigError("init: amplitude must be finite and non-zero");
  if (!std::isfinite(init.slope)) throw ConfigError("init: slope must be finite");
  solver.validate();
  analysis.validate();
  for (double R : analysis.scales) {
    try {
      analysis.cover_params(R).validate();
    } catch (const PreconditionError& e) {
      throw ConfigError(std::string("analysis: ") + e.what());
    }
  }
  const double half = 0.5 * box_length;
  const double R0 = analysis.R0;
  if (!(2 * R0 < half))
    throw ConfigError("analysis: supp phi_0 = B(0, 2 R0) must fit inside half the box (2 R0 < L/2)");
  if (!(2 * R0 + std::pow(R0, 2.0 / 3.0) < half))
    throw ConfigError("analysis: the (A1) offset range 2 R0 + R0^(2/3) must stay below L/2");
  if (a1_threshold && !(*a1_threshold > 0)) throw ConfigError("verify: a1_threshold must be positive");
  if (a1_pairs < 1) throw ConfigError("verify: a1_pairs must be positive");
  if (cutoff_samples < 1) throw ConfigError("verify: cutoff_samples must be positive");
  if (flux_csv.empty()) throw ConfigError("output: flux_csv must not be empty");
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig c;
  bool have_T = false, have_R0 = false;
  Binder b(origin);
  auto num = [&](const char* key, double& dst) {
    b.add(key, [&dst](const Value& v, const std::string& w) { dst = as_number(v, w); });
  };
  auto integer = [&](const char* key, auto& dst) {
    b.add(key, [&dst](const Value& v, const std::string& w) {
      using T = std::remove_reference_t<decltype(dst)>;
      const long i = as_integer(v, w);
      if constexpr (std::is_unsigned_v<T>)
        if (i < 0) throw ConfigError(w + "expected a non-negative integer");
      dst = T(i);
    });
  };

  integer("grid.n", c.n);
  num("grid.box_length", c.box_length);

  b.add("init.kind", [&](const Value& v, const std::string& w) {
    const std::string s = as_string(v, w);
    if (s == "orszag_tang") c.init.kind = InitKind::orszag_tang;
    else if (s == "random") c.init.kind = InitKind::random;
    else throw ConfigError(w + "expected \"orszag_tang\" or \"random\"");
  });
  num("init.amplitude", c.init.amplitude);
  num("init.slope", c.init.slope);
  b.add("init.seed", [&](const Value& v, const std::string& w) { c.init.seed = as_seed(v, w); });

  num("solver.viscosity", c.solver.viscosity);
  num("solver.resistivity", c.solver.resistivity);
  num("solver.dt", c.solver.dt);
  num("solver.t_end", c.solver.t_end);
  integer("solver.snapshot_stride", c.solver.snapshot_stride);
  num("solver.dealias_fraction", c.solver.dealias_fraction);
  num("solver.cfl", c.solver.cfl);

  AnalysisParams& a = c.analysis;
  integer("analysis.K1", a.K1);
  integer("analysis.K2", a.K2);
  num("analysis.K_star", a.K_star);
  num("analysis.beta", a.beta);
  num("analysis.M", a.M);
  num("analysis.C0_localization", a.C0_localization);
  b.add("analysis.T", [&](const Value& v, const std::string& w) {
    a.T = as_number(v, w);
    have_T = true;
  });
  b.add("analysis.R0", [&](const Value& v, const std::string& w) {
    a.R0 = as_number(v, w);
    have_R0 = true;
  });
  b.add("analysis.scales", [&](const Value& v, const std::string& w) {
    const auto* arr = std::get_if<std::vector<double>>(&v);
    if (!arr) throw ConfigError(w + "expected an array of numbers");
    a.scales = *arr;
  });
  num("analysis.jitter_fraction", a.jitter_fraction);
  integer("analysis.covers_per_scale", a.covers_per_scale);
  integer("analysis.threads", a.threads);
  b.add("analysis.seed", [&](const Value& v, const std::string& w) { c.cover_seed = as_seed(v, w); });

  num("cutoffs.delta", a.delta);
  num("cutoffs.rho", a.rho);
  b.add("cutoffs.shape", [&](const Value& v, const std::string& w) {
    const std::string s = as_string(v, w);
    if (s == "quintic") a.shape = ProfileShape::quintic;
    else if (s == "smooth") a.shape = ProfileShape::smooth;
    else throw ConfigError(w + "expected \"quintic\" or \"smooth\"");
  });
  integer("cutoffs.samples", c.cutoff_samples);

  b.add("verify.a1_threshold", [&](const Value& v, const std::string& w) {
    if (const std::string* s = std::get_if<std::string>(&v)) {
      if (*s != "auto") throw ConfigError(w + "expected a number or \"auto\"");
      c.a1_threshold.reset();
    } else {
      c.a1_threshold = as_number(v, w);
    }
  });
  integer("verify.a1_pairs", c.a1_pairs);
  b.add("verify.a1_seed", [&](const Value& v, const std::string& w) { c.a1_seed = as_seed(v, w); });

  b.add("output.flux_csv", [&](const Value& v, const std::string& w) { c.flux_csv = as_string(v, w); });

  std::istringstream in(text);
  std::string raw, section;
  std::map<std::string, int> seen;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    const std::string where = origin + ":" + std::to_string(number) + ": ";
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(where + "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!b.has_section(section)) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    if (section.empty()) throw ConfigError(where + "key '" + key + "' outside a section");
    const std::string full = section + "." + key;
    if (seen.count(full))
      throw ConfigError(where + "duplicate key '" + full + "' (first at line " + std::to_string(seen[full]) + ")");
    seen[full] = number;
    b.apply(full, {number, key, parse_value(s.substr(eq + 1), where)});
  }

  if (!have_T) a.T = c.solver.t_end;
  if (!have_R0) a.R0 = c.box_length / 8;
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace mhdc
