#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "mhdcascade/config.hpp"
#include "mhdcascade/errors.hpp"
#include "mhdcascade/pipeline.hpp"
#include "mhdcascade/report.hpp"
#include "mhdcascade/selftest.hpp"
#include "mhdcascade/snapshot_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mhdc;

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  os << text;
  if (!os) throw PreconditionError("cannot write " + path);
}

int cmd_simulate(const std::string& config, const std::string& out) {
  const RunConfig cfg = load_config(config);
  const SnapshotSeries s = simulate_to(cfg, out);
  std::cerr << "wrote " << s.size() << " snapshots to " << out << '\n';
  return kExitOk;
}

int cmd_analyze(const std::string& config, const std::string& snapshots, const std::string& out,
                const std::string& csv) {
  const RunConfig cfg = load_config(config);
  if (!fs::is_directory(snapshots)) throw FormatError("snapshot directory " + snapshots + " does not exist", 0);
  const SnapshotSeries s = read_series(snapshots);
  const AnalysisReport r = analyze(s, cfg);
  write_text(out, to_json(r).dump(2) + "\n");
  std::string csv_path = csv;
  if (csv_path.empty()) {
    const fs::path base = (out.empty() || out == "-") ? fs::current_path() : fs::path(out).parent_path();
    csv_path = (base / cfg.flux_csv).string();
  }
  write_text(csv_path, flux_csv(r.cascade));
  return kExitOk;
}

int cmd_cover_gen(const std::string& config, std::optional<double> scale, std::uint64_t seed, const std::string& out) {
  const RunConfig cfg = load_config(config);
  std::vector<double> scales = scale ? std::vector<double>{*scale} : analysis_scales(cfg.analysis);
  json covers = json::array();
  for (std::size_t s = 0; s < scales.size(); ++s) {
    const Cover c = generate_cover(cfg.analysis.cover_params(scales[s]), cover_seed(seed, s, 0));
    json j = to_json(c);
    j["report"] = to_json(verify_cover(c));
    covers.push_back(j);
  }
  write_text(out, json{{"covers", covers}}.dump(2) + "\n");
  return kExitOk;
}

int cmd_cover_verify(const std::string& config, const std::string& path, int density, const std::string& out) {
  load_config(config);
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open " + path, 0);
  json in;
  try {
    in = json::parse(is);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what(), e.byte);
  }
  const json list = in.contains("covers") ? in.at("covers") : json::array({in});
  json reports = json::array();
  bool ok = true;
  for (const json& j : list) {
    const CoverReport r = verify_cover(cover_from_json(j), density);
    ok = ok && r.ok();
    reports.push_back(to_json(r));
  }
  write_text(out, json{{"reports", reports}, {"ok", ok}}.dump(2) + "\n");
  return ok ? kExitOk : kExitValidation;
}

int cmd_verify_cutoffs(const std::string& config, const std::string& out) {
  const RunConfig cfg = load_config(config);
  const AnalysisParams& a = cfg.analysis;
  const CutoffParams cp = a.cutoff_params();
  json reports = json::array();
  bool ok = true;
  auto record = [&](const Cutoff& c, double R) {
    const BoundReport r = verify_cutoff_bounds(c, cfg.cutoff_samples, cfg.cover_seed);
    ok = ok && r.ok();
    json j = to_json(r);
    j["kind"] = to_string(c.kind());
    j["R"] = R;
    j["center"] = json::array({c.center().x, c.center().y, c.center().z});
    reports.push_back(j);
  };
  record(make_integral_cutoff(a.R0, cp), a.R0);
  const std::vector<double> scales = analysis_scales(a);
  for (std::size_t s = 0; s < scales.size(); ++s) {
    if (scales[s] >= a.R0) continue;
    const Cover c = generate_cover(a.cover_params(scales[s]), cover_seed(cfg.cover_seed, s, 0));
    bool have_interior = false, have_boundary = false;
    for (std::size_t i = 0; i < c.size() && !(have_interior && have_boundary); ++i) {
      bool& have = c.boundary[i] ? have_boundary : have_interior;
      if (have) continue;
      record(make_cover_cutoff(c.centers[i], scales[s], a.R0, cp), scales[s]);
      have = true;
    }
  }
  write_text(out, json{{"cutoffs", reports}, {"ok", ok}}.dump(2) + "\n");
  return ok ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localized enstrophy cascade diagnostics for 3D incompressible MHD"};
  app.require_subcommand(1);

  std::string config, out, snapshots, csv, cover_path;
  std::optional<double> scale;
  std::uint64_t seed = 1;
  int density = 16;

  auto* sim = app.add_subcommand("simulate", "run the solver and write a snapshot series");
  sim->add_option("--config", config, "configuration file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out, "output directory")->required();

  auto* ana = app.add_subcommand("analyze", "run the analysis pipeline on a snapshot series");
  ana->add_option("--config", config, "configuration file")->required()->check(CLI::ExistingFile);
  ana->add_option("--snapshots", snapshots, "snapshot directory")->required();
  ana->add_option("--out", out, "report JSON path")->required();
  ana->add_option("--csv", csv, "flux-vs-scale CSV path (default: output.flux_csv next to the report)");

  auto* cov = app.add_subcommand("cover", "generate or verify covers");
  cov->require_subcommand(1);
  auto* gen = cov->add_subcommand("gen", "generate one cover per scale as JSON");
  gen->add_option("--config", config, "configuration file")->required()->check(CLI::ExistingFile);
  gen->add_option("--scale", scale, "single scale R instead of the configured ones");
  gen->add_option("--seed", seed, "cover seed");
  gen->add_option("--out", out, "output JSON path (default stdout)");
  auto* ver = cov->add_subcommand("verify", "check covers from JSON against the count and multiplicity bounds");
  ver->add_option("--config", config, "configuration file")->required()->check(CLI::ExistingFile);
  ver->add_option("--cover", cover_path, "cover JSON written by cover gen")->required();
  ver->add_option("--density", density, "samples per R")->check(CLI::PositiveNumber);
  ver->add_option("--out", out, "output JSON path (default stdout)");

  auto* vc = app.add_subcommand("verify-cutoffs", "sampled bound reports for every cutoff kind");
  vc->add_option("--config", config, "configuration file")->required()->check(CLI::ExistingFile);
  vc->add_option("--out", out, "output JSON path (default stdout)");

  auto* st = app.add_subcommand("selftest", "run the built-in checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sim) return cmd_simulate(config, out);
    if (*ana) return cmd_analyze(config, snapshots, out, csv);
    if (*gen) return cmd_cover_gen(config, scale, seed, out);
    if (*ver) return cmd_cover_verify(config, cover_path, density, out);
    if (*vc) return cmd_verify_cutoffs(config, out);
    if (*st) return run_selftest(std::cout) ? kExitOk : kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}
