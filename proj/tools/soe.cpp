// Command-line front end: scan, fit, render, calibrate, report.
//
// Exit codes: 0 ok, 2 input error, 3 I/O error, 4 infeasible calibration target.

#include "soe/characterization.hpp"
#include "soe/io.hpp"
#include "soe/measurement.hpp"
#include "soe/render.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#ifndef SOE_VERSION
#define SOE_VERSION "0.0.0"
#endif

namespace {

using soe::deg_to_rad;
using nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kInputError = 2, kIoError = 3, kInfeasible = 4 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw soe::InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SOE_DEFAULT_SEED")) {
    try {
      std::size_t used = 0;
      const std::string s(env);
      const unsigned long long v = std::stoull(s, &used);
      if (used != s.size() || (!s.empty() && s[0] == '-')) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw soe::InputError(std::string("SOE_DEFAULT_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

void write_manifest(const std::string& out_path, soe::RunManifest m) {
  m.tool_version = SOE_VERSION;
  m.timestamp = soe::iso8601_now();
  write_file(out_path + ".manifest.json", soe::manifest_to_json(m).dump(2) + "\n");
}

soe::ScanResult load_scan(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw soe::InputError("cannot read '" + path + "'");
  soe::ScanResult scan = soe::read_scan_csv(in);
  scan.channel_label = std::filesystem::path(path).filename().string();
  return scan;
}

// --- scan -----------------------------------------------------------------

struct ScanArgs {
  std::string channel;
  std::vector<double> alpha_deg{0.0, 45.0};
  double theta_step_deg = 5.0;
  std::uint64_t photons = 100000;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned threads = 1;
  int lmax = soe::kDefaultLmax;
  int ell = 1;
};

int run_scan(const ScanArgs& a) {
  const std::uint64_t seed = resolve_seed(a.seed);
  const soe::ModeSpace space(a.lmax);

  soe::ChannelSpec spec{"free-space", {}};
  if (!a.channel.empty()) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file(a.channel));
    } catch (const nlohmann::json::parse_error& e) {
      throw soe::InputError("channel spec '" + a.channel + "' is not valid JSON: " + e.what());
    }
    spec = soe::parse_channel_spec(doc);
  }
  const soe::ChannelModel channel =
      a.channel.empty() ? soe::free_space_channel(space) : soe::build_channel(spec, space);

  soe::ScanConfig cfg;
  for (double d : a.alpha_deg) cfg.alphas.push_back(deg_to_rad(d));
  cfg.thetas = soe::theta_grid(deg_to_rad(a.theta_step_deg));
  cfg.photons = a.photons;
  cfg.seed = seed;
  cfg.ell = a.ell;
  const soe::ScanResult scan = soe::simulate_counts(cfg, channel, a.threads);

  std::ostringstream csv;
  soe::write_scan_csv(csv, scan);
  write_file(a.out, csv.str());

  soe::RunManifest m;
  m.command = "scan";
  m.parameters["channel"] = a.channel;
  m.parameters["channel_spec"] = soe::channel_spec_to_json(spec);
  m.parameters["alpha_deg"] = a.alpha_deg;
  m.parameters["theta_step_deg"] = a.theta_step_deg;
  m.parameters["photons"] = a.photons;
  m.parameters["lmax"] = a.lmax;
  m.parameters["ell"] = a.ell;
  m.parameters["threads"] = a.threads;
  m.seed = seed;
  m.outputs = {a.out};
  write_manifest(a.out, m);
  std::cout << "wrote " << scan.rows.size() << " rows to " << a.out << '\n';
  return kOk;
}

// --- fit / report ---------------------------------------------------------

struct FitArgs {
  std::string scan;
  std::string out;
  std::optional<std::uint64_t> seed;
  double threshold = 0.1;
  int resamples = soe::kBootstrapResamples;
  int lmax = soe::kDefaultLmax;
  int ell = 1;
};

soe::ChannelReport build_report(const FitArgs& a, std::uint64_t seed) {
  const soe::ScanResult scan = load_scan(a.scan);
  soe::ReportOptions opts;
  opts.crosstalk_threshold = a.threshold;
  opts.resamples = a.resamples;
  opts.seed = seed;
  opts.space = soe::ModeSpace(a.lmax);
  opts.ell = a.ell;
  return soe::channel_report(scan, opts);
}

soe::RunManifest fit_manifest(const char* command, const FitArgs& a, std::uint64_t seed) {
  soe::RunManifest m;
  m.command = command;
  m.parameters["scan"] = a.scan;
  m.parameters["threshold"] = a.threshold;
  m.parameters["resamples"] = a.resamples;
  m.parameters["lmax"] = a.lmax;
  m.parameters["ell"] = a.ell;
  m.seed = seed;
  m.outputs = {a.out};
  return m;
}

int run_fit(const FitArgs& a) {
  const std::uint64_t seed = resolve_seed(a.seed);
  const soe::ChannelReport r = build_report(a, seed);
  write_file(a.out, soe::report_to_json(r).dump(2) + "\n");
  write_manifest(a.out, fit_manifest("fit", a, seed));
  std::printf("V_max=%.4f+/-%.4f V_min=%.4f+/-%.4f verdict=%s\n", r.v_max, r.v_max_error, r.v_min,
              r.v_min_error, r.verdict.c_str());
  return kOk;
}

int run_report(const FitArgs& a) {
  const std::uint64_t seed = resolve_seed(a.seed);
  const soe::ChannelReport r = build_report(a, seed);
  const std::string text = soe::report_to_text(r);
  write_file(a.out, text);
  write_manifest(a.out, fit_manifest("report", a, seed));
  std::cout << text;
  return kOk;
}

// --- render ---------------------------------------------------------------

struct RenderArgs {
  std::string mode = "TM01";
  int ell = 1;
  double zeta_deg = 0.0;
  double phase_deg = 0.0;
  int grid = 256;
  std::string profile = "vortex";
  double core_radius_um = 15.0;
  std::string out;
};

int run_render(const RenderArgs& a) {
  if (a.grid < 64) throw soe::InputError("grid must be at least 64 pixels");
  const soe::ModeSpace space(std::max(soe::kDefaultLmax, std::abs(a.ell)));

  std::optional<soe::SpinOrbitState> psi;
  bool superposition = false;
  if (a.mode == "TM01") psi = soe::make_vector_mode(space, soe::VectorModeSpec::of(soe::VectorFamily::TM01));
  else if (a.mode == "TE01") psi = soe::make_vector_mode(space, soe::VectorModeSpec::of(soe::VectorFamily::TE01));
  else if (a.mode == "HE21_even") psi = soe::make_vector_mode(space, soe::VectorModeSpec::of(soe::VectorFamily::HE21_even));
  else if (a.mode == "HE21_odd") psi = soe::make_vector_mode(space, soe::VectorModeSpec::of(soe::VectorFamily::HE21_odd));
  else if (a.mode == "custom") psi = soe::make_vector_mode(space, soe::VectorModeSpec::custom(a.ell, deg_to_rad(a.zeta_deg)));
  else if (a.mode == "superposition") {
    if (a.ell == 0) throw soe::InputError("superposition needs --ell != 0");
    psi = soe::oam_superposition(space, std::abs(a.ell), deg_to_rad(a.phase_deg));
    superposition = true;
  } else {
    throw soe::InputError("unknown mode '" + a.mode + "'");
  }

  soe::RenderProfile profile;
  if (a.profile == "fiber") {
    soe::FiberGeometry g;
    g.core_radius_um = a.core_radius_um;
    std::vector<std::pair<int, int>> lp;
    for (int l = 0; l <= std::abs(a.ell); ++l) lp.emplace_back(l, 1);
    profile.fiber = soe::FiberSpec::with_modes(g, lp);
  } else if (a.profile != "vortex") {
    throw soe::InputError("unknown profile '" + a.profile + "'");
  }

  const soe::GridSpec grid{a.grid, 1.0};
  const soe::Raster raster = soe::render_intensity(*psi, grid, profile);
  std::ostringstream pgm;
  soe::write_pgm(pgm, raster);
  write_file(a.out, pgm.str());

  const double radius = soe::ring_radius(*psi, grid, profile);
  const auto ring = soe::angular_profile(raster, grid, radius);
  if (superposition) {
    std::cout << "lobes: " << soe::count_lobes(ring) << '\n';
  } else {
    std::cout << "ring variance ratio: " << soe::angular_variance_ratio(ring) << '\n';
  }

  soe::RunManifest m;
  m.command = "render";
  m.parameters["mode"] = a.mode;
  m.parameters["ell"] = a.ell;
  m.parameters["zeta_deg"] = a.zeta_deg;
  m.parameters["phase_deg"] = a.phase_deg;
  m.parameters["grid"] = a.grid;
  m.parameters["profile"] = a.profile;
  m.parameters["core_radius_um"] = a.core_radius_um;
  m.outputs = {a.out};
  write_manifest(a.out, m);
  return kOk;
}

// --- calibrate ------------------------------------------------------------

struct CalibrateArgs {
  double v_min = 0.0;
  double v_max = 1.0;
  double marked_alpha_deg = 90.0;
  std::string label = "fiber-calibrated";
  std::optional<std::uint64_t> seed;
  int lmax = soe::kDefaultLmax;
  int ell = 1;
  std::string out;
};

int run_calibrate(const CalibrateArgs& a) {
  const std::uint64_t seed = resolve_seed(a.seed);
  soe::CalibrationOptions opts;
  opts.space = soe::ModeSpace(a.lmax);
  opts.ell = a.ell;
  opts.seed = seed;
  soe::FiberChannelParams params;
  try {
    params = soe::calibrate_channel({a.v_min, a.v_max, deg_to_rad(a.marked_alpha_deg)}, opts);
  } catch (const soe::InfeasibleTargetError& e) {
    throw Infeasible(e.what());
  } catch (const std::invalid_argument& e) {
    throw Infeasible(e.what());
  }
  const soe::ChannelSpec spec{a.label, params};
  write_file(a.out, soe::channel_spec_to_json(spec).dump(2) + "\n");

  soe::RunManifest m;
  m.command = "calibrate";
  m.parameters["v_min"] = a.v_min;
  m.parameters["v_max"] = a.v_max;
  m.parameters["marked_alpha_deg"] = a.marked_alpha_deg;
  m.parameters["label"] = a.label;
  m.parameters["lmax"] = a.lmax;
  m.parameters["ell"] = a.ell;
  m.seed = seed;
  m.outputs = {a.out};
  write_manifest(a.out, m);
  std::printf("epsilon_xt=%.9f intermodal_phase_deg=%.6f\n", params.epsilon_xt,
              soe::rad_to_deg(params.intermodal_phase));
  return kOk;
}

template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const Infeasible& e) {
    std::cerr << "error: infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const soe::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-orbit quantum eraser channel simulator"};
  app.set_version_flag("--version", SOE_VERSION);
  app.require_subcommand(1);

  ScanArgs scan;
  auto* scan_cmd = app.add_subcommand("scan", "simulate the two-projection sector scan");
  scan_cmd->add_option("--channel", scan.channel, "channel spec JSON (default: free space)");
  scan_cmd->add_option("--alpha", scan.alpha_deg, "analyzer angles in degrees")->delimiter(',');
  scan_cmd->add_option("--theta-step", scan.theta_step_deg, "sector scan step in degrees");
  scan_cmd->add_option("--photons", scan.photons, "mean photons per setting");
  scan_cmd->add_option("--seed", scan.seed, "RNG seed (default: $SOE_DEFAULT_SEED or 0)");
  scan_cmd->add_option("--out", scan.out, "output CSV")->required();
  scan_cmd->add_option("--threads", scan.threads, "worker threads")->check(CLI::PositiveNumber);
  scan_cmd->add_option("--lmax", scan.lmax, "OAM truncation");
  scan_cmd->add_option("--ell", scan.ell, "interfered OAM pair |l|");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit fringes in a scan CSV and write a JSON report");
  fit_cmd->add_option("--scan", fit.scan, "scan CSV")->required();
  fit_cmd->add_option("--out", fit.out, "report JSON")->required();
  fit_cmd->add_option("--seed", fit.seed, "bootstrap seed");
  fit_cmd->add_option("--threshold", fit.threshold, "cross-talk verdict threshold on V_min");
  fit_cmd->add_option("--resamples", fit.resamples, "bootstrap resamples");
  fit_cmd->add_option("--lmax", fit.lmax, "OAM truncation");
  fit_cmd->add_option("--ell", fit.ell, "interfered OAM pair |l|");

  FitArgs report;
  auto* report_cmd = app.add_subcommand("report", "human-readable channel report from a scan CSV");
  report_cmd->add_option("--scan", report.scan, "scan CSV")->required();
  report_cmd->add_option("--out", report.out, "report text file")->required();
  report_cmd->add_option("--seed", report.seed, "bootstrap seed");
  report_cmd->add_option("--threshold", report.threshold, "cross-talk verdict threshold on V_min");
  report_cmd->add_option("--resamples", report.resamples, "bootstrap resamples");
  report_cmd->add_option("--lmax", report.lmax, "OAM truncation");
  report_cmd->add_option("--ell", report.ell, "interfered OAM pair |l|");

  RenderArgs render;
  auto* render_cmd = app.add_subcommand("render", "render a mode intensity profile to PGM");
  render_cmd->add_option("--mode", render.mode, "TM01, TE01, HE21_even, HE21_odd, custom, superposition");
  render_cmd->add_option("--ell", render.ell, "topological charge for custom/superposition");
  render_cmd->add_option("--zeta-deg", render.zeta_deg, "relative phase for custom vector modes");
  render_cmd->add_option("--phase-deg", render.phase_deg, "relative phase for superpositions");
  render_cmd->add_option("--grid", render.grid, "raster size in pixels");
  render_cmd->add_option("--profile", render.profile, "vortex or fiber");
  render_cmd->add_option("--core-radius-um", render.core_radius_um, "fiber core radius");
  render_cmd->add_option("--out", render.out, "output PGM")->required();

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "fit fiber channel parameters to target visibilities");
  cal_cmd->add_option("--v-min", cal.v_min, "target marked-setting visibility")->required();
  cal_cmd->add_option("--v-max", cal.v_max, "target erased-setting visibility")->required();
  cal_cmd->add_option("--marked-alpha", cal.marked_alpha_deg, "marked analyzer angle (0 or 90)");
  cal_cmd->add_option("--label", cal.label, "channel label");
  cal_cmd->add_option("--seed", cal.seed, "seed for the neighbour-coupling phases");
  cal_cmd->add_option("--lmax", cal.lmax, "OAM truncation");
  cal_cmd->add_option("--ell", cal.ell, "interfered OAM pair |l|");
  cal_cmd->add_option("--out", cal.out, "channel spec JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  if (*scan_cmd) return guarded([&] { return run_scan(scan); });
  if (*fit_cmd) return guarded([&] { return run_fit(fit); });
  if (*report_cmd) return guarded([&] { return run_report(report); });
  if (*render_cmd) return guarded([&] { return run_render(render); });
  if (*cal_cmd) return guarded([&] { return run_calibrate(cal); });
  return kInputError;
}
