// Acceptance suite: one PASS/FAIL line per criterion.

#include "soe/characterization.hpp"
#include "soe/fiber.hpp"
#include "soe/render.hpp"

#include "test_util.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <unistd.h>

using namespace soe;
using soe::testing::deg;
using soe::testing::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, const std::function<Outcome()>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s [%s; %.2f s]\n", o.pass ? "PASS" : "FAIL", id, title,
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScanConfig scan_config(std::vector<double> alphas_deg, std::uint64_t seed) {
  ScanConfig c;
  for (double a : alphas_deg) c.alphas.push_back(deg(a));
  c.thetas = theta_grid(deg(5));
  c.photons = 100000;
  c.seed = seed;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  const ModeSpace space;

  criterion(1, "ideal pipeline probability equals the closed-form fringe", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rho = apply_channel(prepare_hybrid_state(space), free_space_channel(space));
    const double delta = predict_delta();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 2 * pi);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double a = u(rng), t = u(rng);
      worst = std::max(worst, std::abs(detection_probability(rho, a, t) - ideal_probability(a, t, delta)));
    }
    const double secs = seconds_since(t0);
    return Outcome{worst <= 1e-10 && secs < 1.0, fmt("max error %.2e, %.3f s", worst, secs)};
  });

  criterion(2, "fitted visibility follows |sin 2 alpha| at N = 1e5", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto scan = simulate_counts(scan_config({0, 15, 22.5, 30, 45}, 2), free_space_channel(space));
    const auto curve = visibility_curve(scan, 0);
    double worst = 0.0;
    for (const auto& p : curve) worst = std::max(worst, std::abs(p.visibility - std::abs(std::sin(2 * p.alpha))));
    const double secs = seconds_since(t0);
    return Outcome{worst <= 0.01 && secs < 10.0, fmt("max |V - |sin 2a|| = %.4f, %.3f s", worst, secs)};
  });

  criterion(3, "free-space report endpoints", [&] {
    const auto scan = simulate_counts(scan_config({0, 22.5, 45, 67.5, 90}, 3), free_space_channel(space));
    const auto r = channel_report(scan);
    return Outcome{r.v_max >= 0.99 && r.v_min <= 0.02,
                   fmt("V_max %.4f +/- %.4f, V_min %.4f +/- %.4f", r.v_max, r.v_max_error, r.v_min, r.v_min_error)};
  });

  criterion(4, "fiber calibration round trip to V_min 0.17, V_max 0.98", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto params = calibrate_channel({0.17, 0.98});
    const auto scan = simulate_counts(scan_config({0, 45, 90}, 4), fiber_channel(params, space));
    const auto r = channel_report(scan);
    const double secs = seconds_since(t0);
    const bool ok = std::abs(r.v_min - 0.17) <= 0.01 && std::abs(r.v_max - 0.98) <= 0.01 && secs < 30.0;
    return Outcome{ok, fmt("eps %.5f, V_min %.4f, V_max %.4f, %.3f s", params.epsilon_xt, r.v_min, r.v_max, secs)};
  });

  criterion(5, "complementarity on random channels and the ideal pipeline", [&] {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, pi);
    const std::vector<double> grid{0, 15, 22.5, 30, 45, 60, 67.5, 75, 90};
    const auto input = prepare_hybrid_state(space);
    double worst_random = 0.0;
    for (int c = 0; c < 50; ++c) {
      const auto ch = compose(fiber_channel(soe::testing::random_params(rng), space),
                              dephasing_channel(1, u(rng), space));
      const auto rho = apply_channel(input, ch);
      const auto curve = visibility_curve(simulate_counts(scan_config(grid, 100 + c), ch), 0);
      for (const auto& p : curve) {
        const double d = distinguishability(rho, p.alpha, 1);
        worst_random = std::max(worst_random, p.visibility * p.visibility + d * d);
      }
    }
    const auto ideal = free_space_channel(space);
    const auto rho = apply_channel(input, ideal);
    double worst_ideal = 0.0;
    for (const auto& p : visibility_curve(simulate_counts(scan_config(grid, 6), ideal), 0)) {
      const double d = distinguishability(rho, p.alpha, 1);
      worst_ideal = std::max(worst_ideal, std::abs(p.visibility * p.visibility + d * d - 1.0));
    }
    return Outcome{worst_random <= 1.02 && worst_ideal <= 0.02,
                   fmt("random max V^2+D^2 %.4f, ideal max |V^2+D^2-1| %.4f", worst_random, worst_ideal)};
  });

  criterion(6, "q-plate maps R|0> to L|-1> and L|0> to R|+1>", [&] {
    const auto r = apply_qplate(make_scalar_mode(space, Pol::R, OamIndex{0}), QPlateSpec{0.5});
    const auto l = apply_qplate(make_scalar_mode(space, Pol::L, OamIndex{0}), QPlateSpec{0.5});
    const double err = std::max(std::abs(r.amplitude(Pol::L, -1) - 1.0), std::abs(l.amplitude(Pol::R, 1) - 1.0));
    const double stray = std::max(std::abs(r.norm() - 1.0), std::abs(l.norm() - 1.0));
    return Outcome{err <= 1e-12 && stray <= 1e-12, fmt("amplitude error %.1e", err)};
  });

  criterion(7, "superpositions render 2|l| lobes", [&] {
    std::string detail;
    bool ok = true;
    for (int ell : {1, 2, 3, 10}) {
      const ModeSpace s(std::max(3, ell));
      const GridSpec grid{256, 1.0};
      const auto psi = oam_superposition(s, ell, 0.0);
      const int lobes = count_lobes(angular_profile(render_intensity(psi, grid), grid, ring_radius(psi, grid)));
      ok = ok && lobes == 2 * ell;
      detail += fmt("%sl=%d:%d", detail.empty() ? "" : ", ", ell, lobes);
    }
    return Outcome{ok, detail};
  });

  criterion(8, "fiber radial profile", [&] {
    const FiberGeometry g;
    const auto spec = FiberSpec::with_modes(g, {{0, 1}, {1, 1}, {2, 1}, {3, 1}});
    const double a = g.core_radius_um, v = g.v_number();
    double boundary = 0.0, dispersion = 0.0, oracle = 0.0;
    for (const auto& m : spec.modes) {
      const double core = std::cyl_bessel_j(m.ell, m.u * 1.0) / std::cyl_bessel_j(m.ell, m.u);
      boundary = std::max({boundary, std::abs(core - 1.0), std::abs(radial_profile(spec, m.ell, 1, a) - 1.0),
                           std::abs(radial_profile(spec, m.ell, 1, std::nextafter(a, 0.0)) - 1.0)});
      dispersion = std::max(dispersion, std::abs(m.u * m.u + m.w * m.w - v * v));
      for (int k = 0; k < 100; ++k) {
        const double r = a * k / 100.0;
        const double expected =
            soe::testing::bessel_j_series(m.ell, m.u * r / a) / soe::testing::bessel_j_series(m.ell, m.u);
        oracle = std::max(oracle, std::abs(radial_profile(spec, m.ell, 1, r) - expected));
      }
    }
    return Outcome{boundary <= 1e-9 && dispersion <= 1e-9 && oracle <= 1e-8,
                   fmt("boundary %.1e, |u^2+w^2-V^2| %.1e, oracle %.1e", boundary, dispersion, oracle)};
  });

  criterion(9, "OAM spectrum endpoints", [&] {
    const auto rho = DensityOperator::pure(prepare_hybrid_state(space));
    const auto marked = oam_spectrum(analyze_polarization(rho, 0.0));
    const double peak = *std::max_element(marked.weights.begin(), marked.weights.end());
    const auto erased = oam_spectrum(analyze_polarization(rho, pi / 4));
    const double balance = std::max(std::abs(erased.at(1) - 0.5), std::abs(erased.at(-1) - 0.5));
    const auto fiber = fiber_channel(calibrate_channel({0.17, 0.98}), space);
    const auto leaked = oam_spectrum(apply_channel(prepare_hybrid_state(space), fiber));
    const double outside = 1.0 - leaked.at(1) - leaked.at(-1);
    return Outcome{peak >= 0.999 && balance <= 1e-9 && outside > 1e-6,
                   fmt("marked peak %.6f, erased imbalance %.1e, fiber weight outside +-1 %.2e", peak, balance, outside)};
  });

  criterion(10, "CLI scan is byte-identical across runs and thread counts", [&] {
    const auto dir = std::filesystem::temp_directory_path() / ("soe_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    std::vector<std::string> outputs;
    bool ran = true;
    const std::pair<int, unsigned> runs[] = {{0, 1}, {1, 1}, {2, 4}, {3, 16}};
    for (auto [i, threads] : runs) {
      const auto out = dir / ("scan" + std::to_string(i) + ".csv");
      const std::string cmd = std::string("\"") + SOE_BIN + "\" scan --alpha 0,15,30,45,60,75,90 --seed 42 --threads " +
                              std::to_string(threads) + " --out \"" + out.string() + "\" > /dev/null";
      ran = ran && std::system(cmd.c_str()) == 0;
      outputs.push_back(slurp(out));
    }
    std::filesystem::remove_all(dir);
    bool same = ran && !outputs[0].empty();
    for (const auto& o : outputs) same = same && o == outputs[0];
    return Outcome{same, fmt("%zu runs, %zu bytes each", outputs.size(), outputs[0].size())};
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
