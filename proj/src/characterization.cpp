#include "soe/characterization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace soe {

namespace {

constexpr double kAngleTol = 1e-6;
constexpr double kEpsilonCeiling = 0.5;

bool near(double a, double b) { return std::abs(a - b) <= kAngleTol; }

std::uint64_t bootstrap_stream(std::uint64_t seed) { return seed ^ 0x5eedb007ULL; }

}  // namespace

std::vector<VisibilityPoint> visibility_curve(const ScanResult& scan, int resamples,
                                              std::uint64_t seed) {
  const std::vector<double> alphas = scan.alphas();
  if (alphas.size() < 2) throw std::invalid_argument("visibility curve needs >= 2 alpha values");

  std::vector<VisibilityPoint> out;
  out.reserve(alphas.size());
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    const std::vector<ScanRow> rows = scan.rows_at(alphas[ai]);
    std::vector<double> thetas, counts;
    for (const auto& r : rows) {
      thetas.push_back(r.theta);
      counts.push_back(static_cast<double>(r.counts));
    }
    VisibilityPoint pt;
    pt.alpha = alphas[ai];
    pt.fit = fit_fringe(thetas, counts);
    pt.visibility = pt.fit.visibility;

    if (resamples > 1) {
      std::vector<double> draws;
      draws.reserve(static_cast<std::size_t>(resamples));
      std::vector<double> resampled(counts.size());
      for (int b = 0; b < resamples; ++b) {
        std::mt19937_64 rng(setting_seed(bootstrap_stream(seed), ai, static_cast<std::size_t>(b)));
        for (std::size_t i = 0; i < counts.size(); ++i) {
          resampled[i] = counts[i] > 0.0
                             ? static_cast<double>(std::poisson_distribution<std::uint64_t>(counts[i])(rng))
                             : 0.0;
        }
        try {
          draws.push_back(fit_fringe(thetas, resampled).visibility);
        } catch (const UndefinedVisibilityError&) {
        }
      }
      if (draws.size() > 1) {
        double mean = 0.0;
        for (double d : draws) mean += d;
        mean /= static_cast<double>(draws.size());
        double var = 0.0;
        for (double d : draws) var += (d - mean) * (d - mean);
        pt.sigma = std::sqrt(var / static_cast<double>(draws.size() - 1));
      }
    }
    out.push_back(pt);
  }
  return out;
}

double marked_visibility(double epsilon_xt, const CalibrationOptions& opts, double marked_alpha) {
  FiberChannelParams p;
  p.epsilon_xt = epsilon_xt;
  p.seed = opts.seed;
  const SpinOrbitState input = prepare_hybrid_state(opts.space, QPlateSpec{opts.ell / 2.0});
  return analytic_visibility(apply_channel(input, fiber_channel(p, opts.space)), marked_alpha,
                             opts.ell);
}

namespace {

double erased_visibility(double epsilon_xt, double phase, const CalibrationOptions& opts) {
  FiberChannelParams p;
  p.epsilon_xt = epsilon_xt;
  p.intermodal_phase = phase;
  p.seed = opts.seed;
  const SpinOrbitState input = prepare_hybrid_state(opts.space, QPlateSpec{opts.ell / 2.0});
  return analytic_visibility(apply_channel(input, fiber_channel(p, opts.space)),
                             std::numbers::pi / 4, opts.ell);
}

void require_monotone_link(const CalibrationOptions& opts, double marked_alpha) {
  constexpr int points = 50;
  double prev = -1.0;
  for (int i = 0; i < points; ++i) {
    const double eps = kEpsilonCeiling * i / (points - 1);
    const double v = marked_visibility(eps, opts, marked_alpha);
    if (v < prev - 1e-12)
      throw std::logic_error("marked visibility is not monotone in epsilon; bisection invalid");
    prev = v;
  }
}

}  // namespace

double invert_marked_visibility(double v_marked, const CalibrationOptions& opts,
                                double marked_alpha) {
  double lo = 0.0, hi = kEpsilonCeiling;
  if (v_marked <= marked_visibility(lo, opts, marked_alpha)) return 0.0;
  if (v_marked >= marked_visibility(hi, opts, marked_alpha)) return hi;
  for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (marked_visibility(mid, opts, marked_alpha) < v_marked)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

FiberChannelParams calibrate_channel(const CalibrationTargets& targets,
                                     const CalibrationOptions& opts) {
  const auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(targets.v_min) || !in_unit(targets.v_max))
    throw std::invalid_argument("calibration targets must lie in [0, 1]");
  if (targets.v_min > targets.v_max)
    throw std::invalid_argument("calibration needs V_min <= V_max");
  if (!near(targets.marked_alpha, 0.0) && !near(targets.marked_alpha, std::numbers::pi / 2))
    throw std::invalid_argument("marked setting must be alpha = 0 or 90 degrees");

  require_monotone_link(opts, targets.marked_alpha);

  const double v_floor = marked_visibility(0.0, opts, targets.marked_alpha);
  const double v_ceiling = marked_visibility(kEpsilonCeiling, opts, targets.marked_alpha);
  if (targets.v_min > v_ceiling + opts.v_min_tolerance) {
    std::ostringstream os;
    os << "V_min target " << targets.v_min << " exceeds the model maximum " << v_ceiling;
    throw InfeasibleTargetError(os.str());
  }

  FiberChannelParams params;
  params.seed = opts.seed;
  if (targets.v_min > v_floor)
    params.epsilon_xt = invert_marked_visibility(targets.v_min, opts, targets.marked_alpha);
  const double achieved = marked_visibility(params.epsilon_xt, opts, targets.marked_alpha);
  if (std::abs(achieved - targets.v_min) > opts.v_min_tolerance) {
    std::ostringstream os;
    os << "V_min target " << targets.v_min << " unreachable (closest " << achieved << ")";
    throw InfeasibleTargetError(os.str());
  }

  if (params.epsilon_xt == 0.0) {
    if (targets.v_max < 1.0 - opts.v_max_slack) {
      std::ostringstream os;
      os << "V_max target " << targets.v_max << " unreachable without cross-talk";
      throw InfeasibleTargetError(os.str());
    }
    return params;
  }

  // The erased-setting visibility depends on the phase of the |l> <-> |-l> coupling.
  constexpr int grid = 90;
  const double span = std::numbers::pi;
  std::vector<double> phases(grid + 1), values(grid + 1);
  for (int i = 0; i <= grid; ++i) {
    phases[i] = span * i / grid;
    values[i] = erased_visibility(params.epsilon_xt, phases[i], opts);
  }
  for (int i = 0; i < grid; ++i) {
    const double fa = values[i] - targets.v_max, fb = values[i + 1] - targets.v_max;
    if (fa == 0.0) {
      params.intermodal_phase = phases[i];
      return params;
    }
    if ((fa < 0.0) != (fb < 0.0)) {
      double lo = phases[i], hi = phases[i + 1], flo = fa;
      for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = erased_visibility(params.epsilon_xt, mid, opts) - targets.v_max;
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      params.intermodal_phase = 0.5 * (lo + hi);
      return params;
    }
  }
  const auto best = std::min_element(values.begin(), values.end(), [&](double a, double b) {
    return std::abs(a - targets.v_max) < std::abs(b - targets.v_max);
  });
  const double miss = std::abs(*best - targets.v_max);
  if (miss > opts.v_max_slack) {
    std::ostringstream os;
    os << "V_max target " << targets.v_max << " unreachable with V_min " << targets.v_min
       << " (closest " << *best << ")";
    throw InfeasibleTargetError(os.str());
  }
  params.intermodal_phase = phases[static_cast<std::size_t>(best - values.begin())];
  return params;
}

ChannelReport channel_report(const ScanResult& scan, const ReportOptions& opts) {
  const std::vector<double> alphas = scan.alphas();
  std::vector<double> marked;
  bool has_erased = false;
  for (double a : alphas) {
    if (near(a, 0.0) || near(a, std::numbers::pi / 2)) marked.push_back(a);
    if (near(a, std::numbers::pi / 4)) has_erased = true;
  }
  if (marked.empty())
    throw MissingSettingError("scan lacks a marked setting (alpha = 0 or 90 degrees)");
  if (!has_erased) throw MissingSettingError("scan lacks the erased setting (alpha = 45 degrees)");

  ChannelReport report;
  report.channel_label = scan.channel_label;
  report.crosstalk_threshold = opts.crosstalk_threshold;
  report.curve = visibility_curve(scan, opts.resamples, opts.seed);

  const auto [lo, hi] = std::minmax_element(
      report.curve.begin(), report.curve.end(),
      [](const VisibilityPoint& a, const VisibilityPoint& b) { return a.visibility < b.visibility; });
  report.v_max = hi->visibility;
  report.v_max_error = hi->sigma;
  report.alpha_at_max = hi->alpha;
  report.v_min = lo->visibility;
  report.v_min_error = lo->sigma;
  report.alpha_at_min = lo->alpha;

  double v_marked = 1.0, marked_alpha = marked.front();
  for (const auto& pt : report.curve) {
    if (near(pt.alpha, std::numbers::pi / 4)) report.delta = pt.fit.phase;
    for (double m : marked)
      if (pt.alpha == m && pt.visibility < v_marked) {
        v_marked = pt.visibility;
        marked_alpha = m;
      }
  }

  CalibrationOptions copts;
  copts.space = opts.space;
  copts.ell = opts.ell;
  copts.seed = opts.seed;
  report.epsilon_xt = invert_marked_visibility(v_marked, copts, marked_alpha);

  // D is not observable from the sector scan; it comes from the channel estimate.
  FiberChannelParams estimate;
  estimate.epsilon_xt = report.epsilon_xt;
  const SpinOrbitState input = prepare_hybrid_state(opts.space, QPlateSpec{opts.ell / 2.0});
  const DensityOperator rho = apply_channel(input, fiber_channel(estimate, opts.space));
  for (const auto& pt : report.curve) {
    const double d = distinguishability(rho, pt.alpha, opts.ell);
    report.complementarity.push_back(
        {pt.alpha, complementarity_check(pt.visibility, std::clamp(d, 0.0, 1.0),
                                         opts.complementarity_tolerance)});
  }

  report.verdict = report.v_min > opts.crosstalk_threshold ? kVerdictCrosstalk : kVerdictClean;
  return report;
}

}  // namespace soe
