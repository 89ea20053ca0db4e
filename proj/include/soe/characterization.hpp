#pragma once

#include "soe/channel.hpp"
#include "soe/fringe.hpp"
#include "soe/measurement.hpp"

#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace soe {

class InfeasibleTargetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingSettingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct VisibilityPoint {
  double alpha = 0.0;
  double visibility = 0.0;
  double sigma = 0.0;
  FringeFit fit;
};

inline constexpr int kBootstrapResamples = 200;

/// Fitted visibility per alpha with Poisson-bootstrap uncertainty.
std::vector<VisibilityPoint> visibility_curve(const ScanResult& scan,
                                              int resamples = kBootstrapResamples,
                                              std::uint64_t seed = 0);

struct CalibrationTargets {
  double v_min = 0.0;
  double v_max = 1.0;
  double marked_alpha = std::numbers::pi / 2;
};

struct CalibrationOptions {
  ModeSpace space{};
  int ell = 1;
  double v_min_tolerance = 1e-3;
  /// Largest accepted |V_max(model) - target| when the target lies outside the model's range.
  double v_max_slack = 0.01;
  std::uint64_t seed = 0;
};

/// Noise-free marked-setting visibility of the fiber channel as a function of epsilon.
double marked_visibility(double epsilon_xt, const CalibrationOptions& opts = {},
                         double marked_alpha = std::numbers::pi / 2);

/// Bisection of epsilon in [0, 0.5] against a marked-setting visibility.
double invert_marked_visibility(double v_marked, const CalibrationOptions& opts = {},
                                double marked_alpha = std::numbers::pi / 2);

/// Fiber parameters whose noise-free scan reproduces the target visibilities.
FiberChannelParams calibrate_channel(const CalibrationTargets& targets,
                                     const CalibrationOptions& opts = {});

struct AlphaComplementarity {
  double alpha = 0.0;
  ComplementarityRecord record;
};

struct ReportOptions {
  double crosstalk_threshold = 0.1;
  /// Statistical allowance on V^2 + D^2 for fitted visibilities.
  double complementarity_tolerance = 0.02;
  int resamples = kBootstrapResamples;
  std::uint64_t seed = 0;
  ModeSpace space{};
  int ell = 1;
};

struct ChannelReport {
  std::string channel_label;
  double v_max = 0.0;
  double v_max_error = 0.0;
  double alpha_at_max = 0.0;
  double v_min = 0.0;
  double v_min_error = 0.0;
  double alpha_at_min = 0.0;
  double delta = 0.0;
  double epsilon_xt = 0.0;
  double crosstalk_threshold = 0.1;
  std::vector<VisibilityPoint> curve;
  std::vector<AlphaComplementarity> complementarity;
  std::string verdict;
};

inline constexpr const char* kVerdictClean = "clean channel";
inline constexpr const char* kVerdictCrosstalk = "cross-talk detected";

/// Needs a marked setting (alpha = 0 or 90 deg) and the erased setting (alpha = 45 deg).
ChannelReport channel_report(const ScanResult& scan, const ReportOptions& opts = {});

}  // namespace soe
