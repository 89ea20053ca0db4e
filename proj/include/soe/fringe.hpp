#pragma once

#include <span>
#include <stdexcept>

namespace soe {

class UndefinedVisibilityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Least-squares fit of A (1 + V cos(2 theta + phi)).
struct FringeFit {
  double amplitude = 0.0;
  double visibility = 0.0;
  double phase = 0.0;  // radians, wrapped to (-pi, pi]
  double residual_rms = 0.0;
  double amplitude_error = 0.0;
  double visibility_error = 0.0;
  double phase_error = 0.0;  // infinite when the fringe has no measurable contrast
  bool phase_undetermined = false;
};

inline constexpr int kMinFringeSamples = 8;

/// Closed-form fit: linear in (A, A V cos phi, -A V sin phi) against (1, cos 2t, sin 2t).
/// Requires >= 8 samples and positive total signal; V is clipped to [0, 1].
FringeFit fit_fringe(std::span<const double> thetas, std::span<const double> values);

}  // namespace soe
