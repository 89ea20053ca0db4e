#pragma once

#include <stdexcept>
#include <vector>

namespace soe {

class BelowCutoffError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Step-index fiber geometry.
struct FiberGeometry {
  double core_radius_um = 15.0;
  double n_core = 1.4570;
  double n_cladding = 1.4440;
  double wavelength_nm = 633.0;

  void validate() const;
  double numerical_aperture() const;
  double v_number() const;
};

/// Weakly-guiding LP mode parameters: u scales the core Bessel argument, w the cladding one.
struct FiberModeParams {
  int ell = 0;  // stored as |l|
  int p = 1;
  double u = 0.0;
  double w = 0.0;
};

struct FiberSpec {
  FiberGeometry geometry;
  std::vector<FiberModeParams> modes;

  const FiberModeParams& mode(int ell, int p) const;
  /// Solves and appends LP_{|l| p} for every requested pair.
  static FiberSpec with_modes(const FiberGeometry& g, const std::vector<std::pair<int, int>>& lp);
};

/// Scaled dispersion function u J_{l-1}(u) + w J_l(u) K_{l-1}(w)/K_l(w), with w = sqrt(V^2 - u^2).
/// Its zeros in (0, V) are the guided LP_{l p} modes; it has no poles there.
double lp_dispersion(int ell, double u, double v_number);

/// Relative mismatch of the log-derivatives of the core and cladding fields at r = a.
double continuity_residual(int ell, double u, double w);

/// p-th root (p >= 1) of the weakly-guiding dispersion relation for LP_{|l| p}.
FiberModeParams solve_fiber_mode(const FiberGeometry& g, int ell, int p);

/// Radial field: J_|l|(u r/a)/J_|l|(u) inside the core, K_|l|(w r/a)/K_|l|(w) outside.
double radial_profile(const FiberSpec& fiber, int ell, int p, double r_um);

}  // namespace soe
