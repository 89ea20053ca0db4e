#include "soe/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace soe {

void FiberGeometry::validate() const {
  if (!(core_radius_um > 0.0)) throw std::invalid_argument("core radius must be positive");
  if (!(wavelength_nm > 0.0)) throw std::invalid_argument("wavelength must be positive");
  if (!(n_core > n_cladding) || !(n_cladding > 0.0))
    throw std::invalid_argument("core index must exceed cladding index");
}

double FiberGeometry::numerical_aperture() const {
  return std::sqrt(n_core * n_core - n_cladding * n_cladding);
}

double FiberGeometry::v_number() const {
  validate();
  const double k = 2.0 * std::numbers::pi / (wavelength_nm * 1e-3);  // per micrometer
  return k * core_radius_um * numerical_aperture();
}

const FiberModeParams& FiberSpec::mode(int ell, int p) const {
  const int order = std::abs(ell);
  for (const auto& m : modes)
    if (m.ell == order && m.p == p) return m;
  throw std::out_of_range("fiber spec has no LP_" + std::to_string(order) + std::to_string(p) +
                          " mode");
}

FiberSpec FiberSpec::with_modes(const FiberGeometry& g,
                                const std::vector<std::pair<int, int>>& lp) {
  FiberSpec spec{g, {}};
  for (auto [ell, p] : lp) spec.modes.push_back(solve_fiber_mode(g, ell, p));
  return spec;
}

namespace {

double bessel_j(int n, double x) {
  if (n < 0) return (n % 2 == 0 ? 1.0 : -1.0) * std::cyl_bessel_j(-n, x);
  return std::cyl_bessel_j(n, x);
}

// K_{-n} = K_n.
double bessel_k(int n, double x) { return std::cyl_bessel_k(std::abs(n), x); }

}  // namespace

double lp_dispersion(int ell, double u, double v_number) {
  const int l = std::abs(ell);
  const double w = std::sqrt(std::max(0.0, v_number * v_number - u * u));
  const double core = u * bessel_j(l - 1, u);
  if (w == 0.0) return core;
  return core + w * bessel_j(l, u) * bessel_k(l - 1, w) / bessel_k(l, w);
}

double continuity_residual(int ell, double u, double w) {
  const int l = std::abs(ell);
  const double lhs = u * bessel_j(l - 1, u) * bessel_k(l, w);
  const double rhs = -w * bessel_k(l - 1, w) * bessel_j(l, u);
  const double scale = std::abs(lhs) + std::abs(rhs);
  return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

FiberModeParams solve_fiber_mode(const FiberGeometry& g, int ell, int p) {
  if (p < 1) throw std::invalid_argument("radial mode index p must be >= 1");
  const double v = g.v_number();
  const int l = std::abs(ell);

  // Roots are separated by roughly pi; a fine scan brackets each one.
  const int steps = std::max(4000, static_cast<int>(v * 200));
  const double h = v / steps;
  int found = 0;
  double a = h * 1e-3;
  double fa = lp_dispersion(l, a, v);
  for (int i = 1; i < steps; ++i) {
    const double b = i * h;
    const double fb = lp_dispersion(l, b, v);
    if (fa == 0.0 || (fa < 0.0) != (fb < 0.0)) {
      if (++found == p) {
        double lo = a, hi = b, flo = fa;
        if (fa == 0.0) hi = lo;
        for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi;
             ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = lp_dispersion(l, mid, v);
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        const double u = 0.5 * (lo + hi);
        return {l, p, u, std::sqrt(v * v - u * u)};
      }
    }
    a = b;
    fa = fb;
  }
  std::ostringstream os;
  os << "LP_" << l << p << " is below cutoff for V=" << v << " (found " << found
     << " guided roots)";
  throw BelowCutoffError(os.str());
}

double radial_profile(const FiberSpec& fiber, int ell, int p, double r_um) {
  if (!(r_um >= 0.0)) throw std::invalid_argument("radius must be non-negative");
  const FiberModeParams& m = fiber.mode(ell, p);
  const double a = fiber.geometry.core_radius_um;
  const double x = r_um / a;
  if (r_um < a) return bessel_j(m.ell, m.u * x) / bessel_j(m.ell, m.u);
  return bessel_k(m.ell, m.w * x) / bessel_k(m.ell, m.w);
}

}  // namespace soe
