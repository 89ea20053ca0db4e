#pragma once

#include "soe/channel.hpp"
#include "soe/spinorbit.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace soe::testing {

inline constexpr double pi = std::numbers::pi;

inline double deg(double d) { return d * pi / 180.0; }

/// J_n(x) from its 40-term power series. Accurate for moderate x (|x| < ~10).
inline double bessel_j_series(int n, double x) {
  double term = 1.0;
  for (int k = 1; k <= n; ++k) term *= (x / 2.0) / k;  // (x/2)^n / n!
  double sum = term;
  for (int k = 1; k < 40; ++k) {
    term *= -(x / 2.0) * (x / 2.0) / (static_cast<double>(k) * (k + n));
    sum += term;
  }
  return sum;
}

/// K_n(x) = int_0^inf exp(-x cosh t) cosh(n t) dt by the trapezoid rule.
inline double bessel_k_quadrature(int n, double x) {
  const double h = 0.005;
  const double tmax = std::acosh(std::max(1.0, 745.0 / x)) + 1.0;
  double sum = 0.5 * std::exp(-x);
  for (double t = h; t <= tmax; t += h) sum += std::exp(-x * std::cosh(t)) * std::cosh(n * t);
  return sum * h;
}

inline SpinOrbitState random_state(std::mt19937_64& rng, const ModeSpace& space, int max_abs_ell) {
  std::normal_distribution<double> g;
  CVector<double> a = CVector<double>::Zero(space.dim());
  for (Pol p : {Pol::R, Pol::L})
    for (int ell = -max_abs_ell; ell <= max_abs_ell; ++ell)
      a(space.index(p, ell)) = {g(rng), g(rng)};
  return SpinOrbitState(space, a).normalized();
}

inline SpinOrbitState random_state(std::mt19937_64& rng, const ModeSpace& space) {
  return random_state(rng, space, space.lmax());
}

inline FiberChannelParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FiberChannelParams p;
  p.epsilon_xt = u(rng);
  p.pol_rotation = 2 * pi * u(rng);
  p.intermodal_phase = 2 * pi * u(rng);
  p.seed = rng();
  return p;
}

/// The hybrid state after the q-plate, written out by hand: (|R>|l> + |L>|-l>)/sqrt2.
inline SpinOrbitState hybrid_by_hand(const ModeSpace& space, int ell = 1) {
  const double s = 1.0 / std::sqrt(2.0);
  return SpinOrbitState(space)
      .with_amplitude(Pol::R, ell, s)
      .with_amplitude(Pol::L, -ell, s);
}

}  // namespace soe::testing
