#pragma once

#include "soe/spinorbit.hpp"

#include <cmath>
#include <sstream>

namespace soe {

/// q-plate of charge q. Only half-integer charges are physical here.
struct QPlateSpec {
  double q = 0.5;

  int twice_q() const {
    const double t = 2.0 * q;
    const double r = std::round(t);
    if (std::abs(t - r) > 1e-12) {
      std::ostringstream os;
      os << "q-plate charge must be a half-integer, got q=" << q;
      throw std::invalid_argument(os.str());
    }
    return static_cast<int>(r);
  }
};

enum class WaveplateKind { quarter, half };

struct WaveplateSpec {
  WaveplateKind kind = WaveplateKind::quarter;
  double fast_axis = 0.0;  // radians from horizontal
};

struct AnalyzerSpec {
  double alpha = 0.0;  // transmission axis, radians from horizontal
};

/// Amplitudes below this magnitude are treated as unoccupied when moving OAM.
inline constexpr double kOccupancyFloor = 1e-12;

/// |R>|l> -> |L>|l - 2q>,  |L>|l> -> |R>|l + 2q>.
template <typename Real>
BasicSpinOrbitState<Real> apply_qplate(const BasicSpinOrbitState<Real>& psi, const QPlateSpec& spec) {
  const int shift = spec.twice_q();
  const ModeSpace& s = psi.space();
  CVector<Real> out = CVector<Real>::Zero(s.dim());
  for (int ell = -s.lmax(); ell <= s.lmax(); ++ell) {
    const auto r = psi.amplitudes()(s.index(Pol::R, ell));
    const auto l = psi.amplitudes()(s.index(Pol::L, ell));
    if (std::abs(r) > kOccupancyFloor) {
      const int target = ell - shift;
      if (!s.contains(target))
        throw RangeError("q-plate maps |R>|" + std::to_string(ell) + "> to OAM " +
                         std::to_string(target) + ", outside truncation");
      out(s.index(Pol::L, target)) += r;
    }
    if (std::abs(l) > kOccupancyFloor) {
      const int target = ell + shift;
      if (!s.contains(target))
        throw RangeError("q-plate maps |L>|" + std::to_string(ell) + "> to OAM " +
                         std::to_string(target) + ", outside truncation");
      out(s.index(Pol::R, target)) += l;
    }
  }
  return BasicSpinOrbitState<Real>(s, std::move(out));
}

/// Linear retarder in circular coordinates.
///
/// In (H, V) coordinates the retarder is Rot(-t) diag(e^{-i g/2}, e^{+i g/2}) Rot(t), with
/// Rot(t) = [[cos t, sin t], [-sin t, cos t]], t the fast-axis angle and g the retardance.
template <typename Real>
Jones<Real> retarder_jones(Real retardance, Real fast_axis) {
  using C = std::complex<Real>;
  const Real c = std::cos(fast_axis), s = std::sin(fast_axis);
  Jones<Real> rot;
  rot << C(c), C(s), C(-s), C(c);
  Jones<Real> phase = Jones<Real>::Zero();
  phase(0, 0) = std::polar(Real(1), -retardance / 2);
  phase(1, 1) = std::polar(Real(1), retardance / 2);
  const Jones<Real> hv = rot.transpose() * phase * rot;
  return circular_from_hv<Real>() * hv * hv_from_circular<Real>();
}

template <typename Real>
Jones<Real> waveplate_jones(const WaveplateSpec& spec) {
  const Real pi = std::numbers::pi_v<Real>;
  const Real retardance = spec.kind == WaveplateKind::quarter ? pi / 2 : pi;
  return retarder_jones<Real>(retardance, static_cast<Real>(spec.fast_axis));
}

/// Rotation of the linear polarization frame by `angle` (H -> cos|H> + sin|V>).
template <typename Real>
Jones<Real> polarization_rotation_jones(Real angle) {
  using C = std::complex<Real>;
  const Real c = std::cos(angle), s = std::sin(angle);
  Jones<Real> hv;
  hv << C(c), C(-s), C(s), C(c);
  return circular_from_hv<Real>() * hv * hv_from_circular<Real>();
}

template <typename Real = double>
BasicOperator<Real> waveplate_operator(const ModeSpace& space, const WaveplateSpec& spec) {
  return lift_polarization<Real>(space, waveplate_jones<Real>(spec));
}

template <typename Real>
BasicSpinOrbitState<Real> apply_waveplate(const BasicSpinOrbitState<Real>& psi,
                                          const WaveplateSpec& spec) {
  return waveplate_operator<Real>(psi.space(), spec) * psi;
}

/// |alpha><alpha| (x) I_oam.
template <typename Real = double>
BasicOperator<Real> polarization_projector(const ModeSpace& space, const AnalyzerSpec& spec) {
  const JonesVector<Real> a = linear_polarization<Real>(static_cast<Real>(spec.alpha));
  return lift_polarization<Real>(space, Jones<Real>(a * a.adjoint()));
}

/// The QWP at 45 degrees used to move the hybrid state to the linear basis.
inline WaveplateSpec detection_qwp() {
  return {WaveplateKind::quarter, std::numbers::pi / 4};
}

/// q-plate acting on |H>|0>: (|R>|2q> + |L>|-2q>)/sqrt2.
template <typename Real = double>
BasicSpinOrbitState<Real> prepare_hybrid_state(const ModeSpace& space, const QPlateSpec& qp = {}) {
  const auto h = make_product_state<Real>(space, linear_polarization<Real>(Real(0)), OamIndex{0});
  return apply_qplate(h, qp);
}

/// Fringe phase offset that enters P(a, t) = (1 + sin2a cos(2t + delta))/2 under the fixed
/// Jones convention. Derived from the QWP matrix rather than hard-coded: the QWP maps the
/// hybrid state to (|H>|l> + e^{i d}|V>|-l>)/sqrt2 and the sector projector reads the
/// relative phase with the opposite sign, so delta = -d.
template <typename Real = double>
Real predict_delta() {
  const Jones<Real> q = waveplate_jones<Real>(detection_qwp());
  // Images of |R> and |L> in (H, V) coordinates.
  const Jones<Real> hv = hv_from_circular<Real>() * q;
  const std::complex<Real> r_to_h = hv(0, 0);
  const std::complex<Real> l_to_v = hv(1, 1);
  const Real d = std::arg(l_to_v / r_to_h);
  return -d;
}

}  // namespace soe
