#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace soe {

/// Thrown when an OAM index or q-plate output leaves the truncated space.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Thrown when two objects live on differently truncated spaces.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using Jones = Eigen::Matrix<std::complex<Real>, 2, 2>;
template <typename Real>
using JonesVector = Eigen::Matrix<std::complex<Real>, 2, 1>;

/// Circular polarization basis element. R is stored first.
enum class Pol : int { R = 0, L = 1 };

inline const char* to_string(Pol p) { return p == Pol::R ? "R" : "L"; }

inline constexpr int kDefaultLmax = 3;

/// Signed topological charge. Validity is checked against a ModeSpace.
struct OamIndex {
  int value = 0;
  constexpr OamIndex() = default;
  constexpr explicit OamIndex(int v) : value(v) {}
  friend constexpr bool operator==(OamIndex, OamIndex) = default;
};

/// Truncated polarization x OAM space with l in [-lmax, lmax].
///
/// Amplitudes are laid out polarization-major: index = pol * (2 lmax + 1) + (l + lmax).
class ModeSpace {
 public:
  explicit ModeSpace(int lmax = kDefaultLmax) : lmax_(lmax) {
    if (lmax < 1) throw RangeError("lmax must be >= 1, got " + std::to_string(lmax));
  }

  int lmax() const { return lmax_; }
  int oam_dim() const { return 2 * lmax_ + 1; }
  int dim() const { return 2 * oam_dim(); }
  bool contains(int ell) const { return ell >= -lmax_ && ell <= lmax_; }

  void require(int ell) const {
    if (!contains(ell))
      throw RangeError("OAM index " + std::to_string(ell) + " outside truncation [-" +
                       std::to_string(lmax_) + ", " + std::to_string(lmax_) + "]");
  }

  int oam_offset(int ell) const { return ell + lmax_; }
  int index(Pol p, int ell) const { return static_cast<int>(p) * oam_dim() + oam_offset(ell); }

  friend bool operator==(const ModeSpace&, const ModeSpace&) = default;

 private:
  int lmax_;
};

inline void require_same_space(const ModeSpace& a, const ModeSpace& b) {
  if (a != b)
    throw DimensionError("mode spaces differ (lmax " + std::to_string(a.lmax()) + " vs " +
                         std::to_string(b.lmax()) + ")");
}

// Polarization conventions. H = (R + L)/sqrt2, V = (R - L)/(i sqrt2); equivalently
// R = (H + iV)/sqrt2, L = (H - iV)/sqrt2.

/// Columns are |R> and |L> expressed in (H, V) coordinates.
template <typename Real>
Jones<Real> hv_from_circular() {
  using C = std::complex<Real>;
  const Real s = Real(1) / std::sqrt(Real(2));
  Jones<Real> t;
  t << C(s, 0), C(s, 0), C(0, s), C(0, -s);
  return t;
}

template <typename Real>
Jones<Real> circular_from_hv() {
  return hv_from_circular<Real>().adjoint();
}

/// Linear polarization cos(a)|H> + sin(a)|V> in circular coordinates.
template <typename Real>
JonesVector<Real> linear_polarization(Real angle) {
  const Real s = Real(1) / std::sqrt(Real(2));
  JonesVector<Real> v;
  v << s * std::polar(Real(1), -angle), s * std::polar(Real(1), angle);
  return v;
}

template <typename Real>
JonesVector<Real> circular_polarization(Pol p) {
  JonesVector<Real> v = JonesVector<Real>::Zero();
  v(static_cast<int>(p)) = Real(1);
  return v;
}

/// Pure photon state over the truncated spin-orbit space.
template <typename Real>
class BasicSpinOrbitState {
 public:
  using Scalar = std::complex<Real>;

  explicit BasicSpinOrbitState(ModeSpace space = ModeSpace{})
      : space_(space), amps_(CVector<Real>::Zero(space.dim())) {}

  BasicSpinOrbitState(ModeSpace space, CVector<Real> amplitudes)
      : space_(space), amps_(std::move(amplitudes)) {
    if (amps_.size() != space_.dim())
      throw DimensionError("amplitude vector has size " + std::to_string(amps_.size()) +
                           ", expected " + std::to_string(space_.dim()));
  }

  const ModeSpace& space() const { return space_; }
  const CVector<Real>& amplitudes() const { return amps_; }

  Scalar amplitude(Pol p, int ell) const {
    space_.require(ell);
    return amps_(space_.index(p, ell));
  }

  BasicSpinOrbitState with_amplitude(Pol p, int ell, Scalar value) const {
    space_.require(ell);
    BasicSpinOrbitState out = *this;
    out.amps_(space_.index(p, ell)) = value;
    return out;
  }

  Real squared_norm() const { return amps_.squaredNorm(); }
  Real norm() const { return amps_.norm(); }

  BasicSpinOrbitState normalized() const {
    const Real n = norm();
    if (n == Real(0)) throw std::domain_error("cannot normalize the zero state");
    return BasicSpinOrbitState(space_, amps_ / n);
  }

 private:
  ModeSpace space_;
  CVector<Real> amps_;
};

using SpinOrbitState = BasicSpinOrbitState<double>;

/// Product state |pol> (x) |ell> for an arbitrary polarization Jones vector (circular coordinates).
template <typename Real>
BasicSpinOrbitState<Real> make_product_state(const ModeSpace& space, const JonesVector<Real>& pol,
                                             OamIndex ell) {
  space.require(ell.value);
  CVector<Real> a = CVector<Real>::Zero(space.dim());
  a(space.index(Pol::R, ell.value)) = pol(0);
  a(space.index(Pol::L, ell.value)) = pol(1);
  return BasicSpinOrbitState<Real>(space, std::move(a));
}

template <typename Real = double>
BasicSpinOrbitState<Real> make_scalar_mode(const ModeSpace& space, Pol pol, OamIndex ell) {
  return make_product_state<Real>(space, circular_polarization<Real>(pol), ell);
}

enum class VectorFamily { TM01, TE01, HE21_even, HE21_odd, custom };

/// Vector mode (|R>|l> + e^{i zeta}|L>|-l>)/sqrt2. The named families fix (l, zeta).
struct VectorModeSpec {
  VectorFamily family = VectorFamily::custom;
  int ell = 1;
  double zeta = 0.0;

  static VectorModeSpec of(VectorFamily f) {
    constexpr double pi = std::numbers::pi;
    switch (f) {
      case VectorFamily::TM01: return {f, +1, 0.0};
      case VectorFamily::TE01: return {f, +1, pi};
      case VectorFamily::HE21_even: return {f, -1, 0.0};
      case VectorFamily::HE21_odd: return {f, -1, pi};
      case VectorFamily::custom: break;
    }
    return {};
  }
  static VectorModeSpec custom(int ell, double zeta) { return {VectorFamily::custom, ell, zeta}; }
};

template <typename Real = double>
BasicSpinOrbitState<Real> make_vector_mode(const ModeSpace& space, const VectorModeSpec& spec) {
  space.require(spec.ell);
  const Real s = Real(1) / std::sqrt(Real(2));
  CVector<Real> a = CVector<Real>::Zero(space.dim());
  a(space.index(Pol::R, spec.ell)) += s;
  a(space.index(Pol::L, -spec.ell)) += std::polar(s, static_cast<Real>(spec.zeta));
  return BasicSpinOrbitState<Real>(space, std::move(a));
}

/// <a|b>, conjugate-linear in the first argument.
template <typename Real>
std::complex<Real> inner_product(const BasicSpinOrbitState<Real>& a,
                                 const BasicSpinOrbitState<Real>& b) {
  require_same_space(a.space(), b.space());
  return a.amplitudes().dot(b.amplitudes());
}

/// Equality up to a global phase factor.
template <typename Real>
bool equal_up_to_phase(const BasicSpinOrbitState<Real>& a, const BasicSpinOrbitState<Real>& b,
                       Real tol = Real(1e-9)) {
  require_same_space(a.space(), b.space());
  const std::complex<Real> overlap = inner_product(a, b);
  const Real mag = std::abs(overlap);
  if (mag == Real(0)) return (a.amplitudes() - b.amplitudes()).norm() <= tol;
  const std::complex<Real> phase = overlap / mag;
  return (a.amplitudes() * phase - b.amplitudes()).norm() <= tol;
}

/// Linear operator on the spin-orbit space.
template <typename Real>
struct BasicOperator {
  ModeSpace space;
  CMatrix<Real> matrix;

  static BasicOperator identity(const ModeSpace& s) {
    return {s, CMatrix<Real>::Identity(s.dim(), s.dim())};
  }
};

using Operator = BasicOperator<double>;

template <typename Real>
BasicSpinOrbitState<Real> operator*(const BasicOperator<Real>& op,
                                    const BasicSpinOrbitState<Real>& psi) {
  require_same_space(op.space, psi.space());
  return BasicSpinOrbitState<Real>(psi.space(), op.matrix * psi.amplitudes());
}

template <typename Real>
BasicOperator<Real> operator*(const BasicOperator<Real>& a, const BasicOperator<Real>& b) {
  require_same_space(a.space, b.space);
  return {a.space, a.matrix * b.matrix};
}

/// pol (x) I_oam on the given space.
template <typename Real>
BasicOperator<Real> lift_polarization(const ModeSpace& space, const Jones<Real>& pol) {
  const int n = space.oam_dim();
  CMatrix<Real> m = CMatrix<Real>::Zero(space.dim(), space.dim());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      m.block(i * n, j * n, n, n) = pol(i, j) * CMatrix<Real>::Identity(n, n);
  return {space, std::move(m)};
}

/// I_pol (x) oam on the given space.
template <typename Real>
BasicOperator<Real> lift_oam(const ModeSpace& space, const CMatrix<Real>& oam) {
  const int n = space.oam_dim();
  if (oam.rows() != n || oam.cols() != n)
    throw DimensionError("OAM operator has wrong dimension");
  CMatrix<Real> m = CMatrix<Real>::Zero(space.dim(), space.dim());
  m.block(0, 0, n, n) = oam;
  m.block(n, n, n, n) = oam;
  return {space, std::move(m)};
}

template <typename Real>
bool is_unitary(const BasicOperator<Real>& op, Real tol) {
  const auto n = op.matrix.rows();
  return (op.matrix.adjoint() * op.matrix - CMatrix<Real>::Identity(n, n)).cwiseAbs().maxCoeff() <=
         tol;
}

}  // namespace soe
