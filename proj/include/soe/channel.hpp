#pragma once

#include "soe/spinorbit.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace soe {

using CVectorX = CVector<double>;
using CMatrixX = CMatrix<double>;

/// Mixed state on the spin-orbit space.
struct DensityOperator {
  ModeSpace space;
  CMatrixX rho;

  static DensityOperator pure(const SpinOrbitState& psi);

  double trace() const { return rho.trace().real(); }
  double purity() const;
  bool is_hermitian(double tol) const;
  double min_eigenvalue() const;

  /// Reduced OAM density (polarization traced out).
  CMatrixX oam_marginal() const;
};

DensityOperator operator*(const Operator& op, const DensityOperator& d);

/// Parameters of the parametric fiber-like disturbance.
struct FiberChannelParams {
  double epsilon_xt = 0.0;        // OAM cross-talk strength in [0, 1]
  double pol_rotation = 0.0;      // radians
  double intermodal_phase = 0.0;  // radians, phase of the |l> <-> |-l> coupling
  std::uint64_t seed = 0;         // draws the nearest-neighbour coupling phases

  void validate() const;
};

/// Completely positive trace-preserving map given by its operator terms.
class ChannelModel {
 public:
  ChannelModel(std::string label, ModeSpace space, std::vector<CMatrixX> terms,
               std::optional<FiberChannelParams> params = std::nullopt);

  const std::string& label() const { return label_; }
  const ModeSpace& space() const { return space_; }
  const std::vector<CMatrixX>& terms() const { return terms_; }
  const std::optional<FiberChannelParams>& params() const { return params_; }

  /// max |sum K^dagger K - I|.
  double trace_preservation_error() const;

 private:
  std::string label_;
  ModeSpace space_;
  std::vector<CMatrixX> terms_;
  std::optional<FiberChannelParams> params_;
};

inline constexpr double kTracePreservationTol = 1e-9;

ChannelModel free_space_channel(const ModeSpace& space = ModeSpace{});

/// U_pol(pol_rotation) (x) U_oam, U_oam = exp(-i chi (G_pair + G_nb)), chi = asin(sqrt(eps)).
/// G_pair couples |l> and |-l> with phase e^{i intermodal_phase}; G_nb couples |l> to
/// |l + sgn l> with seeded phases shared by the +l and -l chains.
ChannelModel fiber_channel(const FiberChannelParams& params, const ModeSpace& space = ModeSpace{},
                           std::string label = "fiber");

/// OAM unitary of the fiber channel, exposed for tests.
CMatrixX fiber_oam_unitary(const FiberChannelParams& params, const ModeSpace& space);

/// Equal-weight two-term channel applying phase +phi or -phi to every |-ell> component.
ChannelModel dephasing_channel(int ell, double phase, const ModeSpace& space = ModeSpace{});

/// `first` followed by `second`.
ChannelModel compose(const ChannelModel& first, const ChannelModel& second);

DensityOperator apply_channel(const DensityOperator& d, const ChannelModel& ch);
DensityOperator apply_channel(const SpinOrbitState& psi, const ChannelModel& ch);

}  // namespace soe
