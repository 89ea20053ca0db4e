#pragma once

#include "soe/channel.hpp"
#include "soe/elements.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace soe {

/// Azimuthal analyzer (|l> + e^{2 i theta}|-l>)/sqrt2.
struct SectorSpec {
  double theta = 0.0;
  int ell = 1;
};

CVectorX sector_state(const ModeSpace& space, const SectorSpec& spec);

/// I_pol (x) |theta><theta|.
Operator sector_projector(const ModeSpace& space, const SectorSpec& spec);

/// (1/2)(1 + sin 2a cos(2t + delta)).
double ideal_probability(double alpha, double theta, double delta);

/// QWP(45 deg) followed by |alpha><alpha| (x) I, applied to a density operator.
/// The result is sub-normalized; its trace is the polarization-stage pass probability.
DensityOperator analyze_polarization(const DensityOperator& rho, double alpha);

/// Sector-scan detection probability conditioned on the polarization stage passing.
/// Returns 0 when nothing passes the analyzer.
double detection_probability(const DensityOperator& rho, double alpha, double theta, int ell = 1);
double detection_probability(const SpinOrbitState& psi, double alpha, double theta, int ell = 1);

/// Populations and coherence of the projected OAM state inside span{|l>, |-l>}.
struct TwoPathBlock {
  double plus = 0.0;          // <l|rho|l>
  double minus = 0.0;         // <-l|rho|-l>
  std::complex<double> coherence;  // <l|rho|-l>
};

TwoPathBlock two_path_block(const DensityOperator& projected, int ell);

/// Fringe visibility of P(alpha, theta) computed directly from the state, 2|c|/(a+b).
double analytic_visibility(const DensityOperator& rho, double alpha, int ell = 1);

/// D = |p(+l) - p(-l)|, populations renormalized inside the two-path subspace.
double distinguishability(const DensityOperator& projected, int ell = 1);
double distinguishability(const DensityOperator& rho, double alpha, int ell);

/// Marginal OAM distribution (polarization traced out), normalized by the trace.
struct OamSpectrum {
  int lmax = 0;
  std::vector<double> weights;  // index l + lmax

  double at(int ell) const { return weights.at(static_cast<std::size_t>(ell + lmax)); }
  double total() const;
};

OamSpectrum oam_spectrum(const DensityOperator& rho);
OamSpectrum oam_spectrum(const SpinOrbitState& psi);

struct ComplementarityRecord {
  double visibility = 0.0;
  double distinguishability = 0.0;
  bool satisfied = true;
};

inline constexpr double kComplementarityTol = 1e-6;

ComplementarityRecord complementarity_check(double visibility, double distinguishability,
                                            double tol = kComplementarityTol);

enum class VisibilityMethod { fitted, raw_extrema };

/// (Pmax - Pmin)/(Pmax + Pmin) from a fixed-alpha theta scan. Needs >= 8 samples spanning
/// at least pi/2 in theta.
double visibility(std::span<const double> thetas, std::span<const double> counts,
                  VisibilityMethod method = VisibilityMethod::fitted);

struct ScanConfig {
  std::vector<double> alphas;
  std::vector<double> thetas;
  std::uint64_t photons = 100000;
  std::uint64_t seed = 0;
  int ell = 1;

  void validate() const;
};

/// theta = 0, step, 2 step, ... < 2 pi.
std::vector<double> theta_grid(double step);

struct ScanRow {
  double alpha = 0.0;
  double theta = 0.0;
  double ideal_prob = 0.0;
  std::uint64_t counts = 0;
};

struct ScanResult {
  std::string channel_label;
  std::uint64_t seed = 0;
  std::uint64_t photons = 0;
  std::vector<ScanRow> rows;  // sorted by (alpha, theta)

  /// Distinct alpha values in ascending order.
  std::vector<double> alphas() const;
  std::vector<ScanRow> rows_at(double alpha) const;
};

/// RNG seed for the setting (alpha index, theta index); independent of evaluation order.
std::uint64_t setting_seed(std::uint64_t seed, std::size_t alpha_index, std::size_t theta_index);

/// Poisson counts with mean N P(alpha, theta) for the given input state sent through `channel`.
/// `threads` > 1 evaluates alpha rows in parallel; output is identical for any thread count.
ScanResult simulate_counts(const ScanConfig& config, const ChannelModel& channel,
                           const SpinOrbitState& input, unsigned threads = 1);

/// Convenience overload using the q = l/2 hybrid state.
ScanResult simulate_counts(const ScanConfig& config, const ChannelModel& channel,
                           unsigned threads = 1);

}  // namespace soe
