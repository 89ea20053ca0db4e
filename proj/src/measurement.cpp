#include "soe/measurement.hpp"

#include "soe/fringe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace soe {

CVectorX sector_state(const ModeSpace& space, const SectorSpec& spec) {
  space.require(spec.ell);
  if (spec.ell < 1) throw RangeError("sector analyzer needs l >= 1");
  const double s = 1.0 / std::sqrt(2.0);
  CVectorX v = CVectorX::Zero(space.oam_dim());
  v(space.oam_offset(spec.ell)) = s;
  v(space.oam_offset(-spec.ell)) = std::polar(s, 2.0 * spec.theta);
  return v;
}

Operator sector_projector(const ModeSpace& space, const SectorSpec& spec) {
  const CVectorX v = sector_state(space, spec);
  return lift_oam<double>(space, v * v.adjoint());
}

double ideal_probability(double alpha, double theta, double delta) {
  return 0.5 * (1.0 + std::sin(2.0 * alpha) * std::cos(2.0 * theta + delta));
}

DensityOperator analyze_polarization(const DensityOperator& rho, double alpha) {
  const Operator stage =
      polarization_projector(rho.space, AnalyzerSpec{alpha}) * waveplate_operator(rho.space, detection_qwp());
  return stage * rho;
}

TwoPathBlock two_path_block(const DensityOperator& projected, int ell) {
  projected.space.require(ell);
  const CMatrixX m = projected.oam_marginal();
  const int p = projected.space.oam_offset(ell);
  const int n = projected.space.oam_offset(-ell);
  return {m(p, p).real(), m(n, n).real(), m(p, n)};
}

double detection_probability(const DensityOperator& rho, double alpha, double theta, int ell) {
  const DensityOperator projected = analyze_polarization(rho, alpha);
  const double pass = projected.trace();
  if (pass <= 1e-15) return 0.0;
  const CVectorX v = sector_state(rho.space, SectorSpec{theta, ell});
  const double hit = (v.adjoint() * projected.oam_marginal() * v)(0, 0).real();
  return std::clamp(hit / pass, 0.0, 1.0);
}

double detection_probability(const SpinOrbitState& psi, double alpha, double theta, int ell) {
  return detection_probability(DensityOperator::pure(psi), alpha, theta, ell);
}

double analytic_visibility(const DensityOperator& rho, double alpha, int ell) {
  const TwoPathBlock b = two_path_block(analyze_polarization(rho, alpha), ell);
  const double pop = b.plus + b.minus;
  if (pop <= 1e-15) return 0.0;
  return std::min(1.0, 2.0 * std::abs(b.coherence) / pop);
}

double distinguishability(const DensityOperator& projected, int ell) {
  const TwoPathBlock b = two_path_block(projected, ell);
  const double pop = b.plus + b.minus;
  if (pop <= 1e-15) throw std::domain_error("projection leaves no weight on the +/-l paths");
  return std::abs(b.plus - b.minus) / pop;
}

double distinguishability(const DensityOperator& rho, double alpha, int ell) {
  return distinguishability(analyze_polarization(rho, alpha), ell);
}

double OamSpectrum::total() const {
  double t = 0.0;
  for (double w : weights) t += w;
  return t;
}

OamSpectrum oam_spectrum(const DensityOperator& rho) {
  const double tr = rho.trace();
  if (!(tr > 0.0)) throw std::domain_error("OAM spectrum of a zero state");
  const CMatrixX m = rho.oam_marginal();
  OamSpectrum out{rho.space.lmax(), std::vector<double>(static_cast<std::size_t>(m.rows()))};
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.weights[static_cast<std::size_t>(i)] = m(i, i).real() / tr;
  return out;
}

OamSpectrum oam_spectrum(const SpinOrbitState& psi) {
  return oam_spectrum(DensityOperator::pure(psi));
}

ComplementarityRecord complementarity_check(double visibility, double distinguishability,
                                            double tol) {
  const auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(visibility) || !in_unit(distinguishability)) {
    std::ostringstream os;
    os << "complementarity inputs must lie in [0, 1] (V=" << visibility
       << ", D=" << distinguishability << ")";
    throw std::invalid_argument(os.str());
  }
  return {visibility, distinguishability,
          visibility * visibility + distinguishability * distinguishability <= 1.0 + tol};
}

double visibility(std::span<const double> thetas, std::span<const double> counts,
                  VisibilityMethod method) {
  if (thetas.size() != counts.size())
    throw std::invalid_argument("theta and count sequences differ in length");
  if (thetas.size() < static_cast<std::size_t>(kMinFringeSamples))
    throw std::invalid_argument("visibility needs at least 8 theta samples");
  const auto [tmin, tmax] = std::minmax_element(thetas.begin(), thetas.end());
  if (*tmax - *tmin < std::numbers::pi / 2 - 1e-12)
    throw std::invalid_argument("theta samples span less than half a fringe period");
  const auto [cmin, cmax] = std::minmax_element(counts.begin(), counts.end());
  if (*cmax <= 0.0) throw UndefinedVisibilityError("all counts are zero");

  if (method == VisibilityMethod::raw_extrema) return (*cmax - *cmin) / (*cmax + *cmin);
  return fit_fringe(thetas, counts).visibility;
}

void ScanConfig::validate() const {
  if (alphas.empty()) throw std::invalid_argument("scan needs at least one alpha");
  if (thetas.empty()) throw std::invalid_argument("scan needs at least one theta");
  if (photons < 1) throw std::invalid_argument("photon number must be >= 1");
  if (ell < 1) throw std::invalid_argument("sector analyzer needs l >= 1");
  for (double a : alphas)
    if (!std::isfinite(a)) throw std::invalid_argument("alpha must be finite");
  for (double t : thetas)
    if (!std::isfinite(t)) throw std::invalid_argument("theta must be finite");
}

std::vector<double> theta_grid(double step) {
  if (!(step > 0.0) || step > std::numbers::pi)
    throw std::invalid_argument("theta step must lie in (0, pi]");
  std::vector<double> out;
  const double end = 2.0 * std::numbers::pi - 1e-9;
  for (int k = 0; k * step < end; ++k) out.push_back(k * step);
  return out;
}

std::vector<double> ScanResult::alphas() const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (out.empty() || out.back() != r.alpha) out.push_back(r.alpha);
  return out;
}

std::vector<ScanRow> ScanResult::rows_at(double alpha) const {
  std::vector<ScanRow> out;
  for (const auto& r : rows)
    if (r.alpha == alpha) out.push_back(r);
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::uint64_t setting_seed(std::uint64_t seed, std::size_t alpha_index, std::size_t theta_index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(alpha_index));
  return splitmix64(h ^ (static_cast<std::uint64_t>(theta_index) << 20));
}

ScanResult simulate_counts(const ScanConfig& config, const ChannelModel& channel,
                           const SpinOrbitState& input, unsigned threads) {
  config.validate();
  require_same_space(input.space(), channel.space());
  const DensityOperator rho = apply_channel(input, channel);
  const std::vector<double> alphas = sorted_unique(config.alphas);
  const std::vector<double> thetas = sorted_unique(config.thetas);
  const double n = static_cast<double>(config.photons);

  ScanResult out{channel.label(), config.seed, config.photons,
                 std::vector<ScanRow>(alphas.size() * thetas.size())};

  const auto fill_alpha = [&](std::size_t ai) {
    for (std::size_t ti = 0; ti < thetas.size(); ++ti) {
      ScanRow& row = out.rows[ai * thetas.size() + ti];
      row.alpha = alphas[ai];
      row.theta = thetas[ti];
      row.ideal_prob = detection_probability(rho, row.alpha, row.theta, config.ell);
      const double mean = n * row.ideal_prob;
      if (mean > 0.0) {
        std::mt19937_64 rng(setting_seed(config.seed, ai, ti));
        std::poisson_distribution<std::uint64_t> poisson(mean);
        row.counts = poisson(rng);
      }
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(alphas.size())));
  if (workers == 1) {
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) fill_alpha(ai);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t ai = w; ai < alphas.size(); ai += workers) fill_alpha(ai);
      });
  }
  return out;
}

ScanResult simulate_counts(const ScanConfig& config, const ChannelModel& channel,
                           unsigned threads) {
  const SpinOrbitState input =
      prepare_hybrid_state(channel.space(), QPlateSpec{config.ell / 2.0});
  return simulate_counts(config, channel, input, threads);
}

}  // namespace soe
