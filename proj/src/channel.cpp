#include "soe/channel.hpp"

#include "soe/elements.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <sstream>

namespace soe {

DensityOperator DensityOperator::pure(const SpinOrbitState& psi) {
  const CVectorX& a = psi.amplitudes();
  return {psi.space(), a * a.adjoint()};
}

double DensityOperator::purity() const {
  return (rho * rho).trace().real();
}

bool DensityOperator::is_hermitian(double tol) const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double DensityOperator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMatrixX> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

CMatrixX DensityOperator::oam_marginal() const {
  const int n = space.oam_dim();
  return rho.block(0, 0, n, n) + rho.block(n, n, n, n);
}

DensityOperator operator*(const Operator& op, const DensityOperator& d) {
  require_same_space(op.space, d.space);
  return {d.space, op.matrix * d.rho * op.matrix.adjoint()};
}

void FiberChannelParams::validate() const {
  if (!(epsilon_xt >= 0.0 && epsilon_xt <= 1.0)) {
    std::ostringstream os;
    os << "epsilon_xt must lie in [0, 1], got " << epsilon_xt;
    throw std::invalid_argument(os.str());
  }
  if (!std::isfinite(pol_rotation) || !std::isfinite(intermodal_phase))
    throw std::invalid_argument("channel angles must be finite");
}

ChannelModel::ChannelModel(std::string label, ModeSpace space, std::vector<CMatrixX> terms,
                           std::optional<FiberChannelParams> params)
    : label_(std::move(label)), space_(space), terms_(std::move(terms)), params_(params) {
  if (terms_.empty()) throw std::invalid_argument("channel needs at least one operator term");
  for (const auto& k : terms_)
    if (k.rows() != space_.dim() || k.cols() != space_.dim())
      throw DimensionError("channel term has wrong dimension");
  const double err = trace_preservation_error();
  if (err > kTracePreservationTol) {
    std::ostringstream os;
    os << "channel '" << label_ << "' is not trace preserving (error " << err << ")";
    throw std::invalid_argument(os.str());
  }
}

double ChannelModel::trace_preservation_error() const {
  CMatrixX sum = CMatrixX::Zero(space_.dim(), space_.dim());
  for (const auto& k : terms_) sum += k.adjoint() * k;
  sum -= CMatrixX::Identity(space_.dim(), space_.dim());
  return sum.cwiseAbs().maxCoeff();
}

ChannelModel free_space_channel(const ModeSpace& space) {
  return ChannelModel("free-space", space, {CMatrixX::Identity(space.dim(), space.dim())});
}

namespace {

CMatrixX hermitian_exp_minus_i(const CMatrixX& generator, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrixX> es(generator);
  const Eigen::VectorXd& w = es.eigenvalues();
  CVectorX phases(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) phases(i) = std::polar(1.0, -t * w(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

CMatrixX fiber_oam_unitary(const FiberChannelParams& params, const ModeSpace& space) {
  params.validate();
  const int n = space.oam_dim();
  const int lmax = space.lmax();
  const double chi = std::asin(std::sqrt(params.epsilon_xt));
  if (chi == 0.0) return CMatrixX::Identity(n, n);

  CMatrixX g = CMatrixX::Zero(n, n);
  const auto coupling = std::polar(1.0, params.intermodal_phase);
  for (int ell = 1; ell <= lmax; ++ell) {
    g(space.oam_offset(ell), space.oam_offset(-ell)) += coupling;
    g(space.oam_offset(-ell), space.oam_offset(ell)) += std::conj(coupling);
  }

  // Mirror-symmetric outward couplings commute with the pair term, so the |l>,|-l>
  // interference is governed by chi alone.
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int ell = 1; ell < lmax; ++ell) {
    const auto c = std::polar(1.0, angle(rng));
    for (int sign : {+1, -1}) {
      const int a = space.oam_offset(sign * ell);
      const int b = space.oam_offset(sign * (ell + 1));
      g(b, a) += c;
      g(a, b) += std::conj(c);
    }
  }
  return hermitian_exp_minus_i(g, chi);
}

ChannelModel fiber_channel(const FiberChannelParams& params, const ModeSpace& space,
                           std::string label) {
  const CMatrixX oam = fiber_oam_unitary(params, space);
  const Jones<double> pol = polarization_rotation_jones(params.pol_rotation);
  const Operator u = lift_polarization(space, pol) * lift_oam(space, oam);
  return ChannelModel(std::move(label), space, {u.matrix}, params);
}

ChannelModel dephasing_channel(int ell, double phase, const ModeSpace& space) {
  space.require(ell);
  std::vector<CMatrixX> terms;
  for (double sign : {+1.0, -1.0}) {
    CVectorX diag = CVectorX::Constant(space.dim(), std::sqrt(0.5));
    for (Pol p : {Pol::R, Pol::L})
      diag(space.index(p, -ell)) *= std::polar(1.0, sign * phase);
    terms.emplace_back(diag.asDiagonal());
  }
  return ChannelModel("dephasing", space, std::move(terms));
}

ChannelModel compose(const ChannelModel& first, const ChannelModel& second) {
  require_same_space(first.space(), second.space());
  std::vector<CMatrixX> terms;
  terms.reserve(first.terms().size() * second.terms().size());
  for (const auto& b : second.terms())
    for (const auto& a : first.terms()) terms.push_back(b * a);
  return ChannelModel(first.label() + "+" + second.label(), first.space(), std::move(terms));
}

DensityOperator apply_channel(const DensityOperator& d, const ChannelModel& ch) {
  require_same_space(d.space, ch.space());
  CMatrixX out = CMatrixX::Zero(d.space.dim(), d.space.dim());
  for (const auto& k : ch.terms()) out += k * d.rho * k.adjoint();
  return {d.space, std::move(out)};
}

DensityOperator apply_channel(const SpinOrbitState& psi, const ChannelModel& ch) {
  return apply_channel(DensityOperator::pure(psi), ch);
}

}  // namespace soe
