#include "soe/fringe.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace soe {

FringeFit fit_fringe(std::span<const double> thetas, std::span<const double> values) {
  if (thetas.size() != values.size())
    throw std::invalid_argument("theta and value sequences differ in length");
  const auto n = static_cast<Eigen::Index>(thetas.size());
  if (n < kMinFringeSamples)
    throw std::invalid_argument("fringe fit needs at least " + std::to_string(kMinFringeSamples) +
                                " samples, got " + std::to_string(n));
  const double total = std::accumulate(values.begin(), values.end(), 0.0);
  if (!(total > 0.0)) throw UndefinedVisibilityError("fringe samples carry no signal");

  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = std::cos(2.0 * thetas[i]);
    design(i, 2) = std::sin(2.0 * thetas[i]);
    y(i) = values[i];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) throw std::invalid_argument("theta samples do not resolve the fringe");
  const Eigen::Vector3d c = qr.solve(y);

  FringeFit fit;
  const Eigen::VectorXd residual = y - design * c;
  fit.residual_rms = std::sqrt(residual.squaredNorm() / static_cast<double>(n));

  const double a = c(0);
  const double contrast = std::hypot(c(1), c(2));
  fit.amplitude = a;
  fit.visibility = a > 0.0 ? std::min(1.0, contrast / a) : 0.0;
  fit.phase = std::atan2(-c(2), c(1));

  // Parameter covariance from the residual variance; zero for exact data.
  const double dof = static_cast<double>(n - 3);
  const double sigma2 = dof > 0 ? residual.squaredNorm() / dof : 0.0;
  const Eigen::Matrix3d cov = sigma2 * (design.transpose() * design).inverse();
  fit.amplitude_error = std::sqrt(cov(0, 0));

  const double scale = std::max(std::abs(a), std::numeric_limits<double>::min());
  if (contrast <= 1e-12 * scale) {
    fit.visibility = 0.0;
    fit.phase = 0.0;
    fit.phase_undetermined = true;
    fit.phase_error = std::numeric_limits<double>::infinity();
    fit.visibility_error = std::sqrt(cov(1, 1) + cov(2, 2)) / scale;
    return fit;
  }

  // Delta-method propagation to V = |c12| / a and phi = atan2(-c2, c1).
  const double v = contrast / a;
  Eigen::Vector3d gv(-v / a, c(1) / (contrast * a), c(2) / (contrast * a));
  Eigen::Vector3d gp(0.0, c(2) / (contrast * contrast), -c(1) / (contrast * contrast));
  fit.visibility_error = std::sqrt(std::max(0.0, gv.dot(cov * gv)));
  fit.phase_error = std::sqrt(std::max(0.0, gp.dot(cov * gp)));
  return fit;
}

}  // namespace soe
