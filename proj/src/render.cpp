#include "soe/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

namespace soe {

void GridSpec::validate() const {
  if (size <= 0) throw std::invalid_argument("grid size must be positive");
  if (!(half_width > 0.0)) throw std::invalid_argument("grid half-width must be positive");
}

double GridSpec::coordinate(int i) const { return (i + 0.5) * pixel_pitch() - half_width; }

double Raster::max() const {
  return pixels.empty() ? 0.0 : *std::max_element(pixels.begin(), pixels.end());
}

double Raster::sample(double row, double col) const {
  row = std::clamp(row, 0.0, static_cast<double>(height - 1));
  col = std::clamp(col, 0.0, static_cast<double>(width - 1));
  const int r0 = std::min(static_cast<int>(row), height - 2 < 0 ? 0 : height - 2);
  const int c0 = std::min(static_cast<int>(col), width - 2 < 0 ? 0 : width - 2);
  const int r1 = std::min(r0 + 1, height - 1);
  const int c1 = std::min(c0 + 1, width - 1);
  const double fr = row - r0, fc = col - c0;
  return (1 - fr) * ((1 - fc) * at(r0, c0) + fc * at(r0, c1)) +
         fr * ((1 - fc) * at(r1, c0) + fc * at(r1, c1));
}

namespace {

int largest_occupied_order(const SpinOrbitState& psi) {
  const ModeSpace& s = psi.space();
  int order = 0;
  for (int ell = -s.lmax(); ell <= s.lmax(); ++ell)
    for (Pol p : {Pol::R, Pol::L})
      if (std::abs(psi.amplitudes()(s.index(p, ell))) > 1e-12) order = std::max(order, std::abs(ell));
  return order;
}

// Radial amplitude for order |l| at normalized radius rho = r / half_width.
class RadialModel {
 public:
  RadialModel(const SpinOrbitState& psi, const RenderProfile& profile) : profile_(profile) {
    const int order = largest_occupied_order(psi);
    if (!profile_.fiber) {
      constexpr double ring = 0.5;
      waist_ = order == 0 ? ring : ring / std::sqrt(order / 2.0);
      ring_ = order == 0 ? 0.0 : ring;
    } else {
      // Peak of the outermost annulus, located on a fine radial grid.
      const double a = profile_.fiber->geometry.core_radius_um;
      double best = 0.0;
      ring_ = 0.0;
      constexpr int n = 4000;
      for (int i = 0; i <= n; ++i) {
        const double rho = static_cast<double>(i) / n;
        const double f = std::abs(radial_profile(*profile_.fiber, order, 1, rho * kFiberSpan * a));
        if (f > best) {
          best = f;
          ring_ = rho;
        }
      }
    }
    if (!profile_.fiber) {
      for (int l = 0; l <= order; ++l) peak_.push_back(vortex(l, waist_ * std::sqrt(l / 2.0)));
    }
  }

  double operator()(int order, double rho) const {
    if (profile_.fiber) {
      const double a = profile_.fiber->geometry.core_radius_um;
      return radial_profile(*profile_.fiber, order, 1, rho * kFiberSpan * a);
    }
    return vortex(order, rho) / peak_[order];
  }

  double ring() const { return ring_; }

  static constexpr double kFiberSpan = 1.5;

 private:
  double vortex(int order, double rho) const {
    const double x = rho / waist_;
    return std::pow(x, order) * std::exp(-x * x);
  }

  const RenderProfile& profile_;
  double waist_ = 1.0;
  double ring_ = 0.0;
  std::vector<double> peak_;
};

}  // namespace

Raster render_intensity(const SpinOrbitState& psi, const GridSpec& grid,
                        const RenderProfile& profile) {
  grid.validate();
  const RadialModel radial(psi, profile);
  const ModeSpace& s = psi.space();
  Raster out{grid.size, grid.size, std::vector<double>(static_cast<std::size_t>(grid.size) * grid.size)};

  for (int row = 0; row < grid.size; ++row) {
    const double y = -grid.coordinate(row);
    for (int col = 0; col < grid.size; ++col) {
      const double x = grid.coordinate(col);
      const double rho = std::hypot(x, y) / grid.half_width;
      const double phi = std::atan2(y, x);
      double intensity = 0.0;
      for (Pol p : {Pol::R, Pol::L}) {
        std::complex<double> field = 0.0;
        for (int ell = -s.lmax(); ell <= s.lmax(); ++ell) {
          const auto c = psi.amplitudes()(s.index(p, ell));
          if (c == 0.0) continue;
          field += c * radial(std::abs(ell), rho) * std::polar(1.0, ell * phi);
        }
        intensity += std::norm(field);
      }
      out.pixels[static_cast<std::size_t>(row) * grid.size + col] = intensity;
    }
  }
  return out;
}

double ring_radius(const SpinOrbitState& psi, const GridSpec& grid, const RenderProfile& profile) {
  grid.validate();
  return RadialModel(psi, profile).ring() * grid.half_width;
}

std::vector<double> angular_profile(const Raster& raster, const GridSpec& grid, double radius,
                                    int samples) {
  std::vector<double> out(samples);
  for (int k = 0; k < samples; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / samples;
    const double x = radius * std::cos(phi), y = radius * std::sin(phi);
    const double col = (x + grid.half_width) / grid.pixel_pitch() - 0.5;
    const double row = (grid.half_width - y) / grid.pixel_pitch() - 0.5;
    out[k] = raster.sample(row, col);
  }
  return out;
}

int count_lobes(const std::vector<double>& angular, double threshold) {
  if (angular.empty()) return 0;
  const double peak = *std::max_element(angular.begin(), angular.end());
  if (peak <= 0.0) return 0;
  const double cut = threshold * peak;
  const std::size_t n = angular.size();
  int rising = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const bool prev = angular[(k + n - 1) % n] > cut;
    const bool cur = angular[k] > cut;
    if (cur && !prev) ++rising;
  }
  return rising;
}

double angular_variance_ratio(const std::vector<double>& angular) {
  if (angular.empty()) return 0.0;
  const double n = static_cast<double>(angular.size());
  const double mean = std::accumulate(angular.begin(), angular.end(), 0.0) / n;
  double var = 0.0;
  for (double v : angular) var += (v - mean) * (v - mean);
  var /= n;
  return mean == 0.0 ? 0.0 : var / (mean * mean);
}

SpinOrbitState oam_superposition(const ModeSpace& space, int ell, double phase) {
  space.require(ell);
  if (ell == 0) throw std::invalid_argument("superposition needs l != 0");
  const auto h = linear_polarization<double>(0.0);
  const double s = 1.0 / std::sqrt(2.0);
  CVector<double> a = CVector<double>::Zero(space.dim());
  for (Pol p : {Pol::R, Pol::L}) {
    a(space.index(p, ell)) += s * h(static_cast<int>(p));
    a(space.index(p, -ell)) += s * std::polar(1.0, phase) * h(static_cast<int>(p));
  }
  return SpinOrbitState(space, a);
}

void write_pgm(std::ostream& os, const Raster& raster) {
  constexpr int maxval = 65535;
  const double peak = raster.max();
  os << "P2\n" << raster.width << ' ' << raster.height << '\n' << maxval << '\n';
  for (int row = 0; row < raster.height; ++row) {
    for (int col = 0; col < raster.width; ++col) {
      const double v = peak > 0.0 ? raster.at(row, col) / peak : 0.0;
      const long level = std::lround(std::clamp(v, 0.0, 1.0) * maxval);
      if (col) os << ' ';
      os << level;
    }
    os << '\n';
  }
}

}  // namespace soe
