#pragma once

#include "soe/fiber.hpp"
#include "soe/spinorbit.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace soe {

/// Square raster spanning [-half_width, half_width] on both axes.
struct GridSpec {
  int size = 256;
  double half_width = 1.0;

  void validate() const;
  /// Physical coordinate of the centre of pixel i (x grows with column, y with decreasing row).
  double coordinate(int i) const;
  double pixel_pitch() const { return 2.0 * half_width / size; }
};

/// Row-major non-negative intensity map.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  double at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  double max() const;
  /// Bilinear sample at fractional (row, col) pixel-centre coordinates.
  double sample(double row, double col) const;
};

/// Radial amplitude model used for each |l| component.
struct RenderProfile {
  /// Unset: vortex profile (r/w)^|l| exp(-r^2/w^2) with the ring of the largest |l| at
  /// half the grid half-width. Set: fiber radial field LP_{|l| 1} on a grid spanning
  /// 1.5 core radii.
  std::optional<FiberSpec> fiber;
};

/// Intensity sum over both circular components of |sum_l c_{p,l} f_|l|(r) e^{i l phi}|^2.
Raster render_intensity(const SpinOrbitState& psi, const GridSpec& grid,
                        const RenderProfile& profile = {});

/// Radius (physical units of the grid) at which the annulus of the rendered state peaks.
double ring_radius(const SpinOrbitState& psi, const GridSpec& grid,
                   const RenderProfile& profile = {});

/// Intensity sampled on a circle of `radius` (physical units), `samples` points from phi = 0.
std::vector<double> angular_profile(const Raster& raster, const GridSpec& grid, double radius,
                                    int samples = 1440);

/// Number of contiguous azimuthal arcs above `threshold` x max. A flat ring has no lobes.
int count_lobes(const std::vector<double>& angular, double threshold = 0.5);

/// var / mean^2 of an angular profile.
double angular_variance_ratio(const std::vector<double>& angular);

/// Balanced scalar superposition (|l> + e^{i phase}|-l>)/sqrt2 with horizontal polarization.
SpinOrbitState oam_superposition(const ModeSpace& space, int ell, double phase);

/// ASCII PGM (P2), maxval 65535, intensities scaled to the raster maximum.
void write_pgm(std::ostream& os, const Raster& raster);

}  // namespace soe
