#include "soe/render.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace soe;
using soe::testing::pi;

namespace {

std::vector<long> parse_pgm(std::istream& is, int& w, int& h) {
  std::string magic;
  long maxval = 0;
  is >> magic >> w >> h >> maxval;
  REQUIRE(magic == "P2");
  REQUIRE(maxval == 65535);
  std::vector<long> px(static_cast<std::size_t>(w) * h);
  for (auto& v : px) is >> v;
  REQUIRE(is);
  return px;
}

int lobes_of(int ell, double phase, int grid_size = 256) {
  const ModeSpace s(std::max(3, std::abs(ell)));
  const GridSpec grid{grid_size, 1.0};
  const auto psi = oam_superposition(s, ell, phase);
  const auto img = render_intensity(psi, grid);
  return count_lobes(angular_profile(img, grid, ring_radius(psi, grid)));
}

}  // namespace

TEST_CASE("balanced superpositions show 2|l| lobes") {
  for (int ell : {1, 2, 3, 10}) {
    CAPTURE(ell);
    CHECK(lobes_of(ell, 0.0) == 2 * ell);
    CHECK(lobes_of(ell, 1.1) == 2 * ell);
    CHECK(lobes_of(-ell, 0.0) == 2 * ell);
  }
}

TEST_CASE("single vortices and vector modes render as uniform rings") {
  const ModeSpace s;
  const GridSpec grid{256, 1.0};
  for (auto fam : {VectorFamily::TM01, VectorFamily::TE01, VectorFamily::HE21_even}) {
    const auto psi = make_vector_mode(s, VectorModeSpec::of(fam));
    const auto img = render_intensity(psi, grid);
    const auto ring = angular_profile(img, grid, ring_radius(psi, grid));
    CHECK(angular_variance_ratio(ring) < 1e-3);
    CHECK(count_lobes(ring) == 0);
  }
  const auto vortex = make_scalar_mode(s, Pol::R, OamIndex{3});
  const auto img = render_intensity(vortex, grid);
  CHECK(angular_variance_ratio(angular_profile(img, grid, ring_radius(vortex, grid))) < 1e-3);
  // Dark core.
  CHECK(img.at(128, 128) < 1e-3 * img.max());
}

TEST_CASE("the ring of the largest order sits at half the half-width") {
  const ModeSpace s;
  const GridSpec grid{256, 2.0};
  for (int ell = 1; ell <= 3; ++ell) {
    const auto psi = oam_superposition(s, ell, 0.0);
    CHECK(ring_radius(psi, grid) == doctest::Approx(1.0));
    const auto img = render_intensity(psi, grid);
    // Brightest pixel along the lobe direction phi = 0 lies at the ring radius.
    int best = 0;
    for (int col = 128; col < 256; ++col)
      if (img.at(127, col) > img.at(127, best)) best = col;
    CHECK(grid.coordinate(best) == doctest::Approx(1.0).epsilon(2 * grid.pixel_pitch()));
  }
}

TEST_CASE("the azimuthal pattern follows 1 + cos(2 l phi - phase)") {
  const ModeSpace s;
  const GridSpec grid{256, 1.0};
  for (int ell : {1, 2}) {
    for (double phase : {0.0, 0.7, 2.5}) {
      const auto psi = oam_superposition(s, ell, phase);
      const auto ring = angular_profile(render_intensity(psi, grid), grid, ring_radius(psi, grid), 360);
      const double peak = *std::max_element(ring.begin(), ring.end());
      for (std::size_t k = 0; k < ring.size(); k += 7) {
        const double phi = 2 * pi * k / ring.size();
        const double expected = 0.5 * (1 + std::cos(2 * ell * phi - phase));
        CHECK(ring[k] / peak == doctest::Approx(expected).epsilon(0.02).scale(1.0));
      }
    }
  }
}

TEST_CASE("a phase of pi rotates the l = 1 pattern by 90 degrees") {
  const ModeSpace s;
  const GridSpec grid{128, 1.0};
  const auto a = render_intensity(oam_superposition(s, 1, 0.0), grid);
  const auto b = render_intensity(oam_superposition(s, 1, pi), grid);
  const int n = grid.size;
  double worst = 0.0;
  for (int row = 0; row < n; ++row)
    for (int col = 0; col < n; ++col)
      worst = std::max(worst, std::abs(b.at(row, col) - a.at(col, n - 1 - row)));
  CHECK(worst < 1e-9 * a.max());
}

TEST_CASE("fiber profile renders inside the core") {
  const ModeSpace s;
  const GridSpec grid{256, 1.0};
  RenderProfile profile{FiberSpec::with_modes(FiberGeometry{}, {{0, 1}, {1, 1}, {2, 1}})};
  const auto psi = oam_superposition(s, 1, 0.0);
  const double r = ring_radius(psi, grid, profile);
  CHECK(r > 0.0);
  CHECK(r < 1.0 / 1.5);  // the grid spans 1.5 core radii
  const auto img = render_intensity(psi, grid, profile);
  CHECK(count_lobes(angular_profile(img, grid, r)) == 2);
  const auto tm = make_vector_mode(s, VectorModeSpec::of(VectorFamily::TM01));
  const auto ring = angular_profile(render_intensity(tm, grid, profile), grid, ring_radius(tm, grid, profile));
  CHECK(angular_variance_ratio(ring) < 1e-3);
  // The profile needs a solved LP mode for every rendered order.
  const auto l3 = oam_superposition(s, 3, 0.0);
  CHECK_THROWS_AS(render_intensity(l3, grid, profile), std::out_of_range);
}

TEST_CASE("lobe counting") {
  CHECK(count_lobes({}) == 0);
  CHECK(count_lobes(std::vector<double>(100, 0.0)) == 0);
  CHECK(count_lobes(std::vector<double>(100, 1.0)) == 0);
  std::vector<double> three(300);
  for (int k = 0; k < 300; ++k) three[k] = 1 + std::cos(2 * pi * 3 * k / 300.0);
  CHECK(count_lobes(three) == 3);
  // A lobe straddling the start of the profile counts once.
  std::vector<double> wrap(300);
  for (int k = 0; k < 300; ++k) wrap[k] = 1 + std::cos(2 * pi * 2 * k / 300.0 + 0.1);
  CHECK(count_lobes(wrap) == 2);
}

TEST_CASE("bad input") {
  const ModeSpace s;
  CHECK_THROWS_AS(render_intensity(oam_superposition(s, 1, 0), GridSpec{0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(render_intensity(oam_superposition(s, 1, 0), GridSpec{16, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(oam_superposition(s, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(oam_superposition(s, 4, 0.0), RangeError);
}

TEST_CASE("PGM output matches the closed-form golden images") {
  const ModeSpace s;
  const GridSpec grid{32, 1.0};
  const std::pair<const char*, SpinOrbitState> cases[] = {
      {"superposition_l1_32.pgm", oam_superposition(s, 1, 0.0)},
      {"superposition_l2_32.pgm", oam_superposition(s, 2, pi / 3)},
  };
  for (const auto& [file, psi] : cases) {
    CAPTURE(file);
    std::ostringstream os;
    write_pgm(os, render_intensity(psi, grid));
    std::istringstream ours(os.str());
    std::ifstream golden(std::string(SOE_GOLDEN_DIR) + "/" + file);
    REQUIRE(golden);
    int w1, h1, w2, h2;
    const auto a = parse_pgm(ours, w1, h1);
    const auto b = parse_pgm(golden, w2, h2);
    CHECK(w1 == w2);
    CHECK(h1 == h2);
    long worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    CHECK(worst <= 1);
  }
}
