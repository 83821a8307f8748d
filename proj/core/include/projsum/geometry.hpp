#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "projsum/measure.hpp"
#include "projsum/model.hpp"

namespace projsum {

/// Hyperbola H: (x - a)(x - a') = (y - b)(y - b'), rectangle R = [a, a'] x
/// [b, b'] (closed, endpoints in either order), and their intersection.
///
/// H meets R exactly on the set of points whose shared level
///   s = x'^2 - gap_a^2/4 = y'^2 - gap_b^2/4
/// (primed coordinates relative to the center) is <= 0. The intersection is
/// therefore covered by four sign branches (+-x', +-y') of the level
/// parameterization over s in [-min(gap_a^2, gap_b^2)/4, 0]; each branch
/// joins a vertex-side endpoint (s minimal) to one corner (s = 0).
struct HyperbolaRectangle {
  double alpha = 0.0;
  double alpha_alt = 0.0;
  double beta = 0.0;
  double beta_alt = 0.0;

  double center_x = 0.0;
  double center_y = 0.0;
  double gap_a = 0.0;  // alpha_alt - alpha
  double gap_b = 0.0;  // beta_alt - beta

  /// alpha + i beta, alpha + i beta', alpha' + i beta, alpha' + i beta'.
  std::array<Complex, 4> corners{};

  Complex center() const noexcept { return {center_x, center_y}; }

  /// max(|gap_a|, |gap_b|, 1); tolerances on the quadratic forms scale with
  /// its square.
  double scale() const noexcept;

  /// Point on sign branch `branch` (bit 0: sign of x', bit 1: sign of y')
  /// at parameter t in [0, 1]. The level is s = s_min (1 - t^2), which keeps
  /// the branch smooth in t at both endpoints.
  Complex branch_point(int branch, double t) const noexcept;
};

/// Throws DegenerateGeometry unless both laws are two-atom.
HyperbolaRectangle make_geometry(const TwoAtomLaw& p_law,
                                 const TwoAtomLaw& q_law);

/// Geometry from raw atom locations; only requires distinct atoms.
HyperbolaRectangle make_geometry(double alpha, double alpha_alt, double beta,
                                 double beta_alt);

/// |(x - a)(x - a') - (y - b)(y - b')| <= tol * scale^2.
bool on_hyperbola(const HyperbolaRectangle& geom, Complex z, double tol);

/// Closed rectangle membership.
bool in_rectangle(const HyperbolaRectangle& geom, Complex z);

/// m samples per sign branch (4m points) including every branch endpoint.
/// Throws std::invalid_argument for m < 2.
std::vector<Complex> hr_points(const HyperbolaRectangle& geom, std::size_t m);

/// dist(z, H ∩ R): coarse search over hr_points, then golden-section
/// refinement of the branch parameter around the best sample of each branch.
double dist_to_hr(const HyperbolaRectangle& geom, Complex z,
                  std::size_t m = 512);

/// Weights of the four corner atoms of the Brown measure of p + iq and the
/// remaining continuous mass.
struct BrownAtomWeights {
  double e00 = 0.0;  // alpha + i beta
  double e01 = 0.0;  // alpha + i beta'
  double e10 = 0.0;  // alpha' + i beta
  double e11 = 0.0;  // alpha' + i beta'
  double e_cont = 1.0;

  /// Weights in the corner order of HyperbolaRectangle::corners.
  std::array<double, 4> as_corner_array() const noexcept {
    return {e00, e01, e10, e11};
  }
};

/// a = weight of alpha in p, b = weight of beta in q; both in [0, 1].
BrownAtomWeights atom_weights(double a, double b);

}  // namespace projsum
