#include "projsum/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "projsum/errors.hpp"

namespace projsum {

double HyperbolaRectangle::scale() const noexcept {
  return std::max({std::abs(gap_a), std::abs(gap_b), 1.0});
}

Complex HyperbolaRectangle::branch_point(int branch, double t) const noexcept {
  const double qa = 0.25 * gap_a * gap_a;
  const double qb = 0.25 * gap_b * gap_b;
  const double s_min = -std::min(qa, qb);
  const double s = s_min * (1.0 - t * t);
  const double xp = std::sqrt(std::max(0.0, qa + s));
  const double yp = std::sqrt(std::max(0.0, qb + s));
  const double sx = (branch & 1) ? -1.0 : 1.0;
  const double sy = (branch & 2) ? -1.0 : 1.0;
  return {center_x + sx * xp, center_y + sy * yp};
}

HyperbolaRectangle make_geometry(double alpha, double alpha_alt, double beta,
                                 double beta_alt) {
  if (!(std::isfinite(alpha) && std::isfinite(alpha_alt) &&
        std::isfinite(beta) && std::isfinite(beta_alt)))
    throw DegenerateGeometry("make_geometry: non-finite atom");
  if (alpha == alpha_alt || beta == beta_alt)
    throw DegenerateGeometry(
        "make_geometry: both laws need two distinct atoms");
  HyperbolaRectangle g;
  g.alpha = alpha;
  g.alpha_alt = alpha_alt;
  g.beta = beta;
  g.beta_alt = beta_alt;
  g.center_x = 0.5 * (alpha + alpha_alt);
  g.center_y = 0.5 * (beta + beta_alt);
  g.gap_a = alpha_alt - alpha;
  g.gap_b = beta_alt - beta;
  g.corners = {Complex(alpha, beta), Complex(alpha, beta_alt),
               Complex(alpha_alt, beta), Complex(alpha_alt, beta_alt)};
  return g;
}

HyperbolaRectangle make_geometry(const TwoAtomLaw& p_law,
                                 const TwoAtomLaw& q_law) {
  if (!p_law.is_two_atom() || !q_law.is_two_atom())
    throw DegenerateGeometry(
        "make_geometry: p and q must both be two-atom laws");
  return make_geometry(p_law.loc, p_law.loc_alt, q_law.loc, q_law.loc_alt);
}

bool on_hyperbola(const HyperbolaRectangle& g, Complex z, double tol) {
  const double x = z.real();
  const double y = z.imag();
  const double lhs = (x - g.alpha) * (x - g.alpha_alt);
  const double rhs = (y - g.beta) * (y - g.beta_alt);
  const double sc = g.scale();
  return std::abs(lhs - rhs) <= tol * sc * sc;
}

bool in_rectangle(const HyperbolaRectangle& g, Complex z) {
  const double x = z.real();
  const double y = z.imag();
  return x >= std::min(g.alpha, g.alpha_alt) &&
         x <= std::max(g.alpha, g.alpha_alt) &&
         y >= std::min(g.beta, g.beta_alt) && y <= std::max(g.beta, g.beta_alt);
}

std::vector<Complex> hr_points(const HyperbolaRectangle& g, std::size_t m) {
  if (m < 2) throw std::invalid_argument("hr_points: m must be >= 2");
  std::vector<Complex> pts;
  pts.reserve(4 * m);
  const double step = 1.0 / static_cast<double>(m - 1);
  for (int b = 0; b < 4; ++b)
    for (std::size_t k = 0; k < m; ++k)
      pts.push_back(g.branch_point(
          b, k + 1 == m ? 1.0 : static_cast<double>(k) * step));
  return pts;
}

namespace {

// Golden-section search for a minimum of f on [lo, hi]. Works on the
// unsquared distance, which stays V-shaped (not flat) when the minimum is 0.
template <typename F>
double golden_min(F&& f, double lo, double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498948482;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return std::min({fc, fd, f(a), f(b)});
}

}  // namespace

double dist_to_hr(const HyperbolaRectangle& g, Complex z, std::size_t m) {
  if (m < 2) throw std::invalid_argument("dist_to_hr: m must be >= 2");
  const double step = 1.0 / static_cast<double>(m - 1);
  double best = std::numeric_limits<double>::infinity();
  for (int b = 0; b < 4; ++b) {
    auto dist = [&](double t) { return std::abs(z - g.branch_point(b, t)); };
    std::size_t best_k = 0;
    double best_coarse = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
      const double d = dist(k + 1 == m ? 1.0 : static_cast<double>(k) * step);
      if (d < best_coarse) {
        best_coarse = d;
        best_k = k;
      }
    }
    const double lo = best_k == 0 ? 0.0 : static_cast<double>(best_k - 1) * step;
    const double hi = best_k + 1 >= m ? 1.0 : static_cast<double>(best_k + 1) * step;
    const double refined = golden_min(dist, lo, std::min(hi, 1.0), 1e-13);
    best = std::min({best, best_coarse, refined});
  }
  return best;
}

BrownAtomWeights atom_weights(double a, double b) {
  if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0))
    throw std::invalid_argument("atom_weights: weights must lie in [0, 1]");
  BrownAtomWeights w;
  w.e00 = std::max(0.0, a + b - 1.0);
  w.e01 = std::max(0.0, a + (1.0 - b) - 1.0);
  w.e10 = std::max(0.0, (1.0 - a) + b - 1.0);
  w.e11 = std::max(0.0, (1.0 - a) + (1.0 - b) - 1.0);
  w.e_cont = 1.0 - (w.e00 + w.e01 + w.e10 + w.e11);
  return w;
}

}  // namespace projsum
