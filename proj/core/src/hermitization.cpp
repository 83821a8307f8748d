#include "projsum/hermitization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "projsum/errors.hpp"
#include "projsum/parallel.hpp"
#include "projsum/spectra.hpp"

namespace projsum {

double log_potential(const ComplexMeasure& measure, Complex z) {
  double acc = 0.0;
  const auto& pts = measure.points();
  const auto& w = measure.weights();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double dx = z.real() - pts[i].real();
    const double dy = z.imag() - pts[i].imag();
    const double r2 = dx * dx + dy * dy;
    if (r2 == 0.0) {
      if (w[i] > 0.0) return -std::numeric_limits<double>::infinity();
      continue;
    }
    acc += w[i] * 0.5 * std::log(r2);
  }
  return acc;
}

double fk_determinant(const CMatrix& matrix, Complex z) {
  if (matrix.rows() == 0 || matrix.rows() != matrix.cols())
    throw InvalidDimension("fk_determinant: matrix must be square and non-empty");
  const CMatrix a = z * CMatrix::Identity(matrix.rows(), matrix.cols()) - matrix;
  const Eigen::VectorXd s = singular_values(a);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) == 0.0) return 0.0;
    acc += std::log(s(i));
  }
  return std::exp(acc / static_cast<double>(s.size()));
}

PotentialGrid potential_grid(const ComplexMeasure& measure, const Window& window,
                             std::size_t nx, std::size_t ny) {
  if (nx < 3 || ny < 3) throw InvalidGrid("potential_grid: nx, ny must be >= 3");
  if (!(window.xmax > window.xmin) || !(window.ymax > window.ymin))
    throw InvalidGrid("potential_grid: empty window");

  PotentialGrid g;
  g.x0 = window.xmin;
  g.y0 = window.ymin;
  g.nx = nx;
  g.ny = ny;
  g.hx = (window.xmax - window.xmin) / static_cast<double>(nx - 1);
  g.hy = (window.ymax - window.ymin) / static_cast<double>(ny - 1);
  g.values.resize(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(ny));

  double scale = 1.0;
  for (const Complex& p : measure.points()) scale = std::max(scale, std::abs(p));
  const double collide = 1e-13 * scale;

  std::vector<std::vector<NodePerturbation>> moved(nx);
  parallel_for(nx, [&](std::size_t ix) {
    for (std::size_t iy = 0; iy < ny; ++iy) {
      Complex z = g.node(ix, iy);
      for (const Complex& p : measure.points()) {
        if (std::abs(z - p) < collide) {
          const Complex shifted = z + Complex(0.5 * g.hx, 0.5 * g.hy);
          moved[ix].push_back({ix, iy, z, shifted});
          z = shifted;
          break;
        }
      }
      g.values(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(iy)) =
          log_potential(measure, z);
    }
  });
  for (auto& m : moved)
    g.perturbations.insert(g.perturbations.end(), m.begin(), m.end());
  return g;
}

RecoveredMeasure laplacian_recover(const PotentialGrid& grid) {
  if (grid.nx < 3 || grid.ny < 3)
    throw InvalidGrid("laplacian_recover: grid needs interior nodes");
  if (std::abs(grid.hx - grid.hy) > 1e-9 * std::max(grid.hx, grid.hy))
    throw InvalidGrid("laplacian_recover: cells must be square (hx == hy)");

  const auto nx = static_cast<Eigen::Index>(grid.nx);
  const auto ny = static_cast<Eigen::Index>(grid.ny);
  const auto& L = grid.values;
  const double inv_2pi = 0.5 / std::numbers::pi;

  RecoveredMeasure out;
  out.mass.resize(nx - 2, ny - 2);
  std::vector<Complex> pts;
  std::vector<double> w;
  double positive = 0.0;
  for (Eigen::Index i = 1; i + 1 < nx; ++i)
    for (Eigen::Index j = 1; j + 1 < ny; ++j) {
      const double lap =
          L(i + 1, j) + L(i - 1, j) + L(i, j + 1) + L(i, j - 1) - 4.0 * L(i, j);
      const double m = inv_2pi * lap;
      out.mass(i - 1, j - 1) = m;
      out.raw_total += m;
      if (m > 0.0) {
        positive += m;
        pts.push_back(grid.node(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
        w.push_back(m);
      } else {
        out.clamped_total -= m;
      }
    }
  if (positive > 0.0) {
    double total = 0.0;
    for (double& x : w) {
      x /= positive;
      total += x;
    }
    w.back() += 1.0 - total;
    out.measure.emplace(std::move(pts), std::move(w));
  }
  return out;
}

double block_mass(const PotentialGrid& grid, const Eigen::ArrayXXd& mass,
                  Complex where, std::size_t k) {
  auto nearest = [](double coord, double origin, double h, std::size_t count) {
    const double idx = std::round((coord - origin) / h);
    return static_cast<long>(std::clamp(idx, 1.0, static_cast<double>(count - 2)));
  };
  const long ci = nearest(where.real(), grid.x0, grid.hx, grid.nx);
  const long cj = nearest(where.imag(), grid.y0, grid.hy, grid.ny);
  const long half = static_cast<long>(k / 2);
  double total = 0.0;
  for (long i = ci - half; i <= ci + half; ++i)
    for (long j = cj - half; j <= cj + half; ++j) {
      if (i < 1 || j < 1 || i > static_cast<long>(grid.nx) - 2 ||
          j > static_cast<long>(grid.ny) - 2)
        continue;
      total += mass(i - 1, j - 1);
    }
  return total;
}

BrownPipelineResult brown_pipeline(const ModelSpec& spec, const Window& window,
                                   std::size_t nx, std::size_t ny,
                                   std::size_t samples) {
  if (samples == 0) throw std::invalid_argument("brown_pipeline: samples must be >= 1");
  std::vector<ComplexMeasure> parts(samples);
  parallel_for(samples, [&](std::size_t i) {
    parts[i] = esd(assemble_model(sample_spec(spec, i)));
  });

  // The potential of the equal-weight pooled ESD is the sample average of the
  // per-realization potentials.
  BrownPipelineResult out;
  out.pooled_esd = samples == 1 ? parts.front() : pool(parts);
  out.grid = potential_grid(out.pooled_esd, window, nx, ny);
  out.recovered = laplacian_recover(out.grid);
  out.grid.mass = out.recovered.mass;
  return out;
}

}  // namespace projsum
