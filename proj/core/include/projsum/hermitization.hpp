#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "projsum/measure.hpp"
#include "projsum/model.hpp"

namespace projsum {

/// sum_i w_i log|z - p_i|; -infinity when z coincides with an atom.
double log_potential(const ComplexMeasure& measure, Complex z);

/// |det(z - matrix)|^(1/n) computed as exp(mean log sigma_i); 0 when some
/// singular value is exactly zero. Throws InvalidDimension for non-square or
/// empty input.
double fk_determinant(const CMatrix& matrix, Complex z);

struct Window {
  double xmin = -1.0;
  double xmax = 1.0;
  double ymin = -1.0;
  double ymax = 1.0;
};

struct NodePerturbation {
  std::size_t ix = 0;
  std::size_t iy = 0;
  Complex original;
  Complex evaluated;
};

/// Node values L(x0 + ix hx, y0 + iy hy), ix < nx, iy < ny, stored in an
/// nx x ny array.
struct PotentialGrid {
  double x0 = 0.0;
  double y0 = 0.0;
  double hx = 0.0;
  double hy = 0.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  Eigen::ArrayXXd values;
  std::optional<Eigen::ArrayXXd> mass;  // (nx-2) x (ny-2) when recovered
  std::vector<NodePerturbation> perturbations;

  Complex node(std::size_t ix, std::size_t iy) const noexcept {
    return {x0 + static_cast<double>(ix) * hx,
            y0 + static_cast<double>(iy) * hy};
  }
};

/// Evaluates log_potential on the nx x ny node lattice spanning `window`.
/// Nodes within 1e-13 scale of an atom are moved by half a cell diagonally
/// and recorded in `perturbations`. Throws InvalidGrid for nx or ny < 3 or
/// an empty window.
PotentialGrid potential_grid(const ComplexMeasure& measure,
                             const Window& window, std::size_t nx,
                             std::size_t ny);

struct RecoveredMeasure {
  Eigen::ArrayXXd mass;  // signed stencil masses per interior node
  /// Clamped masses renormalized to 1; absent if no positive mass survived.
  std::optional<ComplexMeasure> measure;
  double raw_total = 0.0;      // signed sum of stencil masses
  double clamped_total = 0.0;  // magnitude of the negative part removed
};

/// mass(i, j) = (1/2 pi) * (5-point Laplacian of L at interior node) * h^2.
/// Throws InvalidGrid unless hx == hy (relative 1e-9).
RecoveredMeasure laplacian_recover(const PotentialGrid& grid);

/// Sum of stencil masses over the k x k block of interior nodes centered on
/// the interior node nearest to `where`.
double block_mass(const PotentialGrid& grid, const Eigen::ArrayXXd& mass,
                  Complex where, std::size_t k = 3);

struct BrownPipelineResult {
  PotentialGrid grid;  // averaged potential, mass filled in
  RecoveredMeasure recovered;
  ComplexMeasure pooled_esd;
};

/// Averages log potentials of `samples` independent realizations
/// (sample_spec(spec, i)) on the window, then recovers the mass.
BrownPipelineResult brown_pipeline(const ModelSpec& spec, const Window& window,
                                   std::size_t nx, std::size_t ny,
                                   std::size_t samples);

}  // namespace projsum
