#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace projsum {

using Complex = std::complex<double>;

/// Finite atomic probability measure. Points are complex for spectral
/// distributions of X_n and real (nonnegative) for the Hermitized measures.
template <typename Point>
class PointMeasure {
 public:
  PointMeasure() = default;

  /// Throws std::invalid_argument if lengths differ, any point or weight is
  /// non-finite, a weight is negative, or the weights do not sum to 1
  /// within 1e-12.
  PointMeasure(std::vector<Point> points, std::vector<double> weights);

  /// Uniform weights 1/size.
  static PointMeasure uniform(std::vector<Point> points);

  const std::vector<Point>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  /// Total weight of atoms within `radius` of `where`.
  double mass_near(const Point& where, double radius) const;

 private:
  std::vector<Point> points_;
  std::vector<double> weights_;
};

using ComplexMeasure = PointMeasure<Complex>;
using HalfLineMeasure = PointMeasure<double>;

/// Equal-weight mixture of several measures (e.g. ESDs of independent
/// realizations pooled into one).
ComplexMeasure pool(const std::vector<ComplexMeasure>& parts);

extern template class PointMeasure<Complex>;
extern template class PointMeasure<double>;

}  // namespace projsum
