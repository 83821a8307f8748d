#include "projsum/measure.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace projsum {
namespace {

bool finite(double x) { return std::isfinite(x); }
bool finite(const Complex& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

}  // namespace

template <typename Point>
PointMeasure<Point>::PointMeasure(std::vector<Point> points,
                                  std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.size() != weights_.size())
    throw std::invalid_argument("PointMeasure: points/weights length mismatch");
  if (points_.empty()) throw std::invalid_argument("PointMeasure: empty");
  double total = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!finite(points_[i]) || !std::isfinite(weights_[i]) || weights_[i] < 0.0)
      throw std::invalid_argument("PointMeasure: non-finite point or bad weight");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("PointMeasure: weights do not sum to 1");
}

template <typename Point>
PointMeasure<Point> PointMeasure<Point>::uniform(std::vector<Point> points) {
  const std::size_t n = points.size();
  if (n == 0) throw std::invalid_argument("PointMeasure: empty");
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  // 1/n summed n times can miss 1 by a few ulps; fold the residue into the
  // last weight.
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  w.back() += 1.0 - total;
  return PointMeasure(std::move(points), std::move(w));
}

template <typename Point>
double PointMeasure<Point>::mass_near(const Point& where, double radius) const {
  double m = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i)
    if (std::abs(points_[i] - where) <= radius) m += weights_[i];
  return m;
}

template class PointMeasure<Complex>;
template class PointMeasure<double>;

ComplexMeasure pool(const std::vector<ComplexMeasure>& parts) {
  if (parts.empty()) throw std::invalid_argument("pool: no measures");
  std::vector<Complex> pts;
  std::vector<double> w;
  const double share = 1.0 / static_cast<double>(parts.size());
  for (const auto& m : parts) {
    pts.insert(pts.end(), m.points().begin(), m.points().end());
    for (double x : m.weights()) w.push_back(x * share);
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  w.back() += 1.0 - total;
  return ComplexMeasure(std::move(pts), std::move(w));
}

}  // namespace projsum
