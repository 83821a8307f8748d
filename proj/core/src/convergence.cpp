#include "projsum/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "projsum/parallel.hpp"
#include "projsum/spectra.hpp"
#include "projsum/transport.hpp"

namespace projsum {
namespace {

using BinKey = std::pair<std::int64_t, std::int64_t>;
using Histogram = std::map<BinKey, std::int64_t>;

constexpr double kMassQuantum = 1099511627776.0;  // 2^40

Histogram bin_measure(const ComplexMeasure& mu, double h) {
  std::map<BinKey, double> acc;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Complex& p = mu.points()[i];
    const BinKey key{static_cast<std::int64_t>(std::floor(p.real() / h)),
                     static_cast<std::int64_t>(std::floor(p.imag() / h))};
    acc[key] += mu.weights()[i];
  }
  Histogram hist;
  std::int64_t total = 0;
  for (const auto& [key, w] : acc) {
    const auto q = static_cast<std::int64_t>(std::llround(w * kMassQuantum));
    if (q <= 0) continue;
    hist[key] = q;
    total += q;
  }
  // Fold the rounding residue into the heaviest bin so totals match exactly.
  auto heaviest = std::max_element(
      hist.begin(), hist.end(),
      [](const auto& a, const auto& b) { return a.second < b.second; });
  heaviest->second += static_cast<std::int64_t>(kMassQuantum) - total;
  return hist;
}

Complex bin_center(const BinKey& key, double h) {
  return {(static_cast<double>(key.first) + 0.5) * h,
          (static_cast<double>(key.second) + 0.5) * h};
}

}  // namespace

BLDistance bl_distance(const ComplexMeasure& mu1, const ComplexMeasure& mu2,
                       double bin_size) {
  if (!(bin_size > 0.0)) throw std::invalid_argument("bl_distance: bin_size must be > 0");
  Histogram a = bin_measure(mu1, bin_size);
  Histogram b = bin_measure(mu2, bin_size);

  BLDistance out;
  out.binning_error = std::sqrt(2.0) * bin_size;
  out.bins1 = a.size();
  out.bins2 = b.size();
  if (a == b) return out;

  // Canonical argument order makes the result exactly symmetric.
  if (std::make_pair(b.size(), b) < std::make_pair(a.size(), a)) std::swap(a, b);

  std::vector<std::int64_t> supply;
  std::vector<std::int64_t> demand;
  std::vector<Complex> pa;
  std::vector<Complex> pb;
  for (const auto& [key, q] : a) {
    supply.push_back(q);
    pa.push_back(bin_center(key, bin_size));
  }
  for (const auto& [key, q] : b) {
    demand.push_back(q);
    pb.push_back(bin_center(key, bin_size));
  }
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(pa.size()),
                       static_cast<Eigen::Index>(pb.size()));
  for (std::size_t i = 0; i < pa.size(); ++i)
    for (std::size_t j = 0; j < pb.size(); ++j)
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::min(std::abs(pa[i] - pb[j]), 1.0);

  const TransportSolution sol = solve_transport(supply, demand, cost);
  out.value = sol.cost;
  out.upper = sol.cost;
  out.lower = std::min(sol.dual_bound, sol.cost);
  return out;
}

namespace {

// Orthonormal eigenvectors of the Hermitian matrix h with eigenvalue
// within tol of `target`.
CMatrix eigenspace(const Eigen::SelfAdjointEigenSolver<CMatrix>& solver,
                   double target, double tol) {
  const Eigen::VectorXd& ev = solver.eigenvalues();
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i) - target) <= tol) cols.push_back(i);
  CMatrix basis(ev.size(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    basis.col(static_cast<Eigen::Index>(c)) = solver.eigenvectors().col(cols[c]);
  return basis;
}

// dim(span E ∩ span F) for orthonormal bases: number of principal angles
// equal to zero, i.e. singular values of E* F equal to 1.
std::size_t intersection_dimension(const CMatrix& e, const CMatrix& f) {
  if (e.cols() == 0 || f.cols() == 0) return 0;
  const CMatrix overlap = e.adjoint() * f;
  Eigen::BDCSVD<CMatrix> svd(overlap);
  std::size_t dim = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1.0 - 1e-9) ++dim;
  return dim;
}

}  // namespace

CornerMasses corner_atom_masses(const ModelRealization& realization, double tol) {
  const TwoAtomLaw& p = realization.realized_p_law;
  const TwoAtomLaw& q = realization.realized_q_law;
  const double scale =
      std::max({std::abs(p.loc_alt - p.loc), std::abs(q.loc_alt - q.loc), 1.0});
  const double n = static_cast<double>(realization.dimension());

  CornerMasses out;
  out.corners = {Complex(p.loc, q.loc), Complex(p.loc, q.loc_alt),
                 Complex(p.loc_alt, q.loc), Complex(p.loc_alt, q.loc_alt)};
  out.predicted = atom_weights(p.weight, q.weight).as_corner_array();

  const ComplexMeasure mu = esd(realization);
  for (std::size_t c = 0; c < 4; ++c)
    out.esd_mass[c] = mu.mass_near(out.corners[c], tol * scale);

  Eigen::SelfAdjointEigenSolver<CMatrix> sp(realization.p_matrix);
  Eigen::SelfAdjointEigenSolver<CMatrix> sq(realization.q_matrix);
  const double etol = 1e-8 * scale;
  const std::array<CMatrix, 2> ep{eigenspace(sp, p.loc, etol), eigenspace(sp, p.loc_alt, etol)};
  const std::array<CMatrix, 2> eq{eigenspace(sq, q.loc, etol), eigenspace(sq, q.loc_alt, etol)};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      out.intersection_mass[2 * i + j] =
          static_cast<double>(intersection_dimension(ep[i], eq[j])) / n;
  return out;
}

ConvergenceReport convergence_run(const TwoAtomLaw& p_law, const TwoAtomLaw& q_law,
                                  const std::vector<std::size_t>& n_schedule,
                                  std::size_t samples, std::uint64_t seed,
                                  const ConvergenceOptions& options) {
  if (n_schedule.empty()) throw std::invalid_argument("convergence_run: empty schedule");
  for (std::size_t i = 0; i < n_schedule.size(); ++i)
    if (n_schedule[i] == 0 || (i > 0 && n_schedule[i] <= n_schedule[i - 1]))
      throw std::invalid_argument("convergence_run: schedule must be strictly increasing");
  if (samples == 0) throw std::invalid_argument("convergence_run: samples must be >= 1");
  const std::size_t ref_n = options.reference_n ? options.reference_n : n_schedule.back();
  if (ref_n < n_schedule.back())
    throw std::invalid_argument("convergence_run: reference_n below the schedule");

  std::vector<std::size_t> dims = n_schedule;
  if (ref_n != n_schedule.back()) dims.push_back(ref_n);
  const double bin = options.bin_size * make_geometry(p_law, q_law).scale();

  struct Job {
    ComplexMeasure esd;
    double support_dev = 0.0;
    TwoAtomLaw p_real;
    TwoAtomLaw q_real;
  };
  std::vector<Job> jobs(dims.size() * samples);
  parallel_for(jobs.size(), [&](std::size_t idx) {
    const std::size_t d = idx / samples;
    const std::size_t s = idx % samples;
    ModelSpec spec{p_law, q_law, dims[d], derive_seed(seed, dims[d])};
    const ModelRealization r = assemble_model(sample_spec(spec, s));
    const HyperbolaRectangle g = realized_geometry(r);
    Job& job = jobs[idx];
    job.esd = esd(r);
    for (const Complex& z : job.esd.points())
      job.support_dev = std::max(job.support_dev, dist_to_hr(g, z, options.support_resolution));
    job.p_real = r.realized_p_law;
    job.q_real = r.realized_q_law;
  });

  auto pooled_at = [&](std::size_t d) {
    std::vector<ComplexMeasure> parts;
    for (std::size_t s = 0; s < samples; ++s) parts.push_back(jobs[d * samples + s].esd);
    return samples == 1 ? parts.front() : pool(parts);
  };
  const ComplexMeasure reference = pooled_at(dims.size() - 1);

  ConvergenceReport rep;
  rep.n_schedule = n_schedule;
  rep.reference_n = ref_n;
  const std::size_t count = n_schedule.size();
  rep.distances.resize(count);
  rep.distance_noise.resize(count);
  rep.support_devs.resize(count);
  rep.corner_mass_errors.resize(count);

  std::vector<ComplexMeasure> pooled(count);
  for (std::size_t d = 0; d < count; ++d) pooled[d] = pooled_at(d);

  // Pooled distances and single-realization distances, all independent.
  std::vector<double> single(count * samples);
  parallel_for(count * (samples + 1), [&](std::size_t idx) {
    const std::size_t d = idx / (samples + 1);
    const std::size_t s = idx % (samples + 1);
    if (s == samples)
      rep.distances[d] = bl_distance(pooled[d], reference, bin).value;
    else
      single[d * samples + s] = bl_distance(jobs[d * samples + s].esd, reference, bin).value;
  });

  for (std::size_t d = 0; d < count; ++d) {
    if (samples > 1) {
      double mean = 0.0;
      for (std::size_t s = 0; s < samples; ++s) mean += single[d * samples + s];
      mean /= static_cast<double>(samples);
      double var = 0.0;
      for (std::size_t s = 0; s < samples; ++s) {
        const double e = single[d * samples + s] - mean;
        var += e * e;
      }
      var /= static_cast<double>(samples - 1);
      rep.distance_noise[d] = std::sqrt(var / static_cast<double>(samples));
    }

    double dev = 0.0;
    std::array<double, 4> empirical{};
    std::array<double, 4> predicted{};
    for (std::size_t s = 0; s < samples; ++s) {
      const Job& job = jobs[d * samples + s];
      dev = std::max(dev, job.support_dev);
      const HyperbolaRectangle g = make_geometry(job.p_real, job.q_real);
      const auto w = atom_weights(job.p_real.weight, job.q_real.weight).as_corner_array();
      for (std::size_t c = 0; c < 4; ++c) {
        empirical[c] += job.esd.mass_near(g.corners[c], 1e-9 * g.scale());
        predicted[c] += w[c];
      }
    }
    double err = 0.0;
    for (std::size_t c = 0; c < 4; ++c)
      err = std::max(err, std::abs(empirical[c] - predicted[c]) / static_cast<double>(samples));
    rep.support_devs[d] = dev;
    rep.corner_mass_errors[d] = err;
  }
  return rep;
}

bool trend_decreasing(const std::vector<double>& values,
                      const std::vector<double>& noise, double noise_factor) {
  if (values.size() != noise.size())
    throw std::invalid_argument("trend_decreasing: length mismatch");
  std::size_t inversions = 0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double rise = values[i + 1] - values[i];
    if (rise <= 0.0) continue;
    ++inversions;
    const double allowed = noise_factor * std::hypot(noise[i], noise[i + 1]);
    if (rise > allowed) return false;
  }
  return inversions <= 1;
}

std::vector<TightnessEntry> tightness_probe(const std::vector<TwoAtomLaw>& p_laws,
                                            const std::vector<TwoAtomLaw>& q_laws,
                                            std::size_t n, std::uint64_t seed,
                                            const Window& window) {
  if (p_laws.size() != q_laws.size())
    throw std::invalid_argument("tightness_probe: sequence lengths differ");
  auto inside = [&](Complex z) {
    return z.real() >= window.xmin && z.real() <= window.xmax &&
           z.imag() >= window.ymin && z.imag() <= window.ymax;
  };
  std::vector<TightnessEntry> out(p_laws.size());
  parallel_for(p_laws.size(), [&](std::size_t k) {
    const ModelSpec spec{p_laws[k], q_laws[k], n, sample_seed(seed, k)};
    const ModelRealization r = assemble_model(spec);
    TightnessEntry& e = out[k];
    e.p_law = r.realized_p_law;
    e.q_law = r.realized_q_law;
    const ComplexMeasure mu = esd(r);
    for (std::size_t i = 0; i < mu.size(); ++i)
      if (!inside(mu.points()[i])) e.escaping_mass += mu.weights()[i];
    const CornerMasses cm = corner_atom_masses(r);
    for (std::size_t c = 0; c < 4; ++c) {
      bool duplicate = false;
      for (std::size_t d = 0; d < c; ++d) duplicate = duplicate || cm.corners[d] == cm.corners[c];
      if (!duplicate && !inside(cm.corners[c])) e.escaping_corner_mass += cm.intersection_mass[c];
    }
  });
  return out;
}

}  // namespace projsum
