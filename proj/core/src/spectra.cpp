#include "projsum/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "projsum/errors.hpp"

namespace projsum {

std::vector<Complex> eigenvalues(const CMatrix& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw InvalidDimension("eigenvalues: matrix must be square and non-empty");
  Eigen::ComplexEigenSolver<CMatrix> solver(matrix, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigenvalues: QR iteration did not converge (n=" << matrix.rows()
        << ", ||A||_F=" << matrix.norm()
        << ", max|a_ij|=" << matrix.cwiseAbs().maxCoeff() << ")";
    throw ComputationError(msg.str());
  }
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

Eigen::VectorXd singular_values(const CMatrix& matrix) {
  Eigen::BDCSVD<CMatrix> svd(matrix);
  if (svd.info() != Eigen::Success)
    throw ComputationError("singular_values: SVD did not converge");
  return svd.singularValues();
}

double operator_norm(const CMatrix& matrix) {
  const Eigen::VectorXd s = singular_values(matrix);
  return s.size() == 0 ? 0.0 : s(0);
}

ComplexMeasure esd(const ModelRealization& realization) {
  return ComplexMeasure::uniform(eigenvalues(realization.x_matrix));
}

HyperbolaRectangle realized_geometry(const ModelRealization& realization) {
  return make_geometry(realization.realized_p_law, realization.realized_q_law);
}

CenteredModel centered_model(const ModelRealization& realization) {
  const HyperbolaRectangle g = realized_geometry(realization);
  CenteredModel out;
  out.center = g.center();
  out.gap_a = g.gap_a;
  out.gap_b = g.gap_b;
  const auto n = realization.x_matrix.rows();
  out.centered = realization.x_matrix - out.center * CMatrix::Identity(n, n);
  return out;
}

namespace {

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

CMatrix skew_part_over_i(const CMatrix& m) {
  return (m - m.adjoint()) * Complex(0.0, -0.5);
}

CMatrix shifted(const CMatrix& x, Complex z) {
  return z * CMatrix::Identity(x.rows(), x.cols()) - x;
}

}  // namespace

StructureReport structure_report(const ModelRealization& realization,
                                 const HyperbolaRectangle& geom, std::size_t m) {
  const CenteredModel c = centered_model(realization);
  const CMatrix sq = c.centered * c.centered;
  const double re_target = 0.25 * (c.gap_a * c.gap_a - c.gap_b * c.gap_b);

  StructureReport r;
  r.scale = geom.scale();
  r.im_bound = 0.5 * std::abs(c.gap_a * c.gap_b);
  for (const Complex& rho : eigenvalues(sq))
    r.re_deviation = std::max(r.re_deviation, std::abs(rho.real() - re_target));
  r.im_norm = operator_norm(skew_part_over_i(sq));

  const CMatrix comm = sq * sq.adjoint() - sq.adjoint() * sq;
  const double norm_sq = operator_norm(sq);
  const double comm_norm = operator_norm(comm);
  r.normality_residual = norm_sq > 0.0 ? comm_norm / (norm_sq * norm_sq) : comm_norm;

  for (const Complex& lambda : eigenvalues(realization.x_matrix))
    r.support_deviation = std::max(r.support_deviation, dist_to_hr(geom, lambda, m));
  return r;
}

HalfLineMeasure nu_n_z(const ModelRealization& realization, Complex z) {
  const CMatrix a = shifted(realization.x_matrix, z);
  const CMatrix gram = hermitian_part(a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw ComputationError("nu_n_z: Hermitian eigensolver did not converge");
  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
  std::vector<double> pts(ev.data(), ev.data() + ev.size());
  for (double& p : pts) p = std::max(p, 0.0);
  return HalfLineMeasure::uniform(std::move(pts));
}

double min_singular_value(const ModelRealization& realization, Complex z) {
  const Eigen::VectorXd s = singular_values(shifted(realization.x_matrix, z));
  return s(s.size() - 1);
}

double verify_sv_bound(const ModelRealization& realization,
                       const HyperbolaRectangle& geom, Complex z, std::size_t m) {
  if (!realization.realized_p_law.is_two_atom() ||
      !realization.realized_q_law.is_two_atom())
    throw DegenerateGeometry("verify_sv_bound: realized laws must be two-atom");
  const Eigen::VectorXd s = singular_values(shifted(realization.x_matrix, z));
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (smax <= 0.0)
    throw ComputationError("verify_sv_bound: z - X_n vanished identically");
  const double d = dist_to_hr(geom, z, m);
  return smin - d * d / smax;
}

PairingReport eigenspace_pairing_check(const ModelRealization& realization,
                                       double tol) {
  const CenteredModel c = centered_model(realization);
  const double sc = std::max({c.gap_a * c.gap_a, c.gap_b * c.gap_b, 1.0});
  const double ctol = tol * sc;
  const double re_target = 0.25 * (c.gap_a * c.gap_a - c.gap_b * c.gap_b);
  const double im_bound = 0.5 * std::abs(c.gap_a * c.gap_b);

  std::vector<Complex> rho = eigenvalues(c.centered * c.centered);
  std::sort(rho.begin(), rho.end(), [](const Complex& a, const Complex& b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });

  PairingReport rep;
  rep.rho_bounds_ok = true;
  for (const Complex& r : rho)
    if (std::abs(r.real() - re_target) > ctol || std::abs(r.imag()) > im_bound + ctol)
      rep.rho_bounds_ok = false;

  // Single-linkage clustering along the sorted order.
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= rho.size(); ++i) {
    if (i == rho.size() || std::abs(rho[i] - rho[i - 1]) > ctol) {
      ranges.emplace_back(start, i);
      if (i < rho.size() && std::abs(rho[i] - rho[i - 1]) < 10.0 * ctol)
        rep.inconclusive = true;
      start = i;
    }
  }
  for (const auto& [b, e] : ranges) {
    EigenspaceCluster cl;
    cl.dimension = e - b;
    Complex sum = 0.0;
    for (std::size_t i = b; i < e; ++i) sum += rho[i];
    cl.rho = sum / static_cast<double>(cl.dimension);
    cl.zero = std::abs(cl.rho) <= ctol;
    rep.clusters.push_back(cl);
  }

  const double lambda_tol = std::sqrt(tol) * std::sqrt(sc);
  std::vector<std::size_t> matched(rep.clusters.size(), 0);
  for (const Complex& lambda : eigenvalues(realization.x_matrix)) {
    const Complex w = lambda - c.center;
    const Complex r = w * w;
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rep.clusters.size(); ++k) {
      const double d = std::abs(r - rep.clusters[k].rho);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    EigenspaceCluster& cl = rep.clusters[best];
    if (cl.zero) {
      if (std::abs(w) <= lambda_tol) {
        ++matched[best];
        ++cl.plus_count;
      } else {
        ++rep.unmatched_eigenvalues;
      }
      continue;
    }
    const Complex root = std::sqrt(cl.rho);
    const double dp = std::abs(w - root);
    const double dm = std::abs(w + root);
    if (std::min(dp, dm) > lambda_tol) {
      ++rep.unmatched_eigenvalues;
      continue;
    }
    ++matched[best];
    (dp <= dm ? cl.plus_count : cl.minus_count) += 1;
  }

  rep.pairing_ok = rep.unmatched_eigenvalues == 0;
  for (std::size_t k = 0; k < rep.clusters.size(); ++k) {
    EigenspaceCluster& cl = rep.clusters[k];
    cl.consistent = matched[k] == cl.dimension;
    rep.pairing_ok = rep.pairing_ok && cl.consistent;
    if (cl.zero) continue;
    if (cl.plus_count == cl.minus_count && cl.plus_count > 0)
      ++rep.reflected_clusters;
    else if (cl.plus_count == 0 || cl.minus_count == 0)
      ++rep.one_sided_clusters;
  }
  return rep;
}

double freeness_diagnostic(const ModelRealization& realization, int order) {
  if (order < 2 || order > 4)
    throw std::invalid_argument("freeness_diagnostic: order must be 2, 3 or 4");
  const auto n = realization.p_matrix.rows();
  const double nd = static_cast<double>(n);
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix p = realization.p_matrix - (realization.p_matrix.trace() / nd) * id;
  const CMatrix q = realization.q_matrix - (realization.q_matrix.trace() / nd) * id;

  // Product of the first order-1 factors, then tr(A B) = sum_ij A_ij B_ji.
  CMatrix prefix = p;
  for (int k = 1; k + 1 < order; ++k) prefix = prefix * ((k % 2 == 1) ? q : p);
  const CMatrix& last = (order % 2 == 0) ? q : p;
  const Complex tr = prefix.cwiseProduct(last.transpose()).sum();
  return std::abs(tr) / nd;
}

}  // namespace projsum
