#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "projsum/geometry.hpp"
#include "projsum/measure.hpp"
#include "projsum/model.hpp"

namespace projsum {

/// Eigenvalues of a general complex matrix (Hessenberg-Schur path). Throws
/// ComputationError with norm diagnostics if the QR iteration fails.
std::vector<Complex> eigenvalues(const CMatrix& matrix);

/// Singular values in decreasing order.
Eigen::VectorXd singular_values(const CMatrix& matrix);

/// Largest singular value.
double operator_norm(const CMatrix& matrix);

/// Empirical spectral distribution of X_n: n eigenvalues, weight 1/n each.
ComplexMeasure esd(const ModelRealization& realization);

/// Geometry H_n ∩ R_n of the realized laws. Throws DegenerateGeometry.
HyperbolaRectangle realized_geometry(const ModelRealization& realization);

struct CenteredModel {
  CMatrix centered;  // X_n - center
  Complex center;
  double gap_a = 0.0;
  double gap_b = 0.0;
};

/// X~ = X_n - ((a + a')/2 + i (b + b')/2) for the realized atoms. Throws
/// DegenerateGeometry for one-atom laws.
CenteredModel centered_model(const ModelRealization& realization);

struct StructureReport {
  double re_deviation = 0.0;        // max |Re rho - (A^2 - B^2)/4| over eig(X~^2)
  double im_norm = 0.0;             // ||Im(X~^2)||
  double im_bound = 0.0;            // |A B| / 2, for comparison
  double normality_residual = 0.0;  // ||M M* - M* M|| / ||M||^2, M = X~^2
  double support_deviation = 0.0;   // max over ESD of dist_to_hr
  double scale = 1.0;               // max(|A|, |B|, 1)
};

/// `m` is the hr_points resolution used by dist_to_hr.
StructureReport structure_report(const ModelRealization& realization,
                                 const HyperbolaRectangle& geom,
                                 std::size_t m = 512);

/// Spectral measure of (z - X_n)*(z - X_n): squared singular values of
/// z - X_n, weight 1/n, sorted ascending, clamped at 0.
HalfLineMeasure nu_n_z(const ModelRealization& realization, Complex z);

double min_singular_value(const ModelRealization& realization, Complex z);

/// sigma_min(z - X_n) - dist(z, H_n ∩ R_n)^2 / ||z - X_n||. The lower bound
/// holds for every z and every n, so the margin is >= 0 up to rounding.
double verify_sv_bound(const ModelRealization& realization,
                       const HyperbolaRectangle& geom, Complex z,
                       std::size_t m = 512);

struct EigenspaceCluster {
  Complex rho;                // mean eigenvalue of X~^2 in the cluster
  std::size_t dimension = 0;  // cluster size
  std::size_t plus_count = 0;   // X_n eigenvalues at center + sqrt(rho)
  std::size_t minus_count = 0;  // X_n eigenvalues at center - sqrt(rho)
  bool zero = false;
  bool consistent = false;
};

struct PairingReport {
  std::vector<EigenspaceCluster> clusters;
  bool inconclusive = false;   // two clusters closer than 10 tol scale^2
  bool pairing_ok = false;     // every cluster consistent
  bool rho_bounds_ok = false;  // Re rho = (A^2-B^2)/4, |Im rho| <= |AB|/2
  std::size_t reflected_clusters = 0;  // plus_count == minus_count > 0
  std::size_t one_sided_clusters = 0;  // all eigenvalues on one side
  std::size_t unmatched_eigenvalues = 0;
};

/// Clusters eig(X~^2) at tolerance tol * scale^2 and checks that each
/// nonzero cluster is accounted for by X_n eigenvalues at center ± sqrt(rho)
/// (the zero cluster by eigenvalues at the center), and that rho lies on the
/// vertical line Re rho = (A^2 - B^2)/4 within the |Im rho| bound.
PairingReport eigenspace_pairing_check(const ModelRealization& realization,
                                       double tol = 1e-8);

/// |(1/n) tr(P° Q° P° Q° ...)| for an alternating product of `order`
/// trace-centered factors (A° = A - (tr A / n) I). Throws
/// std::invalid_argument unless 2 <= order <= 4.
double freeness_diagnostic(const ModelRealization& realization, int order);

}  // namespace projsum
