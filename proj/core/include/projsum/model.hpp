#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "projsum/measure.hpp"
#include "projsum/rng.hpp"

namespace projsum {

using CMatrix = Eigen::MatrixXcd;

/// weight * delta_loc + (1 - weight) * delta_loc_alt on the real line.
struct TwoAtomLaw {
  double weight = 1.0;
  double loc = 0.0;
  double loc_alt = 0.0;

  /// weight in (0, 1) and loc != loc_alt.
  bool is_two_atom() const noexcept;

  /// Throws std::invalid_argument unless 0 <= weight <= 1 and both
  /// locations are finite.
  void validate() const;

  friend bool operator==(const TwoAtomLaw&, const TwoAtomLaw&) = default;
};

struct ModelSpec {
  TwoAtomLaw p_law;
  TwoAtomLaw q_law;
  std::size_t n = 1;
  std::uint64_t seed = 0;
};

/// How the deterministic diagonal seeds are rotated.
enum class Rotation {
  haar,      // independent Haar unitaries U, V
  identity,  // U = V = I: commuting diagonal test variant
};

/// One sampled triple (P_n, Q_n, X_n = P_n + i Q_n).
struct ModelRealization {
  CMatrix p_matrix;
  CMatrix q_matrix;
  CMatrix x_matrix;
  TwoAtomLaw realized_p_law;
  TwoAtomLaw realized_q_law;
  std::uint64_t seed = 0;

  std::size_t dimension() const noexcept {
    return static_cast<std::size_t>(x_matrix.rows());
  }
};

/// Haar-distributed n x n unitary: QR of a standard complex Gaussian matrix
/// with the columns of Q rotated by the phases of diag(R), making the
/// factorization unique. Throws InvalidDimension for n == 0.
CMatrix sample_haar_unitary(std::size_t n, RandomStream& rng);

/// Diagonal of a two-atom Hermitian seed together with the law it realizes.
struct TwoAtomDiagonal {
  Eigen::VectorXd diagonal;
  TwoAtomLaw realized;
  std::size_t count_loc = 0;  // multiplicity of law.loc
};

/// k = round_half_even(n (1 - weight)) leading entries equal to loc_alt and
/// the remaining n - k equal to loc; realized weight (n - k) / n.
TwoAtomDiagonal build_two_atom_hermitian(const TwoAtomLaw& law, std::size_t n);

/// P_n = U P' U*, Q_n = V Q' V*, X_n = P_n + i Q_n. U and V come from the
/// disjoint substreams kRotationP / kRotationQ of spec.seed, so the result is
/// a pure function of (spec, rotation).
ModelRealization assemble_model(const ModelSpec& spec,
                                Rotation rotation = Rotation::haar);

/// Spec of the index-th independent realization drawn from `spec`.
ModelSpec sample_spec(const ModelSpec& spec, std::size_t index);

}  // namespace projsum
