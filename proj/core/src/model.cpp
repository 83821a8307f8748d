#include "projsum/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "projsum/errors.hpp"

namespace projsum {

bool TwoAtomLaw::is_two_atom() const noexcept {
  return weight > 0.0 && weight < 1.0 && loc != loc_alt;
}

void TwoAtomLaw::validate() const {
  if (!(weight >= 0.0 && weight <= 1.0))
    throw std::invalid_argument("TwoAtomLaw: weight must lie in [0, 1], got " +
                                std::to_string(weight));
  if (!std::isfinite(loc) || !std::isfinite(loc_alt))
    throw std::invalid_argument("TwoAtomLaw: atom locations must be finite");
}

CMatrix sample_haar_unitary(std::size_t n, RandomStream& rng) {
  if (n == 0) throw InvalidDimension("sample_haar_unitary: n must be >= 1");
  const auto dim = static_cast<Eigen::Index>(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s = 1.0 / std::sqrt(2.0);

  CMatrix g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re * s, im * s);
    }

  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(dim, dim);
  const auto& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

TwoAtomDiagonal build_two_atom_hermitian(const TwoAtomLaw& law, std::size_t n) {
  if (n == 0) throw InvalidDimension("build_two_atom_hermitian: n must be >= 1");
  law.validate();
  const double nd = static_cast<double>(n);
  // nearbyint honors the default round-to-nearest-even mode.
  double k_real = std::nearbyint(nd * (1.0 - law.weight));
  k_real = std::clamp(k_real, 0.0, nd);
  const auto k = static_cast<std::size_t>(k_real);

  TwoAtomDiagonal out;
  out.diagonal.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    out.diagonal(static_cast<Eigen::Index>(i)) = i < k ? law.loc_alt : law.loc;
  out.count_loc = n - k;
  out.realized = {static_cast<double>(n - k) / nd, law.loc, law.loc_alt};
  return out;
}

namespace {

CMatrix conjugate_diagonal(const CMatrix& u, const Eigen::VectorXd& diag) {
  CMatrix scaled = u * diag.cast<Complex>().asDiagonal();
  CMatrix m = scaled * u.adjoint();
  // Exact Hermitian symmetry; the product is Hermitian only up to rounding.
  CMatrix h = 0.5 * (m + m.adjoint());
  for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) = h(i, i).real();
  return h;
}

}  // namespace

ModelRealization assemble_model(const ModelSpec& spec, Rotation rotation) {
  if (spec.n == 0) throw InvalidDimension("assemble_model: n must be >= 1");
  const TwoAtomDiagonal p = build_two_atom_hermitian(spec.p_law, spec.n);
  const TwoAtomDiagonal q = build_two_atom_hermitian(spec.q_law, spec.n);

  ModelRealization out;
  out.seed = spec.seed;
  out.realized_p_law = p.realized;
  out.realized_q_law = q.realized;

  if (rotation == Rotation::identity) {
    out.p_matrix = p.diagonal.cast<Complex>().asDiagonal();
    out.q_matrix = q.diagonal.cast<Complex>().asDiagonal();
  } else {
    RandomStream rng_u = make_stream(spec.seed, stream::kRotationP);
    RandomStream rng_v = make_stream(spec.seed, stream::kRotationQ);
    const CMatrix u = sample_haar_unitary(spec.n, rng_u);
    const CMatrix v = sample_haar_unitary(spec.n, rng_v);
    out.p_matrix = conjugate_diagonal(u, p.diagonal);
    out.q_matrix = conjugate_diagonal(v, q.diagonal);
  }
  out.x_matrix = out.p_matrix + Complex(0.0, 1.0) * out.q_matrix;
  return out;
}

ModelSpec sample_spec(const ModelSpec& spec, std::size_t index) {
  ModelSpec s = spec;
  s.seed = sample_seed(spec.seed, index);
  return s;
}

}  // namespace projsum
