#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "projsum/geometry.hpp"
#include "projsum/hermitization.hpp"
#include "projsum/measure.hpp"
#include "projsum/model.hpp"

namespace projsum {

/// Bounded-Lipschitz distance
///   sup { ∫ f d(mu1 - mu2) : f 1-Lipschitz, sup f - inf f <= 1 },
/// which for probability measures is the transport distance with cost
/// min(|x - y|, 1). Both measures are binned onto the shared lattice of
/// cells of side `bin_size` anchored at the origin; the binned problem is
/// solved exactly, and moving atoms to cell centers costs at most
/// bin_size / sqrt(2) per measure.
struct BLDistance {
  double value = 0.0;        // transport cost between the binned measures
  double lower = 0.0;        // dual bound (feasible test function)
  double upper = 0.0;        // primal bound (feasible coupling)
  double binning_error = 0.0;  // |value - exact BL(mu1, mu2)| <= this
  std::size_t bins1 = 0;
  std::size_t bins2 = 0;
};

BLDistance bl_distance(const ComplexMeasure& mu1, const ComplexMeasure& mu2,
                       double bin_size);

struct CornerMasses {
  std::array<Complex, 4> corners{};
  std::array<double, 4> esd_mass{};           // ESD mass within tol scale
  std::array<double, 4> intersection_mass{};  // dim(E_a(P) ∩ E_b(Q)) / n
  std::array<double, 4> predicted{};          // atom_weights(realized a, b)
};

/// Corner masses of the ESD, cross-checked by the dimension of the
/// intersection of the matching eigenspaces of P_n and Q_n (rank of the
/// stacked eigenbases). Works for one-atom laws as well.
CornerMasses corner_atom_masses(const ModelRealization& realization,
                                double tol = 1e-9);

struct ConvergenceReport {
  std::vector<std::size_t> n_schedule;
  std::size_t reference_n = 0;
  std::vector<double> distances;        // pooled ESD vs reference
  std::vector<double> distance_noise;   // Monte Carlo standard error
  std::vector<double> support_devs;     // max dist_to_hr over all ESD points
  std::vector<double> corner_mass_errors;  // max_c |empirical - predicted|
};

struct ConvergenceOptions {
  std::size_t reference_n = 0;  // 0: the largest schedule entry
  double bin_size = 1.0 / 200.0;  // multiplied by the geometry scale
  std::size_t support_resolution = 512;
};

/// For every n in the (strictly increasing) schedule, pools the ESDs of
/// `samples` realizations and measures the BL distance to the pooled
/// reference ESD. The noise estimate comes from single-realization
/// distances. Deterministic in its inputs.
ConvergenceReport convergence_run(const TwoAtomLaw& p_law,
                                  const TwoAtomLaw& q_law,
                                  const std::vector<std::size_t>& n_schedule,
                                  std::size_t samples, std::uint64_t seed,
                                  const ConvergenceOptions& options = {});

/// Weakly decreasing, allowing at most one increase, itself no larger than
/// `noise_factor` times the combined noise of the two neighbors.
bool trend_decreasing(const std::vector<double>& values,
                      const std::vector<double>& noise,
                      double noise_factor = 1.5);

struct TightnessEntry {
  TwoAtomLaw p_law;  // realized
  TwoAtomLaw q_law;  // realized
  double escaping_mass = 0.0;          // ESD mass outside the window
  double escaping_corner_mass = 0.0;   // intersection-dimension mass of the
                                       // corners outside the window
};

/// Informational: ESD mass escaping `window` along a sequence of laws.
std::vector<TightnessEntry> tightness_probe(
    const std::vector<TwoAtomLaw>& p_laws,
    const std::vector<TwoAtomLaw>& q_laws, std::size_t n, std::uint64_t seed,
    const Window& window);

}  // namespace projsum
