#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace projsum {

/// Balanced transportation problem with integer supplies/demands
/// (sum(supply) == sum(demand)) and a dense cost matrix, solved exactly by
/// the transportation simplex. The basis is kept as a spanning tree over the
/// rows + columns; entering arcs are chosen by block pricing.
struct TransportSolution {
  double cost = 0.0;       // primal objective / total mass
  double dual_bound = 0.0; // dual objective / total mass of feasible potentials
  std::size_t pivots = 0;
  bool optimal = false;    // no negative reduced cost left
};

/// Throws std::invalid_argument for mismatched sizes, negative masses or
/// unbalanced totals.
TransportSolution solve_transport(const std::vector<std::int64_t>& supply,
                                  const std::vector<std::int64_t>& demand,
                                  const Eigen::MatrixXd& cost);

}  // namespace projsum
