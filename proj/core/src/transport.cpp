#include "projsum/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "projsum/errors.hpp"

namespace projsum {
namespace {

struct Arc {
  int row;
  int col;
  std::int64_t flow;
};

// Spanning-tree basis of a balanced transportation problem. Nodes 0..m-1 are
// supplies, m..m+k-1 demands.
class TransportSimplex {
 public:
  TransportSimplex(const std::vector<std::int64_t>& supply,
                   const std::vector<std::int64_t>& demand,
                   const Eigen::MatrixXd& cost)
      : m_(static_cast<int>(supply.size())),
        k_(static_cast<int>(demand.size())),
        cost_(cost),
        supply_(supply),
        demand_(demand),
        adj_(static_cast<std::size_t>(m_ + k_)),
        pot_(static_cast<std::size_t>(m_ + k_)),
        parent_arc_(static_cast<std::size_t>(m_ + k_)),
        depth_(static_cast<std::size_t>(m_ + k_)) {
    northwest_corner();
  }

  TransportSolution solve() {
    TransportSolution sol;
    const long total_arcs = static_cast<long>(m_) * k_;
    const long block = std::max<long>(
        16, static_cast<long>(std::sqrt(static_cast<double>(total_arcs))));
    const std::size_t max_pivots =
        200 * static_cast<std::size_t>(m_ + k_) * static_cast<std::size_t>(m_ + k_) + 1000;
    long cursor = 0;
    compute_potentials();
    while (true) {
      // Block pricing: scan arcs cyclically, stop after the first block that
      // contains a negative reduced cost and take its most negative arc.
      int best_row = -1;
      int best_col = -1;
      double best_r = -kEps;
      long scanned = 0;
      long in_block = 0;
      while (scanned < total_arcs) {
        const int i = static_cast<int>(cursor / k_);
        const int j = static_cast<int>(cursor % k_);
        const double r = cost_(i, j) - pot_[static_cast<std::size_t>(i)] -
                         pot_[static_cast<std::size_t>(m_ + j)];
        if (r < best_r) {
          best_r = r;
          best_row = i;
          best_col = j;
        }
        cursor = (cursor + 1) % total_arcs;
        ++scanned;
        if (++in_block == block) {
          if (best_row >= 0) break;
          in_block = 0;
        }
      }
      if (best_row < 0) {
        sol.optimal = true;
        break;
      }
      pivot(best_row, best_col);
      compute_potentials();
      if (++sol.pivots > max_pivots)
        throw ComputationError("solve_transport: pivot limit exceeded");
    }

    double primal = 0.0;
    for (const Arc& a : arcs_)
      primal += static_cast<double>(a.flow) * cost_(a.row, a.col);

    // Feasible dual: keep supply potentials, tighten demand potentials by the
    // c-transform so that u_i + v_j <= c_ij holds everywhere.
    double dual = 0.0;
    for (int i = 0; i < m_; ++i)
      dual += static_cast<double>(supply_[static_cast<std::size_t>(i)]) *
              pot_[static_cast<std::size_t>(i)];
    for (int j = 0; j < k_; ++j) {
      double v = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i)
        v = std::min(v, cost_(i, j) - pot_[static_cast<std::size_t>(i)]);
      dual += static_cast<double>(demand_[static_cast<std::size_t>(j)]) * v;
    }
    const double total = static_cast<double>(
        std::accumulate(supply_.begin(), supply_.end(), std::int64_t{0}));
    sol.cost = primal / total;
    sol.dual_bound = dual / total;
    return sol;
  }

 private:
  static constexpr double kEps = 1e-12;

  void add_arc(int row, int col, std::int64_t flow) {
    const int id = static_cast<int>(arcs_.size());
    arcs_.push_back({row, col, flow});
    adj_[static_cast<std::size_t>(row)].push_back(id);
    adj_[static_cast<std::size_t>(m_ + col)].push_back(id);
  }

  void northwest_corner() {
    std::vector<std::int64_t> ra = supply_;
    std::vector<std::int64_t> rb = demand_;
    int i = 0;
    int j = 0;
    while (true) {
      const std::int64_t f = std::min(ra[static_cast<std::size_t>(i)],
                                      rb[static_cast<std::size_t>(j)]);
      add_arc(i, j, f);
      ra[static_cast<std::size_t>(i)] -= f;
      rb[static_cast<std::size_t>(j)] -= f;
      if (i == m_ - 1 && j == k_ - 1) break;
      if ((ra[static_cast<std::size_t>(i)] == 0 && i < m_ - 1) || j == k_ - 1)
        ++i;
      else
        ++j;
    }
  }

  int other_end(const Arc& a, int node) const {
    return node < m_ ? m_ + a.col : a.row;
  }

  // BFS from node 0: potentials (u_0 = 0, u_i + v_j = c_ij on tree arcs),
  // parent arcs and depths.
  void compute_potentials() {
    const std::size_t n = static_cast<std::size_t>(m_ + k_);
    std::fill(depth_.begin(), depth_.end(), -1);
    queue_.assign(1, 0);
    depth_[0] = 0;
    pot_[0] = 0.0;
    parent_arc_[0] = -1;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const int node = queue_[head];
      for (int id : adj_[static_cast<std::size_t>(node)]) {
        const Arc& a = arcs_[static_cast<std::size_t>(id)];
        const int next = other_end(a, node);
        if (depth_[static_cast<std::size_t>(next)] >= 0) continue;
        depth_[static_cast<std::size_t>(next)] = depth_[static_cast<std::size_t>(node)] + 1;
        parent_arc_[static_cast<std::size_t>(next)] = id;
        pot_[static_cast<std::size_t>(next)] =
            cost_(a.row, a.col) - pot_[static_cast<std::size_t>(node)];
        queue_.push_back(next);
      }
    }
    if (queue_.size() != n)
      throw ComputationError("solve_transport: basis is not a spanning tree");
  }

  int parent_of(int node) const {
    const Arc& a = arcs_[static_cast<std::size_t>(parent_arc_[static_cast<std::size_t>(node)])];
    return other_end(a, node);
  }

  void pivot(int row, int col) {
    // Cycle = entering arc (+) and the tree path from demand `col` back to
    // supply `row`, with alternating signs. An arc whose lower endpoint x is
    // on the supply-side chain gets '-' iff x is a supply node; on the
    // demand-side chain '-' iff x is a demand node.
    cycle_.clear();
    int a = row;
    int b = m_ + col;
    auto push = [&](int child, bool from_row_side) {
      const bool child_is_row = child < m_;
      const bool minus = from_row_side ? child_is_row : !child_is_row;
      cycle_.push_back({parent_arc_[static_cast<std::size_t>(child)], minus});
    };
    while (depth_[static_cast<std::size_t>(a)] > depth_[static_cast<std::size_t>(b)]) {
      push(a, true);
      a = parent_of(a);
    }
    while (depth_[static_cast<std::size_t>(b)] > depth_[static_cast<std::size_t>(a)]) {
      push(b, false);
      b = parent_of(b);
    }
    while (a != b) {
      push(a, true);
      a = parent_of(a);
      push(b, false);
      b = parent_of(b);
    }

    std::int64_t theta = std::numeric_limits<std::int64_t>::max();
    int leaving = -1;
    for (const auto& [id, minus] : cycle_) {
      if (!minus) continue;
      const std::int64_t f = arcs_[static_cast<std::size_t>(id)].flow;
      if (f < theta) {
        theta = f;
        leaving = id;
      }
    }
    for (const auto& [id, minus] : cycle_)
      arcs_[static_cast<std::size_t>(id)].flow += minus ? -theta : theta;

    // Reuse the leaving slot for the entering arc.
    Arc& slot = arcs_[static_cast<std::size_t>(leaving)];
    detach(slot.row, leaving);
    detach(m_ + slot.col, leaving);
    slot = {row, col, theta};
    adj_[static_cast<std::size_t>(row)].push_back(leaving);
    adj_[static_cast<std::size_t>(m_ + col)].push_back(leaving);
  }

  void detach(int node, int id) {
    auto& list = adj_[static_cast<std::size_t>(node)];
    auto it = std::find(list.begin(), list.end(), id);
    *it = list.back();
    list.pop_back();
  }

  int m_;
  int k_;
  const Eigen::MatrixXd& cost_;
  std::vector<std::int64_t> supply_;
  std::vector<std::int64_t> demand_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> adj_;
  std::vector<double> pot_;
  std::vector<int> parent_arc_;
  std::vector<int> depth_;
  std::vector<int> queue_;
  std::vector<std::pair<int, bool>> cycle_;
};

}  // namespace

TransportSolution solve_transport(const std::vector<std::int64_t>& supply,
                                  const std::vector<std::int64_t>& demand,
                                  const Eigen::MatrixXd& cost) {
  if (supply.empty() || demand.empty())
    throw std::invalid_argument("solve_transport: empty side");
  if (cost.rows() != static_cast<Eigen::Index>(supply.size()) ||
      cost.cols() != static_cast<Eigen::Index>(demand.size()))
    throw std::invalid_argument("solve_transport: cost matrix shape mismatch");
  for (auto s : supply)
    if (s < 0) throw std::invalid_argument("solve_transport: negative supply");
  for (auto d : demand)
    if (d < 0) throw std::invalid_argument("solve_transport: negative demand");
  const auto ts = std::accumulate(supply.begin(), supply.end(), std::int64_t{0});
  const auto td = std::accumulate(demand.begin(), demand.end(), std::int64_t{0});
  if (ts != td || ts == 0)
    throw std::invalid_argument("solve_transport: unbalanced or zero totals");
  return TransportSimplex(supply, demand, cost).solve();
}

}  // namespace projsum
