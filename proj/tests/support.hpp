#pragma once

// Test-only oracles and random instance generators.

#include "vjump/forests.hpp"
#include "vjump/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace vjump::test {

/// Leibniz expansion; exact up to rounding, no pivoting. Small n only.
inline double leibniz_det(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  if (n == 0) return 1.0;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  do {
    int inversions = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) inversions += perm[a] > perm[b];
    double term = inversions % 2 ? -1.0 : 1.0;
    for (int a = 0; a < n; ++a) term *= A(a, perm[a]);
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

inline Eigen::MatrixXd delete_rows_cols(const Eigen::MatrixXd& A, const std::vector<int>& removed) {
  std::vector<int> kept;
  for (int i = 0; i < A.rows(); ++i)
    if (std::find(removed.begin(), removed.end(), i) == removed.end()) kept.push_back(i);
  Eigen::MatrixXd S(kept.size(), kept.size());
  for (std::size_t a = 0; a < kept.size(); ++a)
    for (std::size_t b = 0; b < kept.size(); ++b) S(a, b) = A(kept[a], kept[b]);
  return S;
}

/// Every subset of graph arcs of the right size, filtered by the forest
/// conditions directly. With no roots, `tree_count` fixes the number of trees. Result sorted like the library's family.
inline std::vector<Forest> brute_force_forests(const VelocityModel& model, const std::vector<int>& roots,
                                               int tree_count = -1) {
  const int n = model.speeds();
  std::vector<Arc> arcs = graph_arcs(model);
  const int k = static_cast<int>(roots.size());
  const int want = n - (tree_count < 0 ? k : tree_count);
  std::vector<Forest> out;
  const int m = static_cast<int>(arcs.size());
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    if (std::popcount(mask) != want) continue;
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x];
      return x;
    };
    bool acyclic = true;
    Forest f;
    for (int a = 0; a < m; ++a) {
      if (!(mask & (1u << a))) continue;
      const int x = find(arcs[a].first), y = find(arcs[a].second);
      if (x == y) acyclic = false;
      parent[std::max(x, y)] = std::min(x, y);
      f.arcs.push_back(arcs[a]);
      f.weight *= model.rate(arcs[a].first, arcs[a].second);
    }
    if (!acyclic) continue;
    std::set<int> root_components;
    for (int r : roots) root_components.insert(find(r));
    if (static_cast<int>(root_components.size()) != k) continue;
    std::vector<std::vector<int>> trees;
    for (int c = 0; c < n; ++c) {
      std::vector<int> tree;
      for (int v = 0; v < n; ++v)
        if (find(v) == c) tree.push_back(v);
      if (!tree.empty()) trees.push_back(tree);
    }
    f.trees = trees;
    out.push_back(f);
  }
  std::sort(out.begin(), out.end(), [](const Forest& a, const Forest& b) { return a.arcs < b.arcs; });
  return out;
}

inline Eigen::MatrixXd random_velocities(std::mt19937_64& rng, int n, int d) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd V(n, d);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < d; ++a) V(i, a) = normal(rng);
  return V;
}

/// Uniform in (0, 1].
inline double random_rate(std::mt19937_64& rng) {
  return 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Connected symmetric rate graph: a random spanning tree plus each other
/// arc with probability `extra`.
inline Eigen::MatrixXd random_connected_rates(std::mt19937_64& rng, int n, double extra = 0.3) {
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (int k = 1; k < n; ++k) {
    const int parent = order[std::uniform_int_distribution<int>(0, k - 1)(rng)];
    R(order[k], parent) = R(parent, order[k]) = random_rate(rng);
  }
  std::bernoulli_distribution coin(extra);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (R(i, j) == 0.0 && coin(rng)) R(i, j) = R(j, i) = random_rate(rng);
  return R;
}

/// Symmetric rate graph with each arc present with probability p; may be disconnected.
inline Eigen::MatrixXd random_rates(std::mt19937_64& rng, int n, double p) {
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  std::bernoulli_distribution coin(p);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) R(i, j) = R(j, i) = random_rate(rng);
  return R;
}

inline VelocityModel random_symmetric_model(std::mt19937_64& rng, int n, int d, double extra = 0.3) {
  return VelocityModel(random_velocities(rng, n, d), random_connected_rates(rng, n, extra));
}

/// Velocities in +/- pairs plus an optional trailing zero velocity. Rates
/// are invariant under swapping the two members of any pair, so every pair
/// satisfies det B(2l-1, j) = det B(2l, j).
inline VelocityModel random_paired_model(std::mt19937_64& rng, int pairs, int d, bool zero_velocity) {
  const int n = 2 * pairs + (zero_velocity ? 1 : 0);
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, d);
  const Eigen::MatrixXd base = random_velocities(rng, pairs, d);
  for (int l = 0; l < pairs; ++l) {
    V.row(2 * l) = base.row(l);
    V.row(2 * l + 1) = -base.row(l);
  }
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  for (int p = 0; p < pairs; ++p) {
    R(2 * p, 2 * p + 1) = R(2 * p + 1, 2 * p) = random_rate(rng);
    for (int q = p + 1; q < pairs; ++q) {
      const double c = random_rate(rng);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) R(2 * p + a, 2 * q + b) = R(2 * q + b, 2 * p + a) = c;
    }
    if (zero_velocity) {
      const double e = random_rate(rng);
      for (int a = 0; a < 2; ++a) R(2 * p + a, n - 1) = R(n - 1, 2 * p + a) = e;
    }
  }
  return VelocityModel(std::move(V), std::move(R));
}

inline double relative_error(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

inline double max_norm(const Eigen::MatrixXd& A) { return A.cwiseAbs().maxCoeff(); }

}  // namespace vjump::test
