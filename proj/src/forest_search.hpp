#pragma once

// Include/exclude search over the sorted arc list shared by the serial and
// OpenMP forest enumerators. An arc is included only when it joins two
// different components, and excluded only when the included arcs together
// with the arcs still ahead can reach the target component count, so every
// branch ends in a forest.

#include "vjump/kernels.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

namespace vjump::detail {

class ForestSearch {
public:
  using Parents = std::array<std::int8_t, kMaxEnumerationSpeeds>;

  explicit ForestSearch(const ForestProblem& problem) : problem_(problem) {
    for (int i = 0; i < problem_.n; ++i) initial_[i] = static_cast<std::int8_t>(i);
    nodes_ = problem_.n;
    for (std::size_t k = 1; k < problem_.premerged.size(); ++k) {
      unite(initial_, problem_.premerged[0], problem_.premerged[k]);
      --nodes_;
    }
    required_ = nodes_ - problem_.target_components;
  }

  int arc_count() const { return static_cast<int>(problem_.arcs.size()); }
  int required_arcs() const { return required_; }

  /// Every forest, in lexicographic order of arc lists.
  void run_all(std::vector<Forest>& out) const {
    if (required_ < 0 || !feasible(initial_, 0)) return;
    std::vector<int> chosen;
    recurse(0, initial_, chosen, out);
  }

  /// Forests whose smallest arc is `first`; the arc-free forest when first < 0.
  void run_from_first(int first, std::vector<Forest>& out) const {
    if (required_ < 0) return;
    if (first < 0) {
      if (required_ == 0 && feasible(initial_, arc_count())) out.push_back(make_forest({}));
      return;
    }
    if (required_ == 0 || !feasible(initial_, first)) return;
    Parents uf = initial_;
    const auto [a, b] = problem_.arcs[first];
    if (find(uf, a) == find(uf, b)) return;
    unite(uf, a, b);
    std::vector<int> chosen{first};
    recurse(first + 1, uf, chosen, out);
  }

  /// Total weight without materialising forests.
  double sum_all() const {
    if (required_ < 0 || !feasible(initial_, 0)) return 0.0;
    return sum(0, initial_, 0, 1.0);
  }

  double sum_from_first(int first) const {
    if (required_ < 0) return 0.0;
    if (first < 0) return required_ == 0 && feasible(initial_, arc_count()) ? 1.0 : 0.0;
    if (required_ == 0 || !feasible(initial_, first)) return 0.0;
    Parents uf = initial_;
    const auto [a, b] = problem_.arcs[first];
    if (find(uf, a) == find(uf, b)) return 0.0;
    unite(uf, a, b);
    return sum(first + 1, uf, 1, problem_.weights[first]);
  }

private:
  static int find(const Parents& uf, int i) {
    while (uf[i] != i) i = uf[i];
    return i;
  }
  static void unite(Parents& uf, int a, int b) {
    const int ra = find(uf, a);
    const int rb = find(uf, b);
    if (ra != rb) uf[std::max(ra, rb)] = static_cast<std::int8_t>(std::min(ra, rb));
  }

  // Components of (included arcs + arcs[from..]) <= target.
  bool feasible(const Parents& uf, int from) const {
    Parents all = uf;
    int components = components_of(uf);
    for (int k = from; k < arc_count(); ++k) {
      const auto [a, b] = problem_.arcs[k];
      const int ra = find(all, a);
      const int rb = find(all, b);
      if (ra != rb) {
        all[std::max(ra, rb)] = static_cast<std::int8_t>(std::min(ra, rb));
        if (--components <= problem_.target_components) return true;
      }
    }
    return components <= problem_.target_components;
  }

  int components_of(const Parents& uf) const {
    int count = 0;
    for (int i = 0; i < problem_.n; ++i)
      if (uf[i] == i) ++count;
    return count;
  }

  void recurse(int pos, const Parents& uf, std::vector<int>& chosen,
               std::vector<Forest>& out) const {
    if (static_cast<int>(chosen.size()) == required_) {
      out.push_back(make_forest(chosen));
      return;
    }
    if (pos == arc_count()) return;

    const auto [a, b] = problem_.arcs[pos];
    if (find(uf, a) != find(uf, b)) {
      Parents next = uf;
      unite(next, a, b);
      chosen.push_back(pos);
      recurse(pos + 1, next, chosen, out);
      chosen.pop_back();
    }
    if (feasible(uf, pos + 1)) recurse(pos + 1, uf, chosen, out);
  }

  double sum(int pos, const Parents& uf, int chosen, double weight) const {
    if (chosen == required_) return weight;
    if (pos == arc_count()) return 0.0;
    double total = 0.0;
    const auto [a, b] = problem_.arcs[pos];
    if (find(uf, a) != find(uf, b)) {
      Parents next = uf;
      unite(next, a, b);
      total += sum(pos + 1, next, chosen + 1, weight * problem_.weights[pos]);
    }
    if (feasible(uf, pos + 1)) total += sum(pos + 1, uf, chosen, weight);
    return total;
  }

  Forest make_forest(const std::vector<int>& chosen) const {
    Forest forest;
    Parents uf{};
    for (int i = 0; i < problem_.n; ++i) uf[i] = static_cast<std::int8_t>(i);
    for (const int k : chosen) {
      forest.arcs.push_back(problem_.arcs[k]);
      forest.weight *= problem_.weights[k];
      unite(uf, problem_.arcs[k].first, problem_.arcs[k].second);
    }
    // Roots are the smallest vertex of each tree, so trees come out ordered.
    std::array<int, kMaxEnumerationSpeeds> slot{};
    slot.fill(-1);
    for (int i = 0; i < problem_.n; ++i) {
      const int root = find(uf, i);
      if (slot[root] < 0) {
        slot[root] = static_cast<int>(forest.trees.size());
        forest.trees.emplace_back();
      }
      forest.trees[slot[root]].push_back(i);
    }
    return forest;
  }

  const ForestProblem& problem_;
  Parents initial_{};
  int nodes_ = 0;
  int required_ = 0;
};

}  // namespace vjump::detail
