#pragma once

#include "vjump/model.hpp"

#include "json.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace vjump {

inline constexpr int kMaxEnumerationSpeeds = 16;

/// Strictly increasing, nonempty set of 0-based speed indices.
class IndexSet {
public:
  /// Sorts the input; throws ValidationError on duplicates, negatives,
  /// indices >= n, or an empty set.
  IndexSet(std::vector<int> indices, int n);

  static IndexSet all(int n);

  const std::vector<int>& indices() const noexcept { return indices_; }
  int size() const noexcept { return static_cast<int>(indices_.size()); }
  bool contains(int i) const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

private:
  std::vector<int> indices_;
};

/// Determinant of B with the rows and columns in `removed` deleted.
/// Returns 1 when every index is removed.
double principal_minor(const TransitionMatrix& B, const IndexSet& removed);

using Arc = std::pair<int, int>;  // (i, j) with i < j

/// A spanning forest in canonical form: arcs sorted, each tree's vertices
/// sorted, trees ordered by their smallest vertex.
struct Forest {
  std::vector<std::vector<int>> trees;
  std::vector<Arc> arcs;
  double weight = 1.0;  // product of arc rates; 1 for the arc-free forest

  friend bool operator==(const Forest&, const Forest&) = default;
};

struct ForestFamily {
  std::optional<IndexSet> constraint;  // empty for the two-tree family
  std::vector<Forest> members;

  double weight_sum() const;
  /// Members whose trees separate i and j (one in each of two trees).
  ForestFamily separating(int i, int j) const;
};

/// Arcs of the rate graph, sorted: every (i, j), i < j, with mu(i,j) > 0.
std::vector<Arc> graph_arcs(const VelocityModel& model);

/// All spanning forests with |I| trees, each tree holding exactly one index
/// of I, in lexicographic order of their sorted arc lists. Requires symmetric
/// rates; throws NumericalGuardError when n > 16.
ForestFamily enumerate_forests(const VelocityModel& model, const IndexSet& roots);

/// Sum of the weights of enumerate_forests(model, roots); equals the principal
/// minor of the transition matrix by the all-minors matrix-tree theorem.
double forest_minor(const VelocityModel& model, const IndexSet& roots);

/// Every spanning forest made of exactly two trees, trees ordered by their
/// smallest vertex. Requires symmetric rates; n > 16 guard.
ForestFamily forest_pairs(const VelocityModel& model);

/// Sum of the first-order principal minors of B.
double first_minor_sum(const TransitionMatrix& B);

/// Debug dump: [{"trees": [[...]], "arcs": [[i,j],...], "weight": w}, ...]
/// with 1-based speed labels.
nlohmann::json to_json(const ForestFamily& family);

}  // namespace vjump
