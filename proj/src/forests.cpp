#include "vjump/forests.hpp"

#include "vjump/errors.hpp"
#include "vjump/kernels.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace vjump {

IndexSet::IndexSet(std::vector<int> indices, int n) : indices_(std::move(indices)) {
  if (indices_.empty()) throw ValidationError("index set must be nonempty");
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
    throw ValidationError("index set has duplicates");
  if (indices_.front() < 0 || indices_.back() >= n)
    throw ValidationError("index out of range 0.." + std::to_string(n - 1));
}

IndexSet IndexSet::all(int n) {
  std::vector<int> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  return IndexSet(std::move(indices), n);
}

bool IndexSet::contains(int i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

double principal_minor(const TransitionMatrix& B, const IndexSet& removed) {
  const int n = B.size();
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (!removed.contains(i)) keep.push_back(i);
  const auto m = keep.size();
  auto a = [&](std::size_t r, std::size_t c) { return B(keep[r], keep[c]); };
  switch (m) {
    case 0: return 1.0;
    case 1: return a(0, 0);
    case 2: return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    case 3:
      return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
             a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
             a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    default: {
      Eigen::MatrixXd sub(m, m);
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c) sub(r, c) = a(r, c);
      return sub.partialPivLu().determinant();
    }
  }
}

double first_minor_sum(const TransitionMatrix& B) {
  double sum = 0.0;
  for (int i = 0; i < B.size(); ++i) sum += principal_minor(B, IndexSet({i}, B.size()));
  return sum;
}

double ForestFamily::weight_sum() const {
  double sum = 0.0;
  for (const auto& forest : members) sum += forest.weight;
  return sum;
}

ForestFamily ForestFamily::separating(int i, int j) const {
  ForestFamily result{constraint, {}};
  for (const auto& forest : members) {
    int tree_i = -1;
    int tree_j = -1;
    for (std::size_t t = 0; t < forest.trees.size(); ++t) {
      const auto& tree = forest.trees[t];
      if (std::binary_search(tree.begin(), tree.end(), i)) tree_i = static_cast<int>(t);
      if (std::binary_search(tree.begin(), tree.end(), j)) tree_j = static_cast<int>(t);
    }
    if (tree_i >= 0 && tree_j >= 0 && tree_i != tree_j) result.members.push_back(forest);
  }
  return result;
}

std::vector<Arc> graph_arcs(const VelocityModel& model) {
  std::vector<Arc> arcs;
  for (int i = 0; i < model.speeds(); ++i)
    for (int j = i + 1; j < model.speeds(); ++j)
      if (model.rate(i, j) > 0.0) arcs.emplace_back(i, j);
  return arcs;
}

namespace {

ForestProblem make_problem(const VelocityModel& model) {
  if (!model.is_symmetric())
    throw PreconditionError("forest enumeration requires symmetric rates");
  if (model.speeds() > kMaxEnumerationSpeeds)
    throw NumericalGuardError("forest enumeration is capped at n = " +
                              std::to_string(kMaxEnumerationSpeeds) + " speeds");
  ForestProblem problem;
  problem.n = model.speeds();
  problem.arcs = graph_arcs(model);
  for (const auto& [i, j] : problem.arcs) problem.weights.push_back(model.rate(i, j));
  return problem;
}

}  // namespace

ForestFamily enumerate_forests(const VelocityModel& model, const IndexSet& roots) {
  ForestProblem problem = make_problem(model);
  problem.premerged = roots.indices();
  problem.target_components = 1;
  return ForestFamily{roots, kernels::enumerate_forests(problem)};
}

double forest_minor(const VelocityModel& model, const IndexSet& roots) {
  ForestProblem problem = make_problem(model);
  problem.premerged = roots.indices();
  problem.target_components = 1;
  return kernels::forest_weight_sum(problem);
}

ForestFamily forest_pairs(const VelocityModel& model) {
  ForestProblem problem = make_problem(model);
  problem.target_components = 2;
  return ForestFamily{std::nullopt, kernels::enumerate_forests(problem)};
}

nlohmann::json to_json(const ForestFamily& family) {
  auto members = nlohmann::json::array();
  for (const auto& forest : family.members) {
    auto trees = nlohmann::json::array();
    for (const auto& tree : forest.trees) {
      auto vertices = nlohmann::json::array();
      for (const int v : tree) vertices.push_back(v + 1);
      trees.push_back(std::move(vertices));
    }
    auto arcs = nlohmann::json::array();
    for (const auto& [i, j] : forest.arcs) arcs.push_back({i + 1, j + 1});
    members.push_back({{"trees", std::move(trees)}, {"arcs", std::move(arcs)}, {"weight", forest.weight}});
  }
  return members;
}

}  // namespace vjump
