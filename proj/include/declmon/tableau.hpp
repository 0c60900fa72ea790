#pragma once

#include "declmon/formula.hpp"
#include "declmon/semantics.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace declmon {

enum class NodeStatus { Open, Ticked, Crossed };

struct TableauNode {
  std::vector<Formula> label;
  std::vector<std::size_t> children;
  std::size_t parent = npos;
  NodeStatus status = NodeStatus::Open;
  /// First node of a new time step (its label came from stripping X).
  bool step = false;
  /// Leaf whose label repeats an earlier step label.
  bool loop_closure = false;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// A tree tableau stored as an arena; node 0 is the root.
class Tableau {
public:
  Tableau() = default;
  Tableau(Formula formula, std::vector<TableauNode> nodes)
      : formula_(std::move(formula)), nodes_(std::move(nodes)) {}

  const Formula &formula() const noexcept { return formula_; }
  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  const TableauNode &node(std::size_t i) const { return nodes_.at(i); }
  const std::vector<TableauNode> &nodes() const noexcept { return nodes_; }

  /// Root-to-leaf paths ending in a Ticked leaf, in pre-order.
  std::vector<std::vector<std::size_t>> ticked_branches() const;
  /// Distinct formulas along a branch, in order of first appearance.
  std::vector<Formula> branch_formulas(const std::vector<std::size_t> &branch) const;

private:
  Formula formula_;
  std::vector<TableauNode> nodes_;
};

/// Thrown when a tableau grows past the node budget.
class TableauLimitError : public Error {
public:
  using Error::Error;
};

inline constexpr std::size_t kDefaultNodeLimit = 2'000'000;

/// Builds the full tableau for an nnf formula. Expansion order follows the
/// AST left to right. A step whose label repeats an ancestor step label
/// closes the branch: Ticked if every eventuality of the repeated label was
/// fulfilled inside the loop, Crossed otherwise.
Tableau build(const Formula &f, std::size_t node_limit = kDefaultNodeLimit);

bool is_satisfiable(const Tableau &t);

/// Same answer as is_satisfiable(build(nnf(f))), but searches depth-first,
/// stops at the first Ticked leaf, and memoizes results.
bool satisfiable(const Formula &f);

/// Drops subtrees without a Ticked leaf and folds loop-closure leaves into
/// their parents. Idempotent.
Tableau refine(const Tableau &t);

struct BranchProfile {
  std::size_t branch_id = 0;
  std::set<std::string> literal_atoms;
  std::map<ProcessId, std::size_t> per_process_count;
};

std::vector<BranchProfile> branch_profiles(const Tableau &t,
                                           const SystemAlphabet &alpha);

/// Graphviz rendering; labels use the formula grammar.
std::string to_dot(const Tableau &t);

enum class Satisfiability { Unsatisfiable, Satisfiable, Valid };
Satisfiability classify(const Formula &f);
const char *to_string(Satisfiability s) noexcept;

/// Centralized three-valued verdict of `f` on the finite prefix `u`.
TruthValue3 ltl3_eval(const Trace &u, const Formula &f);

/// Verdict of a residual obligation: Top if valid, Bot if unsatisfiable.
TruthValue3 residual_verdict(const Formula &residual);

} // namespace declmon
