#pragma once

#include "declmon/formula.hpp"
#include "declmon/inference.hpp"
#include "declmon/semantics.hpp"
#include "declmon/tableau.hpp"

#include <functional>
#include <map>
#include <unordered_map>
#include <vector>

namespace declmon {

/// Static ring: every process sends to its successor once per round.
class CommScheme {
public:
  CommScheme() = default;
  explicit CommScheme(std::vector<ProcessId> ring);

  const std::vector<ProcessId> &ring() const noexcept { return ring_; }
  std::size_t size() const noexcept { return ring_.size(); }
  const ProcessId &successor(const ProcessId &p) const;
  const ProcessId &predecessor(const ProcessId &p) const;
  /// Rounds for information at `from` to reach `to`; 0 when equal.
  std::size_t distance(const ProcessId &from, const ProcessId &to) const;
  /// Largest distance between any two processes (n - 1).
  std::size_t diameter() const noexcept {
    return ring_.empty() ? 0 : ring_.size() - 1;
  }
  std::string to_string() const; // "A -> B -> C -> A"

private:
  std::size_t position(const ProcessId &p) const;
  std::vector<ProcessId> ring_;
};

/// Deterministic observation power: what each process knows at each round
/// when every message relays all new knowledge along the ring.
class ObsPowerModel {
public:
  ObsPowerModel(CommScheme scheme, SystemAlphabet alpha);

  const CommScheme &scheme() const noexcept { return scheme_; }
  const SystemAlphabet &alphabet() const noexcept { return alpha_; }

  /// Whether `p` knows `fact` at round `t`: own atoms up to t, and atoms of
  /// q at steps tau with t - tau >= distance(q, p).
  bool knows(const ProcessId &p, const Fact &fact, Step t) const;
  /// The obs_power(p, t) view as an ObservationSet.
  ObservationSet observation(const ProcessId &p, Step t) const;

private:
  CommScheme scheme_;
  SystemAlphabet alpha_;
};

/// obs_power(p, t) enumerated over the whole alphabet.
FactSet obs_power(const ObsPowerModel &m, const ProcessId &p, Step t);
/// obs_power(sender, t) minus obs_power(receiver, t).
FactSet obs_diff(const ObsPowerModel &m, const ProcessId &sender,
                 const ProcessId &receiver, Step t);
/// Earliest step with a fact in obs_diff, if any.
std::optional<Step> earliest_new_step(const ObsPowerModel &m,
                                      const ProcessId &sender,
                                      const ProcessId &receiver, Step t);

/// Shared formula numbering: the rule-shaped formulas of the refined
/// tableau in pre-order, then the atoms of the monitored formula in order
/// of first occurrence. Every process builds the same index.
class FormulaIndex {
public:
  FormulaIndex() = default;
  static FormulaIndex build(const Formula &phi, const Tableau &refined);

  std::size_t size() const noexcept { return formulas_.size(); }
  const Formula &at(std::size_t i) const { return formulas_.at(i); }
  std::optional<std::size_t> find(const Formula &f) const;
  const std::vector<Formula> &formulas() const noexcept { return formulas_; }
  /// Bits to address an entry: ceil(log2 K), 0 for K <= 1.
  unsigned index_bits() const noexcept;

private:
  std::vector<Formula> formulas_;
  std::unordered_map<Formula, std::size_t, FormulaHash> lookup_;
};

struct TruthTableEntry {
  Formula formula;
  TruthValue3 value = TruthValue3::Unknown;
  std::size_t index = 0;
};

/// Values of the indexed formulas about one state.
struct TruthTable {
  Step state = 0;
  std::vector<TruthTableEntry> entries;
};

/// Fact lookup used when evaluating table entries.
using FactView = std::function<TruthValue3(const Fact &)>;

/// Value of an indexed formula about `state`: atoms and propositional
/// formulas are read at that state; G/F use the bounded scope 0..state.
TruthValue3 evaluate_entry(const Formula &f, Step state, const FactView &view);

/// All values Unknown.
TruthTable build_truth_table(const Formula &phi, const Tableau &refined,
                             Step state);
TruthTable make_truth_table(const FormulaIndex &index, Step state);

/// Per-process knowledge: definite atom values plus live truth tables.
class KnowledgeStore {
public:
  KnowledgeStore() = default;
  KnowledgeStore(ProcessId owner, FormulaIndex index);

  const ProcessId &owner() const noexcept { return owner_; }
  const PartialValuation &valuation() const noexcept { return valuation_; }
  const std::map<Step, TruthTable> &tables() const noexcept { return tables_; }
  const FormulaIndex &index() const noexcept { return index_; }

  /// Restricts which facts table values may use (default: all known).
  void set_visibility(std::function<bool(const Fact &)> visible) {
    visible_ = std::move(visible);
  }

  /// Records the owner's atoms of `local` at step t; atoms of `own` absent
  /// from the event are false.
  void observe(const Event &local, const std::set<std::string> &own, Step t);
  /// Adds deductions; throws ConflictError on a contradiction. Returns the
  /// facts that were new.
  FactSet update(const std::vector<Deduction> &ds);

  /// Materializes (or refreshes) the table for `state`.
  const TruthTable &table(Step state);
  /// Re-evaluates every live table.
  void refresh();
  /// Drops tables for states before `state`.
  void collect_before(Step state);

  /// Current table footprint: live tables x entries x 2 bits.
  std::size_t table_bits() const noexcept;

  TruthValue3 known(const Fact &f) const { return valuation_.get(f); }

private:
  TruthValue3 visible_value(const Fact &f) const;
  void evaluate(TruthTable &t) const;

  ProcessId owner_;
  FormulaIndex index_;
  PartialValuation valuation_;
  std::map<Step, TruthTable> tables_;
  std::function<bool(const Fact &)> visible_;
};

/// Free-function form of KnowledgeStore::update for value-style use.
KnowledgeStore update(KnowledgeStore store, const std::vector<Deduction> &ds);

} // namespace declmon
