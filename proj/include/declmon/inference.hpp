#pragma once

#include "declmon/formula.hpp"
#include "declmon/semantics.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace declmon {

/// A definite atom value recovered by a receiver. Negated atoms are stored
/// as the positive atom with the flipped value.
struct Deduction {
  std::string atom;
  Step time = 0;
  TruthValue3 value = TruthValue3::Top; // never Unknown

  Fact fact() const { return Fact{atom, time}; }
  friend auto operator<=>(const Deduction &, const Deduction &) = default;
  friend bool operator==(const Deduction &, const Deduction &) = default;
  std::string to_string() const; // "a@3=T"
};

/// What a receiver assumes the evaluator knew: the facts whose definite
/// values were available to it. Either an explicit set or a predicate
/// (the latter for obs-power models that span the whole history).
class ObservationSet {
public:
  ObservationSet() = default;
  ObservationSet(ProcessId owner, FactSet known)
      : owner_(std::move(owner)), known_(std::move(known)) {}
  ObservationSet(ProcessId owner, std::function<bool(const Fact &)> pred)
      : owner_(std::move(owner)), pred_(std::move(pred)) {}

  /// All listed atoms observed at one step.
  static ObservationSet at_step(ProcessId owner,
                                const std::vector<std::string> &atoms,
                                Step step);

  const ProcessId &owner() const noexcept { return owner_; }
  bool knows(const std::string &atom, Step step) const;

private:
  ProcessId owner_;
  FactSet known_;
  std::function<bool(const Fact &)> pred_;
};

/// `formula` was evaluated to `value` by `evaluator` about state `time`.
struct EvaluatedFormula {
  Formula formula;
  TruthValue3 value = TruthValue3::Unknown;
  ProcessId evaluator;
  Step time = 0;
};

enum class RuleId {
  R1 = 1, R2, R3, R4, R5, R6, R7, R8, R9, R10, R11, R12
};
const char *to_string(RuleId r) noexcept;

/// Lowest-numbered rule whose shape, premise value, and observation side
/// conditions match. Atoms and unmatched shapes give nullopt.
std::optional<RuleId> match_rule(const Formula &f, TruthValue3 v,
                                 const ObservationSet &sender_obs,
                                 Step time = 0);

/// Shapes kept in truth tables: temporal-free And/Or formulas (which
/// decompose into the propositional rules) and G/F over a temporal-free
/// body.
bool matches_rule_shape(const Formula &f);

/// Atom values a receiver can be certain of after learning `ev`.
/// Temporal-free formulas are handled at ev.time; G/F formulas are routed
/// to deduce_temporal at ev.time; any other temporal shape yields nothing.
std::vector<Deduction> deduce(const EvaluatedFormula &ev,
                              const ObservationSet &sender_obs);

/// Bounded-scope unfolding: G φ = T gives φ = T at every step 0..n and
/// F φ = F gives φ = F at every step 0..n; each step is then decomposed.
/// Throws Error if ev.formula is not G/F over a temporal-free body.
std::vector<Deduction> deduce_temporal(const EvaluatedFormula &ev,
                                       const ObservationSet &sender_obs,
                                       Step n);

/// Facts covered by deduce().
FactSet deduction_set(const Formula &f, TruthValue3 v,
                      const ObservationSet &sender_obs, Step time = 0);

} // namespace declmon
