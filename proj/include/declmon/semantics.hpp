#pragma once

#include "declmon/formula.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace declmon {

/// Global time step, 0-based.
using Step = int;
using ProcessId = std::string;

enum class TruthValue3 : unsigned char { Unknown = 0, Top = 1, Bot = 2 };

constexpr TruthValue3 from_bool(bool b) noexcept {
  return b ? TruthValue3::Top : TruthValue3::Bot;
}
constexpr bool is_definite(TruthValue3 v) noexcept {
  return v != TruthValue3::Unknown;
}
TruthValue3 kleene_not(TruthValue3 v) noexcept;
TruthValue3 kleene_and(TruthValue3 a, TruthValue3 b) noexcept;
TruthValue3 kleene_or(TruthValue3 a, TruthValue3 b) noexcept;
/// "T", "F", "?"
const char *to_string(TruthValue3 v) noexcept;
std::ostream &operator<<(std::ostream &os, TruthValue3 v);

/// An (atom, step) pair: one observable fact about the global trace.
struct Fact {
  std::string atom;
  Step step = 0;
  friend auto operator<=>(const Fact &, const Fact &) = default;
  friend bool operator==(const Fact &, const Fact &) = default;
  std::string to_string() const;
};

using FactSet = std::set<Fact>;

/// The atoms that hold in one global step; unlisted atoms are false.
struct Event {
  std::set<std::string> true_atoms;
  bool holds(const std::string &atom) const {
    return true_atoms.count(atom) != 0;
  }
  friend bool operator==(const Event &, const Event &) = default;
};

using Trace = std::vector<Event>;

/// Processes in PID order with their pairwise-disjoint local atoms.
class SystemAlphabet {
public:
  SystemAlphabet() = default;
  /// Throws Error if an atom is assigned to two processes or a process
  /// name repeats.
  SystemAlphabet(std::vector<ProcessId> processes,
                 std::map<ProcessId, std::set<std::string>> assignment);

  /// "A:a1,a2;B:b;C:c"
  static SystemAlphabet parse(std::string_view text);

  const std::vector<ProcessId> &processes() const noexcept {
    return processes_;
  }
  std::size_t process_count() const noexcept { return processes_.size(); }
  const std::set<std::string> &atoms_of(const ProcessId &p) const;
  /// Position of p in processes(); throws if unknown.
  std::size_t pid(const ProcessId &p) const;
  /// Owner of an atom, or nullptr.
  const ProcessId *owner(const std::string &atom) const;
  std::set<std::string> all_atoms() const;
  /// Restriction of an event to a process's atoms.
  Event project(const Event &e, const ProcessId &p) const;
  std::string to_string() const;

private:
  std::vector<ProcessId> processes_;
  std::map<ProcessId, std::set<std::string>> assignment_;
  std::unordered_map<std::string, ProcessId> owner_;
};

/// Definite knowledge of atoms over time. Absent entries are unknown.
class PartialValuation {
public:
  TruthValue3 get(const std::string &atom, Step step) const;
  TruthValue3 get(const Fact &f) const { return get(f.atom, f.step); }
  /// Stores a definite value. Returns false if the fact was already known
  /// with the same value; throws ConflictError on a contradicting value.
  bool set(const std::string &atom, Step step, bool value);
  bool contains(const std::string &atom, Step step) const;
  std::size_t size() const noexcept { return values_.size(); }
  const std::map<Fact, bool> &entries() const noexcept { return values_; }

private:
  std::map<Fact, bool> values_;
};

/// A definite value arrived for a fact that already held the opposite one.
class ConflictError : public Error {
public:
  using Error::Error;
};

/// Parses a trace file: one step per line, comma-separated true atoms,
/// `-` for the empty step, `#` starts a comment, blank lines are ignored.
Trace parse_trace(std::string_view text);
std::string format_trace(const Trace &trace);

/// Strong-Kleene evaluation at step `t`. Temporal subformulas are looked up
/// in `temporal` (by structural equality); a missing one throws Error.
TruthValue3
eval3(const Formula &f, const PartialValuation &v, Step t,
      const std::unordered_map<Formula, TruthValue3, FormulaHash> &temporal =
          {});

/// Same, with atom values given by a callback.
TruthValue3
eval3(const Formula &f,
      const std::function<TruthValue3(const std::string &)> &atom_value);

/// Formula progression through one event, followed by simplify().
Formula progress(const Formula &f, const Event &e);

/// Atom resolution for partial progression. Returning Unknown keeps the
/// atom symbolic as a frozen reference (see ref_atom).
using AtomResolver = std::function<TruthValue3(const std::string &atom)>;

/// Progression where the current step's atoms may be unknown. Unknown atoms
/// become frozen references `atom@step` that later progression leaves
/// untouched. Frozen references only occur outside temporal operators.
Formula progress_partial(const Formula &f, Step step,
                         const AtomResolver &resolve);

/// Replaces frozen references whose fact is known, then simplifies.
Formula
resolve_refs(const Formula &f,
             const std::function<TruthValue3(const Fact &)> &known);

/// Name of the frozen reference for a fact ("a@3").
std::string ref_atom(const Fact &f);
/// Inverse of ref_atom; nullopt for ordinary atoms.
std::optional<Fact> parse_ref_atom(const std::string &name);
/// True if `f` contains any frozen reference.
bool has_refs(const Formula &f);

} // namespace declmon
