#include "declmon/inference.hpp"

#include <algorithm>
#include <map>

namespace declmon {

std::string Deduction::to_string() const {
  return atom + "@" + std::to_string(time) + "=" + declmon::to_string(value);
}

ObservationSet ObservationSet::at_step(ProcessId owner,
                                       const std::vector<std::string> &atoms,
                                       Step step) {
  FactSet known;
  for (const auto &a : atoms)
    known.insert(Fact{a, step});
  return ObservationSet(std::move(owner), std::move(known));
}

bool ObservationSet::knows(const std::string &atom, Step step) const {
  if (pred_)
    return pred_(Fact{atom, step});
  return known_.count(Fact{atom, step}) != 0;
}

const char *to_string(RuleId r) noexcept {
  static const char *names[] = {"R1", "R2", "R3", "R4",  "R5",  "R6",
                                "R7", "R8", "R9", "R10", "R11", "R12"};
  return names[static_cast<int>(r) - 1];
}

namespace {

const std::string &literal_atom(const Formula &f) {
  return f.is_atom() ? f.name() : f.child().name();
}

bool all_literals(const Formula &f) {
  return std::all_of(f.children().begin(), f.children().end(),
                     [](const Formula &k) { return k.is_literal(); });
}

bool literal_nary(const Formula &f, Op op) {
  return f.op() == op && all_literals(f);
}

std::size_t observed_count(const Formula &f, const ObservationSet &obs,
                           Step t) {
  std::size_t n = 0;
  for (const auto &a : atoms(f))
    n += obs.knows(a, t) ? 1 : 0;
  return n;
}

// a ∨ (b ∧ c) (outer = Or) or a ∧ (b ∨ c) (outer = And), either operand
// order. Returns the literal and the inner formula.
std::optional<std::pair<Formula, Formula>> mixed_pair(const Formula &f,
                                                      Op outer) {
  if (f.op() != outer || f.children().size() != 2)
    return std::nullopt;
  Op inner = outer == Op::Or ? Op::And : Op::Or;
  for (int i = 0; i < 2; ++i) {
    const Formula &lit = f.child(i);
    const Formula &rest = f.child(1 - i);
    if (lit.is_literal() && literal_nary(rest, inner))
      return std::make_pair(lit, rest);
  }
  return std::nullopt;
}

bool mixed_obs_ok(const std::pair<Formula, Formula> &parts,
                  const ObservationSet &obs, Step t) {
  if (!obs.knows(literal_atom(parts.first), t))
    return false;
  for (const auto &k : parts.second.children())
    if (obs.knows(literal_atom(k), t))
      return true;
  return false;
}

// R9 (outer Or of literal conjunctions) / R10 (outer And of literal
// disjunctions).
bool distributed_shape(const Formula &f, Op outer, const ObservationSet &obs,
                       Step t) {
  if (f.op() != outer)
    return false;
  Op inner = outer == Op::Or ? Op::And : Op::Or;
  for (const auto &k : f.children()) {
    if (!literal_nary(k, inner))
      return false;
    if (atoms(k).size() <= 1)
      return false;
    if (observed_count(k, obs, t) != 1)
      return false;
  }
  return true;
}

using DeductionMap = std::map<Fact, bool>;

void add(DeductionMap &out, const std::string &atom, Step t, bool value) {
  out.emplace(Fact{atom, t}, value);
}

// Constraint check over the evaluator's observed atoms: an atom is deduced
// iff it takes the same value in every assignment consistent with `v`.
// Unobserved atoms read as unknown.
void enumerate(const Formula &f, TruthValue3 v, const ObservationSet &obs,
               Step t, DeductionMap &out) {
  std::vector<std::string> seen;
  for (const auto &a : atoms_ordered(f))
    if (obs.knows(a, t))
      seen.push_back(a);
  const std::size_t n = seen.size();
  if (n == 0 || n > 16)
    return;
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < n; ++i)
    slot[seen[i]] = i;

  std::uint32_t all_true = ~0u; // bits true in every consistent assignment
  std::uint32_t all_false = ~0u;
  bool any = false;
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    TruthValue3 got = eval3(f, [&](const std::string &a) {
      auto it = slot.find(a);
      if (it == slot.end())
        return TruthValue3::Unknown;
      return from_bool((bits >> it->second) & 1u);
    });
    if (got != v)
      continue;
    any = true;
    all_true &= bits;
    all_false &= ~bits;
  }
  if (!any)
    return;
  for (std::size_t i = 0; i < n; ++i) {
    if ((all_true >> i) & 1u)
      add(out, seen[i], t, true);
    else if ((all_false >> i) & 1u)
      add(out, seen[i], t, false);
  }
}

// Truth-semantic decomposition (R1/R2 chains and literals): holds whatever
// the evaluator observed. Subformulas that cannot be split further go
// through the constraint check.
void decompose(const Formula &f, TruthValue3 v, const ObservationSet &obs,
               Step t, DeductionMap &out) {
  if (f.is_atom()) {
    if (is_definite(v))
      add(out, f.name(), t, v == TruthValue3::Top);
    return;
  }
  if (f.op() == Op::Not) {
    decompose(f.child(), kleene_not(v), obs, t, out);
    return;
  }
  if ((f.op() == Op::And && v == TruthValue3::Top) ||
      (f.op() == Op::Or && v == TruthValue3::Bot)) {
    for (const auto &k : f.children())
      decompose(k, v, obs, t, out);
    return;
  }
  if (f.op() == Op::And || f.op() == Op::Or)
    enumerate(f, v, obs, t, out);
}

std::vector<Deduction> to_vector(const DeductionMap &m) {
  std::vector<Deduction> out;
  out.reserve(m.size());
  for (const auto &[fact, value] : m)
    out.push_back(Deduction{fact.atom, fact.step, from_bool(value)});
  return out;
}

void deduce_at(const Formula &f, TruthValue3 v, const ObservationSet &obs,
               Step t, DeductionMap &out) {
  decompose(f, v, obs, t, out);
}

bool temporal_scoped(const Formula &f) {
  return (f.op() == Op::Globally || f.op() == Op::Finally) &&
         f.child().is_temporal_free();
}

} // namespace

std::optional<RuleId> match_rule(const Formula &f, TruthValue3 v,
                                 const ObservationSet &obs, Step t) {
  using TV = TruthValue3;
  auto any_observed = [&](const Formula &g) {
    return observed_count(g, obs, t) > 0;
  };
  if (literal_nary(f, Op::And) && v == TV::Top)
    return RuleId::R1;
  if (literal_nary(f, Op::Or) && v == TV::Bot)
    return RuleId::R2;
  if (literal_nary(f, Op::And) && v == TV::Unknown && any_observed(f))
    return RuleId::R3;
  if (literal_nary(f, Op::Or) && v == TV::Unknown && any_observed(f))
    return RuleId::R4;
  if (auto p = mixed_pair(f, Op::Or); p && mixed_obs_ok(*p, obs, t)) {
    if (v == TV::Bot)
      return RuleId::R5;
    if (v == TV::Unknown)
      return RuleId::R6;
  }
  if (auto p = mixed_pair(f, Op::And); p && mixed_obs_ok(*p, obs, t)) {
    if (v == TV::Unknown)
      return RuleId::R7;
    if (v == TV::Top)
      return RuleId::R8;
  }
  if (v == TV::Bot && distributed_shape(f, Op::Or, obs, t))
    return RuleId::R9;
  if (v == TV::Top && distributed_shape(f, Op::And, obs, t))
    return RuleId::R10;
  if (temporal_scoped(f) && f.op() == Op::Globally && v == TV::Top)
    return RuleId::R11;
  if (temporal_scoped(f) && f.op() == Op::Finally && v == TV::Bot)
    return RuleId::R12;
  return std::nullopt;
}

bool matches_rule_shape(const Formula &f) {
  if ((f.op() == Op::And || f.op() == Op::Or) && f.is_temporal_free())
    return true;
  return temporal_scoped(f);
}

std::vector<Deduction> deduce(const EvaluatedFormula &ev,
                              const ObservationSet &sender_obs) {
  if (temporal_scoped(ev.formula))
    return deduce_temporal(ev, sender_obs, ev.time);
  if (!ev.formula.is_temporal_free())
    return {};
  DeductionMap out;
  deduce_at(ev.formula, ev.value, sender_obs, ev.time, out);
  return to_vector(out);
}

std::vector<Deduction> deduce_temporal(const EvaluatedFormula &ev,
                                       const ObservationSet &sender_obs,
                                       Step n) {
  if (!temporal_scoped(ev.formula))
    throw Error("temporal deduction needs G or F over a temporal-free body: " +
                ev.formula.to_string());
  const Formula &body = ev.formula.child();
  TruthValue3 unfolded;
  if (ev.formula.op() == Op::Globally && ev.value == TruthValue3::Top)
    unfolded = TruthValue3::Top;
  else if (ev.formula.op() == Op::Finally && ev.value == TruthValue3::Bot)
    unfolded = TruthValue3::Bot;
  else
    return {};
  DeductionMap out;
  for (Step t = 0; t <= n; ++t)
    deduce_at(body, unfolded, sender_obs, t, out);
  return to_vector(out);
}

FactSet deduction_set(const Formula &f, TruthValue3 v,
                      const ObservationSet &sender_obs, Step time) {
  FactSet out;
  for (const auto &d : deduce(EvaluatedFormula{f, v, sender_obs.owner(), time},
                              sender_obs))
    out.insert(d.fact());
  return out;
}

} // namespace declmon
