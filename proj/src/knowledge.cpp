#include "declmon/knowledge.hpp"

#include <algorithm>
#include <bit>

namespace declmon {

CommScheme::CommScheme(std::vector<ProcessId> ring) : ring_(std::move(ring)) {
  std::vector<ProcessId> sorted = ring_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error("ring lists a process twice");
}

std::size_t CommScheme::position(const ProcessId &p) const {
  auto it = std::find(ring_.begin(), ring_.end(), p);
  if (it == ring_.end())
    throw Error("process '" + p + "' is not on the ring");
  return static_cast<std::size_t>(it - ring_.begin());
}

const ProcessId &CommScheme::successor(const ProcessId &p) const {
  return ring_[(position(p) + 1) % ring_.size()];
}

const ProcessId &CommScheme::predecessor(const ProcessId &p) const {
  return ring_[(position(p) + ring_.size() - 1) % ring_.size()];
}

std::size_t CommScheme::distance(const ProcessId &from,
                                 const ProcessId &to) const {
  std::size_t n = ring_.size();
  return (position(to) + n - position(from)) % n;
}

std::string CommScheme::to_string() const {
  std::string out;
  for (const auto &p : ring_)
    out += p + " -> ";
  if (!ring_.empty())
    out += ring_.front();
  return out;
}

// ---------------------------------------------------------------------------

ObsPowerModel::ObsPowerModel(CommScheme scheme, SystemAlphabet alpha)
    : scheme_(std::move(scheme)), alpha_(std::move(alpha)) {
  if (scheme_.size() != alpha_.process_count())
    throw Error("ring and alphabet disagree on the process set");
  for (const auto &p : alpha_.processes())
    (void)scheme_.distance(p, p);
}

bool ObsPowerModel::knows(const ProcessId &p, const Fact &fact, Step t) const {
  if (fact.step < 0 || fact.step > t)
    return false;
  const ProcessId *owner = alpha_.owner(fact.atom);
  if (!owner)
    return false;
  if (*owner == p)
    return true;
  return static_cast<std::size_t>(t - fact.step) >=
         scheme_.distance(*owner, p);
}

ObservationSet ObsPowerModel::observation(const ProcessId &p, Step t) const {
  return ObservationSet(
      p, [this, p, t](const Fact &f) { return knows(p, f, t); });
}

FactSet obs_power(const ObsPowerModel &m, const ProcessId &p, Step t) {
  FactSet out;
  for (const auto &q : m.alphabet().processes())
    for (const auto &a : m.alphabet().atoms_of(q))
      for (Step s = 0; s <= t; ++s)
        if (m.knows(p, Fact{a, s}, t))
          out.insert(Fact{a, s});
  return out;
}

FactSet obs_diff(const ObsPowerModel &m, const ProcessId &sender,
                 const ProcessId &receiver, Step t) {
  FactSet out;
  // Everything older than the ring diameter is known to both.
  Step from = std::max<Step>(0, t - static_cast<Step>(m.scheme().diameter()));
  for (const auto &q : m.alphabet().processes())
    for (const auto &a : m.alphabet().atoms_of(q))
      for (Step s = from; s <= t; ++s) {
        Fact f{a, s};
        if (m.knows(sender, f, t) && !m.knows(receiver, f, t))
          out.insert(std::move(f));
      }
  return out;
}

std::optional<Step> earliest_new_step(const ObsPowerModel &m,
                                      const ProcessId &sender,
                                      const ProcessId &receiver, Step t) {
  std::optional<Step> best;
  for (const auto &f : obs_diff(m, sender, receiver, t))
    if (!best || f.step < *best)
      best = f.step;
  return best;
}

// ---------------------------------------------------------------------------

FormulaIndex FormulaIndex::build(const Formula &phi, const Tableau &refined) {
  FormulaIndex idx;
  auto add = [&](const Formula &f) {
    if (idx.lookup_.emplace(f, idx.formulas_.size()).second)
      idx.formulas_.push_back(f);
  };
  if (!refined.empty()) {
    auto walk = [&](auto &&self, std::size_t i) -> void {
      for (const auto &f : refined.node(i).label)
        if (matches_rule_shape(f))
          add(f);
      for (auto c : refined.node(i).children)
        self(self, c);
    };
    walk(walk, 0);
  }
  for (const auto &a : atoms_ordered(phi))
    add(Formula::atom(a));
  return idx;
}

std::optional<std::size_t> FormulaIndex::find(const Formula &f) const {
  auto it = lookup_.find(f);
  if (it == lookup_.end())
    return std::nullopt;
  return it->second;
}

unsigned FormulaIndex::index_bits() const noexcept {
  std::size_t k = formulas_.size();
  if (k <= 1)
    return 0;
  return static_cast<unsigned>(std::bit_width(k - 1));
}

TruthValue3 evaluate_entry(const Formula &f, Step state,
                           const FactView &view) {
  auto at = [&](const Formula &g, Step s) {
    return eval3(g, [&](const std::string &a) { return view(Fact{a, s}); });
  };
  if (f.is_temporal_free())
    return at(f, state);
  if (f.op() == Op::Globally || f.op() == Op::Finally) {
    const bool g = f.op() == Op::Globally;
    TruthValue3 acc = g ? TruthValue3::Top : TruthValue3::Bot;
    for (Step s = 0; s <= state; ++s) {
      TruthValue3 v = at(f.child(), s);
      acc = g ? kleene_and(acc, v) : kleene_or(acc, v);
      if (acc == (g ? TruthValue3::Bot : TruthValue3::Top))
        break;
    }
    return acc;
  }
  return TruthValue3::Unknown;
}

TruthTable make_truth_table(const FormulaIndex &index, Step state) {
  TruthTable t;
  t.state = state;
  t.entries.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i)
    t.entries.push_back(TruthTableEntry{index.at(i), TruthValue3::Unknown, i});
  return t;
}

TruthTable build_truth_table(const Formula &phi, const Tableau &refined,
                             Step state) {
  return make_truth_table(FormulaIndex::build(phi, refined), state);
}

// ---------------------------------------------------------------------------

KnowledgeStore::KnowledgeStore(ProcessId owner, FormulaIndex index)
    : owner_(std::move(owner)), index_(std::move(index)) {}

void KnowledgeStore::observe(const Event &local,
                             const std::set<std::string> &own, Step t) {
  for (const auto &a : own)
    valuation_.set(a, t, local.holds(a));
}

FactSet KnowledgeStore::update(const std::vector<Deduction> &ds) {
  FactSet fresh;
  for (const auto &d : ds) {
    if (!is_definite(d.value))
      throw Error("deduction without a definite value: " + d.to_string());
    if (valuation_.set(d.atom, d.time, d.value == TruthValue3::Top))
      fresh.insert(d.fact());
  }
  if (!fresh.empty())
    refresh();
  return fresh;
}

TruthValue3 KnowledgeStore::visible_value(const Fact &f) const {
  if (visible_ && !visible_(f))
    return TruthValue3::Unknown;
  return valuation_.get(f);
}

void KnowledgeStore::evaluate(TruthTable &t) const {
  FactView view = [this](const Fact &f) { return visible_value(f); };
  for (auto &e : t.entries)
    e.value = evaluate_entry(e.formula, t.state, view);
}

const TruthTable &KnowledgeStore::table(Step state) {
  auto it = tables_.find(state);
  if (it == tables_.end())
    it = tables_.emplace(state, make_truth_table(index_, state)).first;
  evaluate(it->second);
  return it->second;
}

void KnowledgeStore::refresh() {
  for (auto &[s, t] : tables_)
    evaluate(t);
}

void KnowledgeStore::collect_before(Step state) {
  tables_.erase(tables_.begin(), tables_.lower_bound(state));
}

std::size_t KnowledgeStore::table_bits() const noexcept {
  return tables_.size() * index_.size() * 2;
}

KnowledgeStore update(KnowledgeStore store, const std::vector<Deduction> &ds) {
  store.update(ds);
  return store;
}

} // namespace declmon
