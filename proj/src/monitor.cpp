#include "declmon/monitor.hpp"

#include <algorithm>
#include <bit>

namespace declmon {

const char *to_string(Strategy s) noexcept {
  return s == Strategy::DM1 ? "dm1" : "dm2";
}

std::size_t message_bits(const Message &m, std::size_t table_size) {
  std::size_t idx = 0;
  if (table_size > 1)
    idx = static_cast<std::size_t>(std::bit_width(table_size - 1));
  return kHeaderBits + m.payload.size() * (idx + 8 + 2);
}

namespace {

CommScheme ranked(const SystemAlphabet &alpha,
                  const std::map<ProcessId, std::size_t> &score) {
  std::vector<ProcessId> order = alpha.processes();
  std::stable_sort(order.begin(), order.end(),
                   [&](const ProcessId &x, const ProcessId &y) {
                     return score.at(x) > score.at(y);
                   });
  return CommScheme(std::move(order));
}

} // namespace

CommScheme rank_dm1(const SystemAlphabet &alpha, const Formula &phi) {
  std::map<ProcessId, std::size_t> score;
  for (const auto &p : alpha.processes())
    score[p] = 0;
  for (const auto &a : atoms(phi))
    if (const ProcessId *o = alpha.owner(a))
      ++score[*o];
  return ranked(alpha, score);
}

CommScheme rank_dm2(const Tableau &refined, const SystemAlphabet &alpha) {
  std::map<ProcessId, std::size_t> score;
  for (const auto &p : alpha.processes())
    score[p] = 0;
  for (const auto &b : branch_profiles(refined, alpha))
    for (const auto &[p, n] : b.per_process_count)
      if (n > 0)
        ++score[p];
  return ranked(alpha, score);
}

FactSet pair_deductions(const Formula &f, const PayloadPair &p,
                        const ObservationSet &sender_obs) {
  return deduction_set(f, p.value, sender_obs, p.state);
}

std::vector<PayloadPair> min_list(const FactSet &M,
                                  const std::map<Step, TruthTable> &tables,
                                  const FormulaIndex &index,
                                  const ObservationSet &sender_obs) {
  struct Candidate {
    PayloadPair pair;
    FactSet useful;
  };
  std::set<Step> states;
  for (const auto &f : M)
    states.insert(f.step);

  // Exploration: compound entries whose deductions reach into M.
  std::vector<Candidate> cands;
  for (Step s : states) {
    auto it = tables.find(s);
    if (it == tables.end())
      continue;
    for (const auto &e : it->second.entries) {
      if (e.formula.is_atom() || !matches_rule_shape(e.formula))
        continue;
      PayloadPair p{e.index, s, e.value};
      FactSet useful;
      for (const auto &f : pair_deductions(e.formula, p, sender_obs))
        if (M.count(f))
          useful.insert(f);
      if (!useful.empty())
        cands.push_back(Candidate{p, std::move(useful)});
    }
  }

  FactSet uncovered = M;
  std::vector<const Candidate *> chosen;
  std::vector<bool> used(cands.size(), false);
  for (;;) {
    std::size_t best = cands.size(), best_gain = 0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (used[i])
        continue;
      std::size_t gain = 0;
      for (const auto &f : cands[i].useful)
        gain += uncovered.count(f);
      if (gain > best_gain) {
        best = i;
        best_gain = gain;
      }
    }
    // A compound pair only pays off over atoms when it covers two facts.
    if (best == cands.size() || best_gain < 2)
      break;
    used[best] = true;
    chosen.push_back(&cands[best]);
    for (const auto &f : cands[best].useful)
      uncovered.erase(f);
  }

  // Refinement: drop pairs whose facts the others already cover.
  for (std::size_t i = chosen.size(); i-- > 0;) {
    FactSet rest;
    for (std::size_t j = 0; j < chosen.size(); ++j)
      if (j != i)
        rest.insert(chosen[j]->useful.begin(), chosen[j]->useful.end());
    bool redundant = std::all_of(
        chosen[i]->useful.begin(), chosen[i]->useful.end(),
        [&](const Fact &f) { return rest.count(f) != 0; });
    if (redundant)
      chosen.erase(chosen.begin() + static_cast<std::ptrdiff_t>(i));
  }

  std::vector<PayloadPair> out;
  for (const auto *c : chosen)
    out.push_back(c->pair);

  // Atomic fallback.
  FactSet covered;
  for (const auto *c : chosen)
    covered.insert(c->useful.begin(), c->useful.end());
  for (const auto &f : M) {
    if (covered.count(f))
      continue;
    auto idx = index.find(Formula::atom(f.atom));
    auto t = tables.find(f.step);
    if (!idx || t == tables.end())
      throw Error("no table entry for fact " + f.to_string());
    TruthValue3 v = t->second.entries.at(*idx).value;
    if (!is_definite(v))
      throw Error("sender does not know " + f.to_string());
    out.push_back(PayloadPair{*idx, f.step, v});
  }
  return out;
}

// ---------------------------------------------------------------------------

MonitorSetup MonitorSetup::make(const SystemAlphabet &alpha,
                                const Formula &phi, Strategy strategy) {
  Formula n = nnf(phi);
  Satisfiability sat = classify(n);
  Tableau refined;
  FormulaIndex index;
  CommScheme ring;
  if (sat == Satisfiability::Satisfiable) {
    refined = refine(build(n));
    index = FormulaIndex::build(n, refined);
    ring = strategy == Strategy::DM1 ? rank_dm1(alpha, n)
                                     : rank_dm2(refined, alpha);
  } else {
    ring = rank_dm1(alpha, n);
  }
  return MonitorSetup{alpha,
                      n,
                      sat,
                      std::move(refined),
                      std::move(index),
                      strategy,
                      ObsPowerModel(std::move(ring), alpha),
                      atoms(n)};
}

MonitorState initial_state(const MonitorSetup &setup, const ProcessId &pid) {
  MonitorState ms;
  ms.pid = pid;
  ms.store = KnowledgeStore(pid, setup.index);
  ms.residual = setup.phi;
  return ms;
}

Message monitor_step(const MonitorSetup &setup, MonitorState &ms,
                     const Event &local_event,
                     const std::vector<Message> &inbox, Step t) {
  const auto &model = setup.model;
  ms.store.observe(local_event, setup.alpha.atoms_of(ms.pid), t);

  for (const auto &msg : inbox) {
    ObservationSet sender_obs = model.observation(msg.sender, msg.round);
    for (const auto &p : msg.payload) {
      EvaluatedFormula ev{setup.index.at(p.index), p.value, msg.sender,
                          p.state};
      ms.store.update(deduce(ev, sender_obs));
    }
  }

  // What the successor is missing from our modelled view.
  const ProcessId &succ = model.scheme().successor(ms.pid);
  FactSet M;
  if (succ != ms.pid)
    for (const auto &f : obs_diff(model, ms.pid, succ, t))
      if (setup.phi_atoms.count(f.atom))
        M.insert(f);

  const ProcessId pid = ms.pid;
  ms.store.set_visibility(
      [&model, pid, t](const Fact &f) { return model.knows(pid, f, t); });
  std::map<Step, TruthTable> tables;
  for (const auto &f : M)
    if (!tables.count(f.step))
      tables.emplace(f.step, ms.store.table(f.step));
  ms.peak_table_bits = std::max(ms.peak_table_bits, ms.store.table_bits());

  Message out{ms.pid, t, {}};
  if (!M.empty())
    out.payload = min_list(M, tables, setup.index, model.observation(pid, t));
  ms.store.collect_before(t + 1 -
                          static_cast<Step>(model.scheme().diameter()));

  if (ms.verdict == TruthValue3::Unknown) {
    const auto &val = ms.store.valuation();
    ms.residual = resolve_refs(
        ms.residual, [&val](const Fact &f) { return val.get(f); });
    ms.residual = progress_partial(
        ms.residual, t,
        [&val, t](const std::string &a) { return val.get(a, t); });
    ms.verdict = residual_verdict(ms.residual);
  }
  return out;
}

void check_alphabet(const SystemAlphabet &alpha, const Formula &phi,
                    const Trace &trace) {
  for (const auto &a : atoms(phi))
    if (!alpha.owner(a))
      throw Error("formula atom '" + a + "' is not owned by any process");
  for (std::size_t i = 0; i < trace.size(); ++i)
    for (const auto &a : trace[i].true_atoms)
      if (!alpha.owner(a))
        throw Error("trace step " + std::to_string(i) + " mentions atom '" +
                    a + "' outside the alphabet");
}

RunResult run(const SystemAlphabet &alpha, const Formula &phi,
              const Trace &trace, Strategy strategy,
              const RunObserver &observer) {
  check_alphabet(alpha, phi, trace);
  MonitorSetup setup = MonitorSetup::make(alpha, phi, strategy);
  RunResult r;
  r.ring = setup.model.scheme();
  if (setup.sat != Satisfiability::Satisfiable) {
    r.verdict = setup.sat == Satisfiability::Valid ? TruthValue3::Top
                                                   : TruthValue3::Bot;
    return r;
  }

  const auto &ring = setup.model.scheme().ring();
  std::vector<MonitorState> states;
  for (const auto &p : ring)
    states.push_back(initial_state(setup, p));
  std::vector<Message> last(ring.size());
  bool have_last = false;

  for (std::size_t ti = 0; ti < trace.size(); ++ti) {
    Step t = static_cast<Step>(ti);
    std::vector<Message> sent(ring.size());
    for (std::size_t i = 0; i < ring.size(); ++i) {
      std::vector<Message> inbox;
      std::size_t pred = (i + ring.size() - 1) % ring.size();
      if (have_last && pred != i)
        inbox.push_back(last[pred]);
      sent[i] = monitor_step(setup, states[i],
                             alpha.project(trace[ti], ring[i]), inbox, t);
    }
    for (std::size_t i = 0; i < ring.size(); ++i) {
      if (ring.size() < 2)
        break;
      ++r.metrics.num_msgs;
      r.metrics.msg_bits += message_bits(sent[i], setup.index.size());
      if (observer.on_message) {
        const ProcessId &succ = ring[(i + 1) % ring.size()];
        FactSet M;
        for (const auto &f : obs_diff(setup.model, ring[i], succ, t))
          if (setup.phi_atoms.count(f.atom))
            M.insert(f);
        observer.on_message(sent[i], succ, M);
      }
    }
    for (const auto &s : states)
      r.metrics.mem_bits = std::max(r.metrics.mem_bits, s.peak_table_bits);
    if (observer.on_round)
      observer.on_round(t, states);
    last = std::move(sent);
    have_last = true;

    for (const auto &s : states)
      if (is_definite(s.verdict))
        r.verdicts.emplace_back(s.pid, s.verdict);
    if (!r.verdicts.empty()) {
      r.verdict = r.verdicts.front().second;
      r.decider = r.verdicts.front().first;
      r.round = t;
      r.metrics.trace_len = ti + 1;
      return r;
    }
  }
  r.metrics.trace_len = trace.size();
  return r;
}

} // namespace declmon
