#include "declmon/tableau.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace declmon {

namespace {

bool elementary(const Formula &f) {
  return f.is_literal() || f.is_false() || f.op() == Op::Next;
}

bool contradictory(const std::vector<Formula> &label) {
  std::unordered_set<Formula, FormulaHash> pos;
  std::unordered_set<Formula, FormulaHash> neg;
  for (const auto &f : label) {
    if (f.is_false())
      return true;
    if (f.is_atom())
      pos.insert(f);
    else if (f.is_literal())
      neg.insert(f.child());
  }
  for (const auto &a : pos)
    if (neg.count(a))
      return true;
  return false;
}

// The formula whose appearance fulfils an eventuality, or nullptr.
const Formula *eventuality_goal(const Formula &f) {
  if (f.op() == Op::Finally)
    return &f.child();
  if (f.op() == Op::Until)
    return &f.child(1);
  return nullptr;
}

std::vector<Formula> sorted_set(std::vector<Formula> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Depth-first expansion shared by build() and satisfiable().
class Expander {
public:
  Expander(bool record, bool stop_on_tick, std::size_t limit)
      : record_(record), stop_on_tick_(stop_on_tick), limit_(limit) {}

  bool run(const Formula &root) {
    std::vector<Formula> label;
    append(label, root);
    std::size_t id = new_node(label, TableauNode::npos, true);
    push_state(label);
    bool ok = expand(std::move(label), id);
    pop_state();
    return ok;
  }

  std::vector<TableauNode> take_nodes() { return std::move(nodes_); }

private:
  struct State {
    std::vector<Formula> start; // sorted
    std::size_t path_begin;
  };

  bool record_;
  bool stop_on_tick_;
  std::size_t limit_;
  std::size_t visited_ = 0;
  bool found_ = false;
  std::vector<TableauNode> nodes_;
  std::vector<State> states_;
  std::vector<Formula> path_; // every formula introduced on the current path
  std::map<std::vector<Formula>, bool> expanded_;

  static void append(std::vector<Formula> &label, const Formula &f) {
    if (f.is_true())
      return;
    if (std::find(label.begin(), label.end(), f) == label.end())
      label.push_back(f);
  }

  std::size_t new_node(const std::vector<Formula> &label, std::size_t parent,
                       bool step) {
    if (++visited_ > limit_)
      throw TableauLimitError("tableau exceeds " + std::to_string(limit_) +
                              " nodes");
    if (!record_)
      return TableauNode::npos;
    TableauNode n;
    n.label = label;
    n.parent = parent;
    n.step = step;
    nodes_.push_back(std::move(n));
    std::size_t id = nodes_.size() - 1;
    if (parent != TableauNode::npos)
      nodes_[parent].children.push_back(id);
    return id;
  }

  void set_status(std::size_t id, NodeStatus s) {
    if (record_)
      nodes_[id].status = s;
  }

  void push_state(const std::vector<Formula> &label) {
    states_.push_back(State{sorted_set(label), path_.size()});
    path_.insert(path_.end(), label.begin(), label.end());
  }

  void pop_state() {
    path_.resize(states_.back().path_begin);
    states_.pop_back();
  }

  bool fulfilled_since(std::size_t state_index,
                       const std::vector<Formula> &label) const {
    std::size_t from = states_[state_index].path_begin;
    for (const auto &f : label) {
      const Formula *goal = eventuality_goal(f);
      if (!goal || goal->is_true())
        continue;
      bool seen = false;
      for (std::size_t i = from; i < path_.size() && !seen; ++i)
        seen = path_[i] == *goal;
      if (!seen)
        return false;
    }
    return true;
  }

  std::vector<std::vector<Formula>> alternatives(const Formula &f) const {
    switch (f.op()) {
    case Op::And:
      return {f.children()};
    case Op::Or: {
      std::vector<std::vector<Formula>> out;
      for (const auto &k : f.children())
        out.push_back({k});
      return out;
    }
    case Op::Globally:
      return {{f.child(), Formula::next(f)}};
    case Op::Finally:
      return {{f.child()}, {Formula::next(f)}};
    case Op::Until:
      return {{f.child(1)}, {f.child(0), Formula::next(f)}};
    default:
      throw Error("tableau expects negation normal form, got " +
                  f.to_string());
    }
  }

  bool expand(std::vector<Formula> label, std::size_t id) {
    if (contradictory(label)) {
      set_status(id, NodeStatus::Crossed);
      return false;
    }
    auto it = std::find_if(label.begin(), label.end(),
                           [](const Formula &f) { return !elementary(f); });
    if (it != label.end()) {
      Formula target = *it;
      std::vector<Formula> rest;
      rest.reserve(label.size());
      for (const auto &f : label)
        if (!(f == target))
          rest.push_back(f);
      bool any = false;
      for (auto &alt : alternatives(target)) {
        std::vector<Formula> child = rest;
        std::size_t mark = path_.size();
        for (const auto &f : alt) {
          append(child, f);
          path_.push_back(f);
        }
        std::size_t cid = new_node(child, id, false);
        any = expand(std::move(child), cid) || any;
        path_.resize(mark);
        if (found_ && stop_on_tick_)
          break;
      }
      return any;
    }

    // Fully decomposed: take a synchronous step.
    std::vector<Formula> next;
    for (const auto &f : label)
      if (f.op() == Op::Next)
        append(next, f.child());
    if (next.empty()) {
      set_status(id, NodeStatus::Ticked);
      found_ = true;
      return true;
    }
    std::vector<Formula> key = sorted_set(next);
    for (std::size_t s = 0; s < states_.size(); ++s) {
      if (states_[s].start != key)
        continue;
      std::size_t cid = new_node(next, id, true);
      bool ok = fulfilled_since(s, next);
      if (record_)
        nodes_[cid].loop_closure = true;
      set_status(cid, ok ? NodeStatus::Ticked : NodeStatus::Crossed);
      found_ = found_ || ok;
      return ok;
    }
    if (record_) {
      // A step label expanded elsewhere is not unfolded again; its status
      // is decided on its own.
      if (auto it = expanded_.find(key); it != expanded_.end()) {
        std::size_t cid = new_node(next, id, true);
        nodes_[cid].loop_closure = true;
        set_status(cid, it->second ? NodeStatus::Ticked : NodeStatus::Crossed);
        found_ = found_ || it->second;
        return it->second;
      }
    }
    std::size_t cid = new_node(next, id, true);
    push_state(next);
    bool ok = expand(std::move(next), cid);
    pop_state();
    if (record_)
      expanded_.emplace(key, satisfiable(Formula::conj(key)));
    return ok;
  }
};

// Step labels as states, local expansions as edges tagged with the
// eventuality goals they make true. A formula is satisfiable when some
// reachable expansion has no next-obligations, or some reachable strongly
// connected component fulfils every eventuality pending in its states.
class StateGraph {
public:
  explicit StateGraph(std::size_t limit) : limit_(limit) {}

  bool satisfiable(const Formula &root) {
    collect_goals(root);
    state_of({root});
    for (std::size_t s = 0; s < states_.size(); ++s) {
      if (expand_state(s))
        return true;
    }
    return fair_cycle();
  }

private:
  struct Edge {
    std::size_t to;
    std::vector<std::size_t> goals; // sorted goal ids
  };
  struct State {
    std::vector<Formula> label; // sorted
    std::vector<std::size_t> pending;
    std::vector<Edge> edges;
  };

  std::size_t limit_;
  std::size_t work_ = 0;
  std::vector<State> states_;
  std::map<std::vector<Formula>, std::size_t> index_;
  std::unordered_map<Formula, std::size_t, FormulaHash> goal_id_;

  void collect_goals(const Formula &f) {
    if (const Formula *g = eventuality_goal(f); g && !g->is_true())
      goal_id_.emplace(*g, goal_id_.size());
    for (const auto &k : f.children())
      collect_goals(k);
  }

  std::size_t state_of(std::vector<Formula> label) {
    label = sorted_set(std::move(label));
    if (auto it = index_.find(label); it != index_.end())
      return it->second;
    State st;
    for (const auto &f : label)
      if (const Formula *g = eventuality_goal(f); g && !g->is_true())
        st.pending.push_back(goal_id_.at(*g));
    st.label = label;
    states_.push_back(std::move(st));
    index_.emplace(std::move(label), states_.size() - 1);
    return states_.size() - 1;
  }

  using Goals = std::vector<std::size_t>; // sorted goal ids
  using Exits = std::set<std::pair<std::vector<Formula>, Goals>>;

  // Adds the edges of state s. True when an expansion needs no next step.
  bool expand_state(std::size_t s) {
    Exits out;
    std::set<std::pair<std::vector<Formula>, Goals>> seen;
    Goals goals;
    for (const auto &f : states_[s].label)
      add_goal(goals, f);
    if (local(states_[s].label, std::move(goals), out, seen))
      return true;
    for (const auto &[next, g] : out) {
      std::size_t to = state_of(next);
      states_[s].edges.push_back(Edge{to, g});
    }
    return false;
  }

  void add_goal(Goals &goals, const Formula &f) const {
    auto g = goal_id_.find(f);
    if (g == goal_id_.end())
      return;
    auto at = std::lower_bound(goals.begin(), goals.end(), g->second);
    if (at == goals.end() || *at != g->second)
      goals.insert(at, g->second);
  }

  bool local(std::vector<Formula> label, Goals goals, Exits &out,
             std::set<std::pair<std::vector<Formula>, Goals>> &seen) {
    if (++work_ > limit_)
      throw TableauLimitError("tableau exceeds " + std::to_string(limit_) +
                              " nodes");
    label = sorted_set(std::move(label));
    if (contradictory(label) || !seen.emplace(label, goals).second)
      return false;
    auto it = std::find_if(label.begin(), label.end(),
                           [](const Formula &f) { return !elementary(f); });
    if (it == label.end()) {
      std::vector<Formula> next;
      for (const auto &f : label)
        if (f.op() == Op::Next && !f.child().is_true())
          next.push_back(f.child());
      if (next.empty())
        return true;
      out.emplace(sorted_set(std::move(next)), std::move(goals));
      return false;
    }
    Formula target = *it;
    std::vector<Formula> rest;
    for (const auto &f : label)
      if (!(f == target))
        rest.push_back(f);
    for (const auto &alt : alternatives(target)) {
      std::vector<Formula> child = rest;
      Goals g = goals;
      for (const auto &f : alt) {
        if (f.is_true())
          continue;
        child.push_back(f);
        add_goal(g, f);
      }
      if (local(std::move(child), std::move(g), out, seen))
        return true;
    }
    return false;
  }

  static std::vector<std::vector<Formula>> alternatives(const Formula &f) {
    switch (f.op()) {
    case Op::And:
      return {f.children()};
    case Op::Or: {
      std::vector<std::vector<Formula>> out;
      for (const auto &k : f.children())
        out.push_back({k});
      return out;
    }
    case Op::Globally:
      return {{f.child(), Formula::next(f)}};
    case Op::Finally:
      return {{f.child()}, {Formula::next(f)}};
    case Op::Until:
      return {{f.child(1)}, {f.child(0), Formula::next(f)}};
    default:
      throw Error("tableau expects negation normal form, got " +
                  f.to_string());
    }
  }

  // Strongly connected components over live states (iterative Tarjan).
  std::vector<std::size_t> components(const std::vector<char> &alive,
                                      std::size_t &count) const {
    const std::size_t n = states_.size();
    const std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> comp(n, none), low(n), num(n, none), stack;
    std::vector<char> on(n, 0);
    std::vector<std::pair<std::size_t, std::size_t>> frames;
    std::size_t counter = 0;
    count = 0;
    for (std::size_t root = 0; root < n; ++root) {
      if (!alive[root] || num[root] != none)
        continue;
      frames.push_back({root, 0});
      num[root] = low[root] = counter++;
      stack.push_back(root);
      on[root] = 1;
      while (!frames.empty()) {
        auto &[v, i] = frames.back();
        const auto &edges = states_[v].edges;
        if (i < edges.size()) {
          std::size_t w = edges[i++].to;
          if (!alive[w])
            continue;
          if (num[w] == none) {
            num[w] = low[w] = counter++;
            stack.push_back(w);
            on[w] = 1;
            frames.push_back({w, 0});
          } else if (on[w]) {
            low[v] = std::min(low[v], num[w]);
          }
          continue;
        }
        if (low[v] == num[v]) {
          std::size_t w;
          do {
            w = stack.back();
            stack.pop_back();
            on[w] = 0;
            comp[w] = count;
          } while (w != v);
          ++count;
        }
        std::size_t done = v;
        frames.pop_back();
        if (!frames.empty()) {
          std::size_t parent = frames.back().first;
          low[parent] = std::min(low[parent], low[done]);
        }
      }
    }
    return comp;
  }

  bool fair_cycle() {
    const std::size_t n = states_.size();
    std::vector<char> alive(n, 1);
    for (bool changed = true; changed;) {
      changed = false;
      std::size_t count = 0;
      auto comp = components(alive, count);
      std::vector<std::vector<char>> fulfilled(
          count, std::vector<char>(goal_id_.size(), 0));
      std::vector<char> cyclic(count, 0);
      for (std::size_t s = 0; s < n; ++s) {
        if (!alive[s])
          continue;
        for (const auto &e : states_[s].edges) {
          if (!alive[e.to] || comp[e.to] != comp[s])
            continue;
          cyclic[comp[s]] = 1;
          for (std::size_t g : e.goals)
            fulfilled[comp[s]][g] = 1;
        }
      }
      for (std::size_t s = 0; s < n; ++s) {
        if (!alive[s])
          continue;
        if (!cyclic[comp[s]]) {
          alive[s] = 0;
          continue;
        }
        for (std::size_t g : states_[s].pending) {
          if (!fulfilled[comp[s]][g]) {
            alive[s] = 0;
            changed = true;
            break;
          }
        }
      }
    }
    return std::find(alive.begin(), alive.end(), 1) != alive.end();
  }
};

} // namespace

// ---------------------------------------------------------------------------

std::vector<std::vector<std::size_t>> Tableau::ticked_branches() const {
  std::vector<std::vector<std::size_t>> out;
  if (nodes_.empty())
    return out;
  std::vector<std::size_t> path;
  auto walk = [&](auto &&self, std::size_t i) -> void {
    path.push_back(i);
    const auto &n = nodes_[i];
    if (n.children.empty()) {
      if (n.status == NodeStatus::Ticked)
        out.push_back(path);
    } else {
      for (auto c : n.children)
        self(self, c);
    }
    path.pop_back();
  };
  walk(walk, 0);
  return out;
}

std::vector<Formula>
Tableau::branch_formulas(const std::vector<std::size_t> &branch) const {
  std::vector<Formula> out;
  std::unordered_set<Formula, FormulaHash> seen;
  for (auto i : branch)
    for (const auto &f : nodes_.at(i).label)
      if (seen.insert(f).second)
        out.push_back(f);
  return out;
}

Tableau build(const Formula &f, std::size_t node_limit) {
  Expander ex(true, false, node_limit);
  ex.run(f);
  return Tableau(f, ex.take_nodes());
}

bool is_satisfiable(const Tableau &t) {
  for (const auto &n : t.nodes())
    if (n.children.empty() && n.status == NodeStatus::Ticked)
      return true;
  return false;
}

bool satisfiable(const Formula &f) {
  static std::mutex mu;
  static std::unordered_map<Formula, bool, FormulaHash> cache;
  Formula key = simplify(nnf(f));
  if (key.is_true())
    return true;
  if (key.is_false())
    return false;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end())
      return it->second;
  }
  bool result = StateGraph(kDefaultNodeLimit * 10).satisfiable(key);
  std::lock_guard<std::mutex> lock(mu);
  if (cache.size() > 200'000)
    cache.clear();
  cache.emplace(key, result);
  return result;
}

Tableau refine(const Tableau &t) {
  if (t.empty())
    return t;
  const auto &src = t.nodes();
  std::vector<char> keep(src.size(), 0);
  // Children always have larger indices than their parents.
  for (std::size_t i = src.size(); i-- > 0;) {
    const auto &n = src[i];
    if (n.children.empty()) {
      keep[i] = n.status == NodeStatus::Ticked;
    } else {
      for (auto c : n.children)
        keep[i] = keep[i] || keep[c];
    }
  }
  if (!keep[0])
    return Tableau(t.formula(), {});

  std::vector<TableauNode> out;
  auto copy = [&](auto &&self, std::size_t i, std::size_t parent) -> void {
    const auto &n = src[i];
    TableauNode m;
    m.label = n.label;
    m.parent = parent;
    m.step = n.step;
    m.status = n.status;
    out.push_back(std::move(m));
    std::size_t id = out.size() - 1;
    if (parent != TableauNode::npos)
      out[parent].children.push_back(id);
    for (auto c : n.children) {
      if (!keep[c])
        continue;
      if (src[c].loop_closure) {
        // The repeated label adds nothing; the parent closes the branch.
        out[id].status = NodeStatus::Ticked;
        continue;
      }
      self(self, c, id);
    }
  };
  copy(copy, 0, TableauNode::npos);
  return Tableau(t.formula(), std::move(out));
}

std::vector<BranchProfile> branch_profiles(const Tableau &t,
                                           const SystemAlphabet &alpha) {
  std::vector<BranchProfile> out;
  auto branches = t.ticked_branches();
  for (std::size_t b = 0; b < branches.size(); ++b) {
    BranchProfile p;
    p.branch_id = b;
    for (const auto &f : t.branch_formulas(branches[b]))
      if (f.is_literal())
        p.literal_atoms.insert(f.is_atom() ? f.name() : f.child().name());
    for (const auto &pid : alpha.processes())
      p.per_process_count[pid] = 0;
    for (const auto &a : p.literal_atoms)
      if (const ProcessId *owner = alpha.owner(a))
        ++p.per_process_count[*owner];
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::string dot_escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\')
      out += '\\';
    out += c;
  }
  return out;
}

} // namespace

std::string to_dot(const Tableau &t) {
  std::ostringstream os;
  os << "digraph tableau {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < t.node_count(); ++i) {
    const auto &n = t.node(i);
    std::string label;
    for (const auto &f : n.label) {
      if (!label.empty())
        label += ", ";
      label += f.to_string();
    }
    if (label.empty())
      label = "{}";
    if (n.children.empty()) {
      if (n.status == NodeStatus::Ticked)
        label += "\\n[ticked]";
      else if (n.status == NodeStatus::Crossed)
        label += "\\n[crossed]";
    }
    os << "  n" << i << " [label=\"" << dot_escape(label) << "\"";
    if (n.status == NodeStatus::Crossed)
      os << ", color=red";
    else if (n.status == NodeStatus::Ticked)
      os << ", color=darkgreen";
    os << "];\n";
  }
  for (std::size_t i = 0; i < t.node_count(); ++i)
    for (auto c : t.node(i).children)
      os << "  n" << i << " -> n" << c
         << (t.node(c).step ? " [style=bold]" : "") << ";\n";
  os << "}\n";
  return os.str();
}

Satisfiability classify(const Formula &f) {
  if (!satisfiable(f))
    return Satisfiability::Unsatisfiable;
  if (!satisfiable(Formula::negate(f)))
    return Satisfiability::Valid;
  return Satisfiability::Satisfiable;
}

const char *to_string(Satisfiability s) noexcept {
  switch (s) {
  case Satisfiability::Unsatisfiable:
    return "UNSAT";
  case Satisfiability::Valid:
    return "VALID";
  default:
    return "SAT";
  }
}

namespace {

// Renames atoms to r0, r1, ... in first-occurrence order. Satisfiability
// does not depend on atom names, so residuals that differ only in the
// steps of their frozen references share one cache entry.
Formula canonical_atoms(const Formula &f,
                        std::unordered_map<std::string, std::string> &names) {
  switch (f.op()) {
  case Op::True:
    return f;
  case Op::Atom: {
    auto [it, fresh] = names.try_emplace(f.name());
    if (fresh)
      it->second = "r" + std::to_string(names.size() - 1);
    return Formula::atom(it->second);
  }
  case Op::Not:
    return Formula::negate(canonical_atoms(f.child(), names));
  case Op::And:
  case Op::Or: {
    std::vector<Formula> kids;
    kids.reserve(f.children().size());
    for (const auto &k : f.children())
      kids.push_back(canonical_atoms(k, names));
    return f.op() == Op::And ? Formula::conj(std::move(kids))
                             : Formula::disj(std::move(kids));
  }
  case Op::Next:
    return Formula::next(canonical_atoms(f.child(), names));
  case Op::Finally:
    return Formula::finally(canonical_atoms(f.child(), names));
  case Op::Globally:
    return Formula::globally(canonical_atoms(f.child(), names));
  case Op::Until: {
    Formula l = canonical_atoms(f.child(0), names);
    return Formula::until(l, canonical_atoms(f.child(1), names));
  }
  }
  return f;
}

} // namespace

TruthValue3 residual_verdict(const Formula &input) {
  std::unordered_map<std::string, std::string> names;
  Formula residual = canonical_atoms(input, names);
  if (residual.is_true())
    return TruthValue3::Top;
  if (residual.is_false())
    return TruthValue3::Bot;
  thread_local std::unordered_map<Formula, TruthValue3, FormulaHash> memo;
  if (auto it = memo.find(residual); it != memo.end())
    return it->second;
  TruthValue3 v = TruthValue3::Unknown;
  if (!satisfiable(residual))
    v = TruthValue3::Bot;
  else if (!satisfiable(Formula::negate(residual)))
    v = TruthValue3::Top;
  if (memo.size() > 100'000)
    memo.clear();
  memo.emplace(residual, v);
  return v;
}

TruthValue3 ltl3_eval(const Trace &u, const Formula &f) {
  Formula r = simplify(f);
  for (const auto &e : u) {
    if (r.is_true() || r.is_false())
      break;
    r = progress(r, e);
  }
  return residual_verdict(r);
}

} // namespace declmon
