#include "declmon/semantics.hpp"

#include <cctype>
#include <charconv>
#include <ostream>
#include <sstream>

namespace declmon {

TruthValue3 kleene_not(TruthValue3 v) noexcept {
  switch (v) {
  case TruthValue3::Top:
    return TruthValue3::Bot;
  case TruthValue3::Bot:
    return TruthValue3::Top;
  default:
    return TruthValue3::Unknown;
  }
}

TruthValue3 kleene_and(TruthValue3 a, TruthValue3 b) noexcept {
  if (a == TruthValue3::Bot || b == TruthValue3::Bot)
    return TruthValue3::Bot;
  if (a == TruthValue3::Top && b == TruthValue3::Top)
    return TruthValue3::Top;
  return TruthValue3::Unknown;
}

TruthValue3 kleene_or(TruthValue3 a, TruthValue3 b) noexcept {
  if (a == TruthValue3::Top || b == TruthValue3::Top)
    return TruthValue3::Top;
  if (a == TruthValue3::Bot && b == TruthValue3::Bot)
    return TruthValue3::Bot;
  return TruthValue3::Unknown;
}

const char *to_string(TruthValue3 v) noexcept {
  switch (v) {
  case TruthValue3::Top:
    return "T";
  case TruthValue3::Bot:
    return "F";
  default:
    return "?";
  }
}

std::ostream &operator<<(std::ostream &os, TruthValue3 v) {
  return os << to_string(v);
}

std::string Fact::to_string() const {
  return atom + "@" + std::to_string(step);
}

// ---------------------------------------------------------------------------

SystemAlphabet::SystemAlphabet(
    std::vector<ProcessId> processes,
    std::map<ProcessId, std::set<std::string>> assignment)
    : processes_(std::move(processes)), assignment_(std::move(assignment)) {
  std::set<ProcessId> names;
  for (const auto &p : processes_) {
    if (!names.insert(p).second)
      throw Error("duplicate process '" + p + "'");
    assignment_[p]; // processes without atoms are allowed
  }
  for (const auto &[p, atoms] : assignment_) {
    if (!names.count(p))
      throw Error("atoms assigned to unknown process '" + p + "'");
    for (const auto &a : atoms) {
      auto [it, fresh] = owner_.emplace(a, p);
      if (!fresh)
        throw Error("atom '" + a + "' owned by both '" + it->second +
                    "' and '" + p + "'");
    }
  }
}

SystemAlphabet SystemAlphabet::parse(std::string_view text) {
  std::vector<ProcessId> procs;
  std::map<ProcessId, std::set<std::string>> assignment;
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
      s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
      s.remove_suffix(1);
    return s;
  };
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string_view::npos)
      end = text.size();
    std::string_view group = trim(text.substr(pos, end - pos));
    if (!group.empty()) {
      std::size_t colon = group.find(':');
      if (colon == std::string_view::npos)
        throw ParseError("expected 'process:atoms'", pos);
      std::string proc(trim(group.substr(0, colon)));
      if (proc.empty())
        throw ParseError("empty process name", pos);
      procs.push_back(proc);
      std::string_view list = group.substr(colon + 1);
      std::size_t p2 = 0;
      while (p2 <= list.size()) {
        std::size_t e2 = list.find(',', p2);
        if (e2 == std::string_view::npos)
          e2 = list.size();
        std::string_view a = trim(list.substr(p2, e2 - p2));
        if (!a.empty())
          assignment[proc].insert(std::string(a));
        p2 = e2 + 1;
      }
    }
    pos = end + 1;
  }
  if (procs.empty())
    throw ParseError("alphabet lists no processes", 0);
  return SystemAlphabet(std::move(procs), std::move(assignment));
}

const std::set<std::string> &SystemAlphabet::atoms_of(const ProcessId &p) const {
  auto it = assignment_.find(p);
  if (it == assignment_.end())
    throw Error("unknown process '" + p + "'");
  return it->second;
}

std::size_t SystemAlphabet::pid(const ProcessId &p) const {
  for (std::size_t i = 0; i < processes_.size(); ++i)
    if (processes_[i] == p)
      return i;
  throw Error("unknown process '" + p + "'");
}

const ProcessId *SystemAlphabet::owner(const std::string &atom) const {
  auto it = owner_.find(atom);
  return it == owner_.end() ? nullptr : &it->second;
}

std::set<std::string> SystemAlphabet::all_atoms() const {
  std::set<std::string> out;
  for (const auto &[a, p] : owner_)
    out.insert(a);
  return out;
}

Event SystemAlphabet::project(const Event &e, const ProcessId &p) const {
  Event out;
  const auto &mine = atoms_of(p);
  for (const auto &a : e.true_atoms)
    if (mine.count(a))
      out.true_atoms.insert(a);
  return out;
}

std::string SystemAlphabet::to_string() const {
  std::string out;
  for (const auto &p : processes_) {
    if (!out.empty())
      out += ';';
    out += p + ':';
    bool first = true;
    for (const auto &a : atoms_of(p)) {
      if (!first)
        out += ',';
      first = false;
      out += a;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

TruthValue3 PartialValuation::get(const std::string &atom, Step step) const {
  auto it = values_.find(Fact{atom, step});
  if (it == values_.end())
    return TruthValue3::Unknown;
  return from_bool(it->second);
}

bool PartialValuation::contains(const std::string &atom, Step step) const {
  return values_.count(Fact{atom, step}) != 0;
}

bool PartialValuation::set(const std::string &atom, Step step, bool value) {
  auto [it, fresh] = values_.emplace(Fact{atom, step}, value);
  if (fresh)
    return true;
  if (it->second != value)
    throw ConflictError("conflicting values for " + it->first.to_string());
  return false;
}

// ---------------------------------------------------------------------------

Trace parse_trace(std::string_view text) {
  Trace trace;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos)
      end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    std::string cleaned;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c)))
        cleaned += c;
    if (cleaned.empty())
      continue;
    Event e;
    if (cleaned != "-") {
      std::size_t p = 0;
      while (p <= cleaned.size()) {
        std::size_t q = cleaned.find(',', p);
        if (q == std::string::npos)
          q = cleaned.size();
        std::string a = cleaned.substr(p, q - p);
        if (a.empty() || !std::isalpha(static_cast<unsigned char>(a[0])))
          throw ParseError("bad atom name in trace", line_no);
        for (char c : a)
          if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
            throw ParseError("bad atom name in trace", line_no);
        e.true_atoms.insert(std::move(a));
        p = q + 1;
      }
    }
    trace.push_back(std::move(e));
  }
  return trace;
}

std::string format_trace(const Trace &trace) {
  std::string out;
  for (const auto &e : trace) {
    if (e.true_atoms.empty()) {
      out += "-\n";
      continue;
    }
    bool first = true;
    for (const auto &a : e.true_atoms) {
      if (!first)
        out += ',';
      first = false;
      out += a;
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

TruthValue3 eval_rec(
    const Formula &f,
    const std::function<TruthValue3(const std::string &)> &atom_value,
    const std::unordered_map<Formula, TruthValue3, FormulaHash> *temporal) {
  switch (f.op()) {
  case Op::True:
    return TruthValue3::Top;
  case Op::Atom:
    return atom_value(f.name());
  case Op::Not:
    return kleene_not(eval_rec(f.child(), atom_value, temporal));
  case Op::And: {
    TruthValue3 acc = TruthValue3::Top;
    for (const auto &k : f.children()) {
      acc = kleene_and(acc, eval_rec(k, atom_value, temporal));
      if (acc == TruthValue3::Bot)
        break;
    }
    return acc;
  }
  case Op::Or: {
    TruthValue3 acc = TruthValue3::Bot;
    for (const auto &k : f.children()) {
      acc = kleene_or(acc, eval_rec(k, atom_value, temporal));
      if (acc == TruthValue3::Top)
        break;
    }
    return acc;
  }
  default:
    if (temporal) {
      auto it = temporal->find(f);
      if (it != temporal->end())
        return it->second;
    }
    throw Error("no value supplied for temporal subformula " + f.to_string());
  }
}

} // namespace

TruthValue3
eval3(const Formula &f, const PartialValuation &v, Step t,
      const std::unordered_map<Formula, TruthValue3, FormulaHash> &temporal) {
  return eval_rec(
      f, [&](const std::string &a) { return v.get(a, t); }, &temporal);
}

TruthValue3
eval3(const Formula &f,
      const std::function<TruthValue3(const std::string &)> &atom_value) {
  return eval_rec(f, atom_value, nullptr);
}

// ---------------------------------------------------------------------------

std::string ref_atom(const Fact &f) { return f.to_string(); }

std::optional<Fact> parse_ref_atom(const std::string &name) {
  auto at = name.rfind('@');
  if (at == std::string::npos)
    return std::nullopt;
  Fact out;
  out.atom = name.substr(0, at);
  const char *first = name.data() + at + 1;
  const char *last = name.data() + name.size();
  auto [ptr, ec] = std::from_chars(first, last, out.step);
  if (ec != std::errc() || ptr != last)
    return std::nullopt;
  return out;
}

bool has_refs(const Formula &f) {
  if (f.is_atom())
    return f.name().find('@') != std::string::npos;
  for (const auto &k : f.children())
    if (has_refs(k))
      return true;
  return false;
}

namespace {

Formula constant(bool b) { return b ? Formula::top() : Formula::bottom(); }

Formula progress_rec(const Formula &f,
                     const std::function<Formula(const Formula &)> &on_atom) {
  switch (f.op()) {
  case Op::True:
    return f;
  case Op::Atom:
    return on_atom(f);
  case Op::Not:
    return Formula::negate(progress_rec(f.child(), on_atom));
  case Op::And:
  case Op::Or: {
    std::vector<Formula> kids;
    kids.reserve(f.children().size());
    for (const auto &k : f.children())
      kids.push_back(progress_rec(k, on_atom));
    return f.op() == Op::And ? Formula::conj(std::move(kids))
                             : Formula::disj(std::move(kids));
  }
  case Op::Next:
    return f.child();
  case Op::Globally:
    return Formula::conj({progress_rec(f.child(), on_atom), f});
  case Op::Finally:
    return Formula::disj({progress_rec(f.child(), on_atom), f});
  case Op::Until:
    return Formula::disj(
        {progress_rec(f.child(1), on_atom),
         Formula::conj({progress_rec(f.child(0), on_atom), f})});
  }
  return f;
}

} // namespace

Formula progress(const Formula &f, const Event &e) {
  return simplify(progress_rec(
      f, [&](const Formula &a) { return constant(e.holds(a.name())); }));
}

Formula progress_partial(const Formula &f, Step step,
                         const AtomResolver &resolve) {
  return simplify(progress_rec(f, [&](const Formula &a) -> Formula {
    if (a.name().find('@') != std::string::npos)
      return a; // frozen
    TruthValue3 v = resolve(a.name());
    if (is_definite(v))
      return constant(v == TruthValue3::Top);
    return Formula::atom(ref_atom(Fact{a.name(), step}));
  }));
}

namespace {

Formula substitute(const Formula &f,
                   const std::function<TruthValue3(const Fact &)> &known,
                   bool &changed) {
  if (f.is_atom()) {
    if (auto fact = parse_ref_atom(f.name())) {
      TruthValue3 v = known(*fact);
      if (is_definite(v)) {
        changed = true;
        return constant(v == TruthValue3::Top);
      }
    }
    return f;
  }
  // Frozen references never sit under a temporal operator.
  if (f.is_temporal_op() || f.children().empty())
    return f;
  std::vector<Formula> kids;
  kids.reserve(f.children().size());
  bool any = false;
  for (const auto &k : f.children())
    kids.push_back(substitute(k, known, any));
  if (!any)
    return f;
  changed = true;
  switch (f.op()) {
  case Op::Not:
    return Formula::negate(kids[0]);
  case Op::And:
    return Formula::conj(std::move(kids));
  default:
    return Formula::disj(std::move(kids));
  }
}

} // namespace

Formula
resolve_refs(const Formula &f,
             const std::function<TruthValue3(const Fact &)> &known) {
  bool changed = false;
  Formula out = substitute(f, known, changed);
  return changed ? simplify(out) : f;
}

} // namespace declmon
