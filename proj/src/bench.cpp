#include "declmon/bench.hpp"

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace declmon {

namespace {

std::size_t uniform(Rng &rng, std::size_t n) {
  // Plain modulo keeps draws identical across standard libraries.
  return static_cast<std::size_t>(rng() % n);
}

Formula random_literal(const std::vector<std::string> &atoms, Rng &rng) {
  Formula a = Formula::atom(atoms[uniform(rng, atoms.size())]);
  return uniform(rng, 2) ? Formula::negate(a) : a;
}

Formula random_prop(const std::vector<std::string> &atoms, Rng &rng) {
  switch (uniform(rng, 4)) {
  case 0:
    return Formula::conj({random_literal(atoms, rng), random_literal(atoms, rng)});
  case 1:
    return Formula::disj({random_literal(atoms, rng), random_literal(atoms, rng)});
  default:
    return random_literal(atoms, rng);
  }
}

Formula gen(int k, const std::vector<std::string> &atoms, Rng &rng) {
  if (k == 0)
    return random_prop(atoms, rng);
  switch (uniform(rng, 6)) {
  case 0:
    return Formula::next(gen(k - 1, atoms, rng));
  case 1:
    return Formula::finally(gen(k - 1, atoms, rng));
  case 2:
    return Formula::globally(gen(k - 1, atoms, rng));
  case 3: {
    int left = static_cast<int>(uniform(rng, static_cast<std::size_t>(k)));
    Formula l = gen(left, atoms, rng);
    Formula r = gen(k - 1 - left, atoms, rng);
    return Formula::until(l, r);
  }
  default: {
    // Boolean combination; both sides may carry temporal operators.
    int left = static_cast<int>(uniform(rng, static_cast<std::size_t>(k) + 1));
    Formula l = gen(left, atoms, rng);
    Formula r = gen(k - left, atoms, rng);
    return uniform(rng, 2) ? Formula::conj({l, r}) : Formula::disj({l, r});
  }
  }
}

} // namespace

Formula random_formula(int size, const std::vector<std::string> &atoms,
                       Rng &rng) {
  if (size < 1)
    throw Error("formula size must be at least 1");
  if (atoms.empty())
    throw Error("random_formula needs at least one atom");
  return gen(size, atoms, rng);
}

Formula random_formula(int size, const std::vector<std::string> &atoms,
                       std::uint64_t seed) {
  Rng rng(seed);
  return random_formula(size, atoms, rng);
}

// ---------------------------------------------------------------------------

const std::vector<PatternKind> &all_patterns() {
  static const std::vector<PatternKind> v{
      PatternKind::Absence,         PatternKind::Existence,
      PatternKind::BoundedExistence, PatternKind::Universal,
      PatternKind::Precedence,      PatternKind::Response,
      PatternKind::PrecedenceChain, PatternKind::ResponseChain,
      PatternKind::ConstrainedChain};
  return v;
}

const char *to_string(PatternKind k) noexcept {
  switch (k) {
  case PatternKind::Absence:
    return "abs";
  case PatternKind::Existence:
    return "exis";
  case PatternKind::BoundedExistence:
    return "bexis";
  case PatternKind::Universal:
    return "univ";
  case PatternKind::Precedence:
    return "prec";
  case PatternKind::Response:
    return "resp";
  case PatternKind::PrecedenceChain:
    return "precc";
  case PatternKind::ResponseChain:
    return "respc";
  case PatternKind::ConstrainedChain:
    return "consc";
  }
  return "?";
}

std::optional<PatternKind> parse_pattern(std::string_view name) {
  for (auto k : all_patterns())
    if (name == to_string(k))
      return k;
  return std::nullopt;
}

std::size_t pattern_arity(PatternKind k) noexcept {
  switch (k) {
  case PatternKind::Absence:
  case PatternKind::Existence:
  case PatternKind::BoundedExistence:
  case PatternKind::Universal:
    return 1;
  case PatternKind::Precedence:
  case PatternKind::Response:
    return 2;
  case PatternKind::PrecedenceChain:
  case PatternKind::ResponseChain:
    return 3;
  case PatternKind::ConstrainedChain:
    return 4;
  }
  return 1;
}

namespace {

// Weak until: a W b = (a U b) | G a.
Formula weak_until(const Formula &a, const Formula &b) {
  return Formula::disj({Formula::until(a, b), Formula::globally(a)});
}

} // namespace

Formula pattern_template(PatternKind k,
                         const std::vector<std::string> &params) {
  if (params.size() < pattern_arity(k))
    throw Error(std::string("pattern ") + to_string(k) + " needs " +
                std::to_string(pattern_arity(k)) + " atoms");
  auto A = [&](std::size_t i) { return Formula::atom(params[i]); };
  auto N = [](const Formula &f) { return Formula::negate(f); };
  switch (k) {
  case PatternKind::Absence:
    return Formula::globally(N(A(0)));
  case PatternKind::Existence:
    return Formula::finally(A(0));
  case PatternKind::BoundedExistence: {
    // At most two P-segments.
    Formula p = A(0), np = N(A(0));
    Formula inner = weak_until(p, Formula::globally(np));
    inner = weak_until(np, inner);
    inner = weak_until(p, inner);
    return weak_until(np, inner);
  }
  case PatternKind::Universal:
    return Formula::globally(A(0));
  case PatternKind::Precedence: // S precedes P
    return weak_until(N(A(0)), A(1));
  case PatternKind::Response: // S responds to P
    return Formula::globally(Formula::disj({N(A(0)), Formula::finally(A(1))}));
  case PatternKind::PrecedenceChain: { // S, T precedes P
    Formula p = A(0), s = A(1), t = A(2);
    Formula tail = Formula::next(Formula::until(N(p), t));
    return Formula::disj(
        {N(Formula::finally(p)),
         Formula::until(N(p), Formula::conj({s, N(p), tail}))});
  }
  case PatternKind::ResponseChain: { // P responds to S, T
    Formula p = A(0), s = A(1), t = A(2);
    Formula trigger = Formula::conj({s, Formula::next(Formula::finally(t))});
    Formula answer = Formula::next(
        Formula::until(N(t), Formula::conj({t, Formula::finally(p)})));
    return Formula::globally(Formula::disj({N(trigger), answer}));
  }
  case PatternKind::ConstrainedChain: { // S, T responds to P, constrained by Z
    Formula p = A(0), s = A(1), t = A(2), z = A(3);
    Formula chain = Formula::conj(
        {s, N(z), Formula::next(Formula::until(N(z), t))});
    return Formula::globally(Formula::disj({N(p), Formula::finally(chain)}));
  }
  }
  throw Error("unknown pattern");
}

Formula pattern_formula(PatternKind k, const std::vector<std::string> &atoms,
                        Rng &rng) {
  std::size_t n = pattern_arity(k);
  if (atoms.size() < n)
    throw Error(std::string("pattern ") + to_string(k) + " needs " +
                std::to_string(n) + " distinct atoms");
  std::vector<std::string> pool = atoms;
  for (std::size_t i = 0; i < n; ++i)
    std::swap(pool[i], pool[i + uniform(rng, pool.size() - i)]);
  pool.resize(n);
  return pattern_template(k, pool);
}

Trace random_trace(const SystemAlphabet &alpha, std::size_t len, double p_true,
                   Rng &rng) {
  if (!(p_true >= 0.0 && p_true <= 1.0))
    throw Error("p_true must lie in [0, 1]");
  const std::set<std::string> all = alpha.all_atoms();
  Trace tr(len);
  for (auto &e : tr)
    for (const auto &a : all)
      if (static_cast<double>(rng() >> 11) * 0x1.0p-53 < p_true)
        e.true_atoms.insert(a);
  return tr;
}

Trace random_trace(const SystemAlphabet &alpha, std::size_t len, double p_true,
                   std::uint64_t seed) {
  Rng rng(seed);
  return random_trace(alpha, len, p_true, rng);
}

// ---------------------------------------------------------------------------

BfResult run_bf(const SystemAlphabet &alpha, const Formula &phi,
                const Trace &trace,
                const std::function<void(Step, const ProcessId &,
                                         const Formula &)> &on_obligation) {
  check_alphabet(alpha, phi, trace);
  BfResult r;
  CommScheme ring = rank_dm1(alpha, phi);
  const auto &order = ring.ring();
  const std::size_t n = order.size();

  Formula start = simplify(phi);
  std::vector<std::optional<Formula>> held(n, start);
  std::vector<std::vector<Formula>> inbox(n);

  for (std::size_t ti = 0; ti < trace.size(); ++ti) {
    Step t = static_cast<Step>(ti);
    std::vector<std::vector<Formula>> next(n);
    std::vector<std::pair<ProcessId, TruthValue3>> decided;
    for (std::size_t i = 0; i < n; ++i) {
      const ProcessId &p = order[i];
      std::vector<Formula> parts;
      if (held[i])
        parts.push_back(*held[i]);
      parts.insert(parts.end(), inbox[i].begin(), inbox[i].end());
      if (parts.empty())
        continue;
      auto own = [&](const Fact &f) {
        const ProcessId *o = alpha.owner(f.atom);
        if (!o || *o != p || f.step < 0 || f.step > t)
          return TruthValue3::Unknown;
        return from_bool(trace[static_cast<std::size_t>(f.step)].holds(f.atom));
      };
      Formula o = resolve_refs(Formula::conj(parts), own);
      o = progress_partial(o, t, [&](const std::string &a) {
        return own(Fact{a, t});
      });
      if (on_obligation)
        on_obligation(t, p, o);
      r.metrics.mem_bits =
          std::max(r.metrics.mem_bits, 8 * o.symbol_count());
      if (o.is_true() || o.is_false()) {
        decided.emplace_back(p, o.is_true() ? TruthValue3::Top
                                            : TruthValue3::Bot);
        held[i] = o;
        continue;
      }
      if (has_refs(o) && n > 1) {
        next[(i + 1) % n].push_back(o);
        ++r.metrics.num_msgs;
        r.metrics.msg_bits += kHeaderBits + 8 * o.symbol_count();
        held[i].reset();
      } else {
        held[i] = o;
      }
    }
    if (!decided.empty()) {
      r.verdict = decided.front().second;
      r.decider = decided.front().first;
      r.round = t;
      r.metrics.trace_len = ti + 1;
      return r;
    }
    inbox = std::move(next);
  }
  r.metrics.trace_len = trace.size();
  return r;
}

// ---------------------------------------------------------------------------

const char *to_string(Approach a) noexcept {
  switch (a) {
  case Approach::BF:
    return "bf";
  case Approach::DM1:
    return "dm1";
  case Approach::DM2:
    return "dm2";
  }
  return "?";
}

std::optional<Approach> parse_approach(std::string_view name) {
  for (auto a : {Approach::BF, Approach::DM1, Approach::DM2})
    if (name == to_string(a))
      return a;
  return std::nullopt;
}

SystemAlphabet bench_alphabet(std::size_t processes,
                              std::size_t atoms_per_process) {
  if (processes == 0 || processes > 26 || atoms_per_process == 0)
    throw Error("bench alphabet needs 1..26 processes and at least one atom");
  std::vector<ProcessId> ps;
  std::map<ProcessId, std::set<std::string>> assign;
  for (std::size_t i = 0; i < processes; ++i) {
    ProcessId p(1, static_cast<char>('A' + i));
    ps.push_back(p);
    for (std::size_t j = 1; j <= atoms_per_process; ++j)
      assign[p].insert(std::string(1, static_cast<char>('a' + i)) +
                       std::to_string(j));
  }
  return SystemAlphabet(std::move(ps), std::move(assign));
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t i) noexcept {
  // splitmix64 finalizer over (seed, i)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

BenchReport::Mean BenchReport::mean(const std::string &group,
                                    Approach a) const {
  Mean m;
  for (const auto &r : rows) {
    if (r.group != group || r.approach != a)
      continue;
    ++m.samples;
    m.trace_len += static_cast<double>(r.metrics.trace_len);
    m.num_msgs += static_cast<double>(r.metrics.num_msgs);
    m.msg_bits += static_cast<double>(r.metrics.msg_bits);
    m.mem_bits += static_cast<double>(r.metrics.mem_bits);
  }
  if (m.samples) {
    double n = static_cast<double>(m.samples);
    m.trace_len /= n;
    m.num_msgs /= n;
    m.msg_bits /= n;
    m.mem_bits /= n;
  }
  return m;
}

void BenchReport::write_csv(std::ostream &os) const {
  os << "approach,formula_size_or_pattern,formula,verdict,trace_len,num_msgs,"
        "msg_bits,mem_bits,seed\n";
  for (const auto &r : rows)
    os << to_string(r.approach) << ',' << r.group << ',' << r.formula << ','
       << to_string(r.verdict) << ',' << r.metrics.trace_len << ','
       << r.metrics.num_msgs << ',' << r.metrics.msg_bits << ','
       << r.metrics.mem_bits << ',' << r.seed << '\n';
}

void BenchReport::write_table(std::ostream &os) const {
  const int w = 13;
  auto fmt = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << v;
    return s.str();
  };
  os << std::left << std::setw(8) << "group";
  for (auto a : approaches) {
    std::string tag = to_string(a);
    for (const char *col : {"|trace|", "#msg", "|msg|", "|mem|"})
      os << std::right << std::setw(w) << (tag + ":" + col);
  }
  os << '\n';
  for (const auto &g : groups) {
    os << std::left << std::setw(8) << g;
    for (auto a : approaches) {
      Mean m = mean(g, a);
      for (double v : {m.trace_len, m.num_msgs, m.msg_bits, m.mem_bits})
        os << std::right << std::setw(w) << fmt(v);
    }
    os << '\n';
  }
  os << "(means; |mem| is the per-monitor peak)\n";
}

BenchReport bench(const BenchConfig &cfg) {
  if (cfg.approaches.empty())
    throw Error("no approaches selected");
  SystemAlphabet alpha = bench_alphabet(cfg.processes, cfg.atoms_per_process);
  const std::set<std::string> pool = alpha.all_atoms();
  const std::vector<std::string> atoms(pool.begin(), pool.end());

  struct Sample {
    std::string group;
    std::optional<int> size;
    std::optional<PatternKind> pattern;
    std::uint64_t seed = 0;
  };
  BenchReport rep;
  rep.approaches = cfg.approaches;
  std::vector<Sample> samples;
  std::uint64_t counter = 0;
  if (!cfg.patterns.empty()) {
    for (auto k : cfg.patterns) {
      rep.groups.push_back(to_string(k));
      for (std::size_t i = 0; i < cfg.formula_count; ++i)
        samples.push_back(Sample{to_string(k), std::nullopt, k,
                                 sample_seed(cfg.seed, counter++)});
    }
  } else {
    for (int s : cfg.sizes) {
      rep.groups.push_back(std::to_string(s));
      for (std::size_t i = 0; i < cfg.formula_count; ++i)
        samples.push_back(Sample{std::to_string(s), s, std::nullopt,
                                 sample_seed(cfg.seed, counter++)});
    }
  }

  std::vector<std::vector<BenchRow>> out(samples.size());
  auto work = [&](std::size_t i) {
    const Sample &s = samples[i];
    Rng rng(s.seed);
    Formula f = s.pattern ? pattern_formula(*s.pattern, atoms, rng)
                          : random_formula(*s.size, atoms, rng);
    Trace tr = random_trace(alpha, cfg.trace_len, cfg.p_true, rng);
    for (auto a : cfg.approaches) {
      BenchRow row{a, s.group, f.to_string(), TruthValue3::Unknown, {}, s.seed};
      if (a == Approach::BF) {
        BfResult r = run_bf(alpha, f, tr);
        row.verdict = r.verdict;
        row.metrics = r.metrics;
      } else {
        RunResult r = run(alpha, f, tr,
                          a == Approach::DM1 ? Strategy::DM1 : Strategy::DM2);
        row.verdict = r.verdict;
        row.metrics = r.metrics;
      }
      out[i].push_back(std::move(row));
    }
  };

  unsigned jobs = std::max(1u, cfg.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < samples.size(); ++i)
      work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next++) < samples.size();)
          work(i);
      });
    for (auto &th : pool)
      th.join();
  }
  for (auto &v : out)
    for (auto &row : v)
      rep.rows.push_back(std::move(row));
  return rep;
}

} // namespace declmon
