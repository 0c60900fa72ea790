#pragma once

#include "declmon/formula.hpp"
#include "declmon/monitor.hpp"
#include "declmon/semantics.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace declmon {

using Rng = std::mt19937_64;

/// Random formula with exactly `size` temporal operators over `atoms`.
Formula random_formula(int size, const std::vector<std::string> &atoms,
                       Rng &rng);
Formula random_formula(int size, const std::vector<std::string> &atoms,
                       std::uint64_t seed);

enum class PatternKind {
  Absence,
  Existence,
  BoundedExistence,
  Universal,
  Precedence,
  Response,
  PrecedenceChain,
  ResponseChain,
  ConstrainedChain
};
const std::vector<PatternKind> &all_patterns();
/// "abs", "exis", "bexis", "univ", "prec", "resp", "precc", "respc", "consc"
const char *to_string(PatternKind k) noexcept;
std::optional<PatternKind> parse_pattern(std::string_view name);
/// Number of distinct atoms the template needs.
std::size_t pattern_arity(PatternKind k) noexcept;

/// Global-scope template instantiated with the given atoms in order
/// (P, S, T, Z as needed).
Formula pattern_template(PatternKind k, const std::vector<std::string> &params);
/// Template instantiated with distinct atoms drawn from `atoms`.
Formula pattern_formula(PatternKind k, const std::vector<std::string> &atoms,
                        Rng &rng);

Trace random_trace(const SystemAlphabet &alpha, std::size_t len, double p_true,
                   Rng &rng);
Trace random_trace(const SystemAlphabet &alpha, std::size_t len, double p_true,
                   std::uint64_t seed);

struct BfResult {
  TruthValue3 verdict = TruthValue3::Unknown;
  std::optional<ProcessId> decider;
  std::optional<Step> round;
  Metrics metrics;
};

/// Progression baseline: obligations are progressed on local events with
/// remote atoms frozen, and forwarded along the DM1 ring until they fold to
/// a constant. 16-bit header plus 8 bits per formula symbol.
BfResult run_bf(const SystemAlphabet &alpha, const Formula &phi,
                const Trace &trace,
                const std::function<void(Step, const ProcessId &,
                                         const Formula &)> &on_obligation = {});

enum class Approach { BF, DM1, DM2 };
const char *to_string(Approach a) noexcept;
std::optional<Approach> parse_approach(std::string_view name);

struct BenchConfig {
  std::size_t formula_count = 1000;
  std::vector<int> sizes{1, 2, 3};
  std::vector<PatternKind> patterns; // non-empty: pattern benchmark
  std::size_t processes = 3;
  std::size_t atoms_per_process = 2;
  std::size_t trace_len = 1000;
  double p_true = 0.5;
  std::uint64_t seed = 1;
  std::vector<Approach> approaches{Approach::BF, Approach::DM1,
                                   Approach::DM2};
  unsigned jobs = 1;
};

/// Processes A, B, C, ... owning a1, a2, b1, b2, ...
SystemAlphabet bench_alphabet(std::size_t processes,
                              std::size_t atoms_per_process);

struct BenchRow {
  Approach approach = Approach::BF;
  std::string group; // size or pattern name
  std::string formula;
  TruthValue3 verdict = TruthValue3::Unknown;
  Metrics metrics;
  std::uint64_t seed = 0;
};

struct BenchReport {
  std::vector<std::string> groups; // in configured order
  std::vector<Approach> approaches;
  std::vector<BenchRow> rows;

  struct Mean {
    double trace_len = 0, num_msgs = 0, msg_bits = 0, mem_bits = 0;
    std::size_t samples = 0;
  };
  Mean mean(const std::string &group, Approach a) const;

  void write_csv(std::ostream &os) const;
  void write_table(std::ostream &os) const;
};

/// Seed of sample i derived from the configured seed.
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t i) noexcept;

BenchReport bench(const BenchConfig &cfg);

} // namespace declmon
