#pragma once

#include "declmon/formula.hpp"
#include "declmon/inference.hpp"
#include "declmon/knowledge.hpp"
#include "declmon/semantics.hpp"
#include "declmon/tableau.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace declmon {

enum class Strategy { DM1, DM2 };
const char *to_string(Strategy s) noexcept;

/// One (index, state, value) triple of a message payload.
struct PayloadPair {
  std::size_t index = 0;
  Step state = 0;
  TruthValue3 value = TruthValue3::Unknown;
  friend bool operator==(const PayloadPair &, const PayloadPair &) = default;
};

struct Message {
  ProcessId sender;
  Step round = 0;
  std::vector<PayloadPair> payload;
};

inline constexpr std::size_t kHeaderBits = 16;

/// Header plus ceil(log2 K) + 8 + 2 bits per pair.
std::size_t message_bits(const Message &m, std::size_t table_size);

struct Metrics {
  std::size_t num_msgs = 0;
  std::size_t msg_bits = 0;
  std::size_t trace_len = 0;
  std::size_t mem_bits = 0;
};

/// Ring ordered by descending number of formula atoms owned, ties by PID.
CommScheme rank_dm1(const SystemAlphabet &alpha, const Formula &phi);
/// Ring ordered by descending number of ticked branches mentioning an atom
/// of the process, ties by PID.
CommScheme rank_dm2(const Tableau &refined, const SystemAlphabet &alpha);

/// Facts of a payload pair as deduced by a receiver that models the sender
/// with `sender_obs`.
FactSet pair_deductions(const Formula &f, const PayloadPair &p,
                        const ObservationSet &sender_obs);

/// Minimal payload whose deductions cover M. `tables` holds the sender's
/// tables for every state mentioned in M.
std::vector<PayloadPair> min_list(const FactSet &M,
                                  const std::map<Step, TruthTable> &tables,
                                  const FormulaIndex &index,
                                  const ObservationSet &sender_obs);

/// Everything the monitors agree on before the first round.
struct MonitorSetup {
  SystemAlphabet alpha;
  Formula phi; // nnf of the monitored formula
  Satisfiability sat = Satisfiability::Satisfiable;
  Tableau refined;
  FormulaIndex index;
  Strategy strategy = Strategy::DM1;
  ObsPowerModel model;
  std::set<std::string> phi_atoms;

  static MonitorSetup make(const SystemAlphabet &alpha, const Formula &phi,
                           Strategy strategy);
};

struct MonitorState {
  ProcessId pid;
  KnowledgeStore store;
  Formula residual;
  TruthValue3 verdict = TruthValue3::Unknown;
  std::size_t peak_table_bits = 0;
};

MonitorState initial_state(const MonitorSetup &setup, const ProcessId &pid);

/// One round for one monitor: ingest the local event, process the inbox,
/// build the outgoing message, update the verdict.
Message monitor_step(const MonitorSetup &setup, MonitorState &ms,
                     const Event &local_event,
                     const std::vector<Message> &inbox, Step t);

/// Hooks for inspecting a run.
struct RunObserver {
  /// Called for every emitted message with the sender's intended facts.
  std::function<void(const Message &, const ProcessId &receiver,
                     const FactSet &M)>
      on_message;
  /// Called after all monitors finished round t.
  std::function<void(Step t, const std::vector<MonitorState> &)> on_round;
};

struct RunResult {
  TruthValue3 verdict = TruthValue3::Unknown;
  /// First process (ring order) that decided; empty for setup verdicts.
  std::optional<ProcessId> decider;
  /// Round of the decision; nullopt if decided at setup or undecided.
  std::optional<Step> round;
  /// All definite verdicts of the deciding round.
  std::vector<std::pair<ProcessId, TruthValue3>> verdicts;
  Metrics metrics;
  CommScheme ring;
};

RunResult run(const SystemAlphabet &alpha, const Formula &phi,
              const Trace &trace, Strategy strategy,
              const RunObserver &observer = {});

/// Throws Error if the formula or trace mention atoms outside the alphabet.
void check_alphabet(const SystemAlphabet &alpha, const Formula &phi,
                    const Trace &trace);

} // namespace declmon
