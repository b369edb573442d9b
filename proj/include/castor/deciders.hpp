// Halting and non-halting analyses. Every conclusive verdict here is either
// backed by an exhaustive argument or, for the escape heuristic, explicitly
// labelled so strict searches can refuse it.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "castor/machine.hpp"
#include "castor/tape.hpp"

namespace castor {

enum class Reason {
  BackwardContradiction,
  HaltUnreachable,
  CyclerRepeat,
  EscapeHeuristic,
  KnownBoundExceeded,
};

std::string to_string(Reason reason);
std::optional<Reason> parse_reason(std::string_view text);

struct Decision {
  enum class Verdict { HaltsBlank, HaltsDirty, NonHalting, NoBlankHalt, Unknown };

  Verdict verdict = Verdict::Unknown;
  // Halting step count for HaltsBlank/HaltsDirty, the cap for Unknown.
  std::uint64_t steps = 0;
  Reason reason = Reason::HaltUnreachable;  // meaningful for NonHalting/NoBlankHalt

  static Decision halts(bool blank, std::uint64_t steps) {
    return {blank ? Verdict::HaltsBlank : Verdict::HaltsDirty, steps, Reason::HaltUnreachable};
  }
  static Decision non_halting(Reason r) { return {Verdict::NonHalting, 0, r}; }
  static Decision no_blank_halt(Reason r) { return {Verdict::NoBlankHalt, 0, r}; }
  static Decision unknown(std::uint64_t cap) { return {Verdict::Unknown, cap, Reason::HaltUnreachable}; }

  bool conclusive() const { return verdict != Verdict::Unknown; }
  bool has_reason() const {
    return verdict == Verdict::NonHalting || verdict == Verdict::NoBlankHalt;
  }
  bool operator==(const Decision& other) const;
};

std::string to_string(Decision::Verdict verdict);
// "halts-blank 187", "non-halting cycler-repeat", "unknown 1000", ...
std::string to_string(const Decision& decision);

// Trusted external maxima: any machine with at most `states` states over at
// most `symbols` symbols that halts from the blank tape does so within
// max_steps steps.
class KnownBounds {
 public:
  // (4,2) -> 107 and (5,2) -> 47 176 870.
  static KnownBounds defaults();
  static KnownBounds none() { return KnownBounds(); }
  // Lines "states symbols max_steps"; '#' starts a comment.
  static KnownBounds parse(std::string_view text);
  static KnownBounds load(const std::string& path);

  void add(int states, int symbols, std::uint64_t max_steps);
  // Tightest bound covering a machine of this size, if any.
  std::optional<std::uint64_t> bound_for(int states, int symbols) const;
  const std::map<std::pair<int, int>, std::uint64_t>& entries() const { return entries_; }
  std::string to_text() const;

  bool operator==(const KnownBounds&) const = default;

 private:
  std::map<std::pair<int, int>, std::uint64_t> entries_;
};

struct DeciderLimits {
  std::uint64_t max_steps = 1'000'000;
  int backward_depth = 16;
  KnownBounds known_bounds = KnownBounds::defaults();
  bool escape_enabled = true;
  // Largest visited window (in cells) the cycler will snapshot.
  std::size_t cycler_memory = 1 << 16;
  // Node cap for one backward-reasoning search.
  std::size_t backward_nodes = 20'000;

  void validate() const;
};

// True iff HALT, or an undefined entry, is reachable in the state graph from
// `from` (A by default). Undefined entries count as potential exits.
bool halt_reachability(const TransitionTable& machine, StateId from = StateId(0));

// False iff no halting transition writes blank (and no undefined entry could
// become one): the machine may halt, but never on a blank tape.
bool blank_halt_feasible(const TransitionTable& machine);

enum class BackwardTarget {
  // Start from "blank tape, halting": the tape is fully known.
  BlankHalt,
  // Start from any halting or undefined pair with unknown surroundings.
  AnyHalt,
};

// The exhausted tree of predecessor configurations. Every node records each
// candidate predecessor either as a child or as a blocked edge whose written
// symbol contradicts the known cell.
struct BackwardProof {
  struct Blocked {
    int state = 0;  // predecessor state
    Symbol read = 0;
    Symbol required = 0;  // what the predecessor writes
    Symbol found = 0;     // what the cell must hold
  };

  struct Node {
    int parent = -1;  // -1 for roots
    int depth = 1;
    // Root: the final (state, read) pair. Child: the predecessor's pair.
    int state = 0;
    Symbol read = 0;
    // Direction the predecessor moved (children only).
    Move move = Move::Right;
    // Child created through an undefined entry.
    bool wildcard = false;
    std::vector<Blocked> blocked;
  };

  BackwardTarget target = BackwardTarget::BlankHalt;
  std::vector<Node> nodes;
  // Halting pairs rejected outright (BlankHalt: they write a non-blank symbol).
  std::vector<std::pair<int, Symbol>> blocked_roots;
  int max_depth = 0;
};

std::optional<BackwardProof> backward_reasoning(const TransitionTable& machine, int depth,
                                                BackwardTarget target = BackwardTarget::BlankHalt,
                                                std::size_t node_budget = 20'000);

// Replays a proof without reusing the search: rebuilds each node's tape from
// its path, checks every recorded contradiction, and checks that each node
// accounts for every candidate predecessor.
bool check_backward_proof(const TransitionTable& machine, const BackwardProof& proof);

std::uint64_t cell_hash(std::int64_t pos, Symbol value);
std::uint64_t tape_hash(const Tape& tape);

// Brent-style repeat detection: one snapshot retaken at exponentially growing
// intervals. Sound (any reported pair is an exact repeat), possibly late.
class CyclerDetector {
 public:
  explicit CyclerDetector(std::size_t budget_cells = 1 << 16) : budget_(budget_cells) {}

  std::optional<std::pair<std::uint64_t, std::uint64_t>> observe(const Configuration& config) {
    return observe(config, tape_hash(config.tape));
  }
  // hash must equal tape_hash(config.tape).
  std::optional<std::pair<std::uint64_t, std::uint64_t>> observe(const Configuration& config,
                                                                 std::uint64_t hash);

  // Cheap pre-checks for simulation loops: observe() only needs to be called
  // when one of these is true.
  bool candidate(StateId state, std::int64_t head, std::uint64_t hash) const {
    return state == snapshot_.state && head == snapshot_.head && hash == snapshot_hash_;
  }
  bool due(std::uint64_t steps) const { return steps >= next_due(); }
  std::uint64_t next_due() const { return snapshot_.steps + interval_; }
  StateId snapshot_state() const { return snapshot_.state; }
  std::int64_t snapshot_head() const { return snapshot_.head; }
  std::uint64_t snapshot_hash() const { return snapshot_hash_; }

 private:
  void take(const Configuration& config, std::uint64_t hash);

  std::size_t budget_;
  bool has_snapshot_ = false;
  Configuration snapshot_;
  std::uint64_t snapshot_hash_ = 0;
  std::uint64_t interval_ = 1;
};

std::optional<std::pair<std::uint64_t, std::uint64_t>> cycler_check(
    std::span<const Configuration> trace, std::size_t budget_cells = 1 << 16);

// |head| > steps / 2.
inline bool escape_check(const Configuration& config) {
  const std::uint64_t distance =
      static_cast<std::uint64_t>(config.head < 0 ? -config.head : config.head);
  return config.steps >= 2 && 2 * distance > config.steps;
}

std::optional<Decision> known_bound_cutoff(const TransitionTable& machine, std::uint64_t steps,
                                           const DeciderLimits& limits);

// How a checked run ended.
struct RunOutcome {
  enum class Event { Halted, Undefined, Cycler, Escape, KnownBound, Cap };
  Event event = Event::Cap;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> cycle;
};

// Simulates from `config` until it halts, reaches an undefined pair, or a
// decider fires, stopping at limits.max_steps total steps. Cycler and escape
// checks only look at configurations from the current one onwards.
RunOutcome run_checked(Configuration& config, const TransitionTable& machine,
                       const DeciderLimits& limits);

// Static checks, then checked simulation, then backward reasoning towards
// any halt before giving up. Reaching an undefined pair yields Unknown.
Decision decide(const TransitionTable& machine, const DeciderLimits& limits);

}  // namespace castor
