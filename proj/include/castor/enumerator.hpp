// Tree-normal-form enumeration. Machines start with only (A,0) defined and
// are simulated from the blank tape; whenever the run reaches an undefined
// (state, symbol) pair, one child per legal transition is created and the
// search continues in each child from that point.
//
// Normalisation rules:
//   * (A,0) moves right (mirror images are skipped) and goes to B, or halts
//     when there is a single state;
//   * a new transition may target the states already in use, at most one
//     fresh state, or halt;
//   * a new transition may write the symbols already in use or the next
//     unused one, so non-blank symbols appear in first-write order;
//   * machines with two equivalent fully defined states are dropped, since
//     merging them yields a smaller machine with the same run.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "castor/deciders.hpp"
#include "castor/machine.hpp"
#include "castor/tape.hpp"

namespace castor {

enum class EnumerationMode {
  // Both first writes are enumerated.
  Default,
  // Only machines writing a one in the first step; used for cross-checks.
  PaperPruning,
};

std::string to_string(EnumerationMode mode);
std::optional<EnumerationMode> parse_mode(std::string_view text);

struct PartialMachine {
  TransitionTable table;
  int used_states = 1;   // states referenced so far, A included
  int used_symbols = 1;  // symbols written so far, blank included

  // Recovers the counters from a table built by this enumerator.
  static PartialMachine from_table(const TransitionTable& table);
};

struct EnumerationNode {
  PartialMachine machine;
  // Where the run stopped: at an undefined pair, or at the start for roots.
  Configuration config;
};

std::vector<PartialMachine> root_machines(int n_states, int n_symbols,
                                          EnumerationMode mode = EnumerationMode::Default);

// Children of node for the undefined pair it is waiting on, in traversal
// order: write ascending, Right before Left, target ascending, halt last.
// Each child has the new transition applied to its configuration.
std::vector<EnumerationNode> expand(const EnumerationNode& node, StateId pending_state,
                                    Symbol pending_read);

// A pair of distinct fully defined states that behave identically (after
// identifying equivalent states in next-state references), if any.
std::optional<std::pair<StateId, StateId>> equivalent_states(const TransitionTable& table);

// Rebuilds a node by replaying the machine from the blank tape.
EnumerationNode replay_node(const TransitionTable& table, std::uint64_t steps);

using LeafSink = std::function<void(const TransitionTable&, const Decision&)>;

struct EnumerationStats {
  std::uint64_t nodes = 0;
  std::uint64_t pruned_equivalent = 0;

  EnumerationStats& operator+=(const EnumerationStats& o) {
    nodes += o.nodes;
    pruned_equivalent += o.pruned_equivalent;
    return *this;
  }
};

class Enumerator {
 public:
  Enumerator(int n_states, int n_symbols, DeciderLimits limits,
             EnumerationMode mode = EnumerationMode::Default);

  std::vector<EnumerationNode> roots() const;

  // Depth-first traversal of the whole subtree below node.
  void explore(const EnumerationNode& node, const LeafSink& sink);

  // Processes a single node: leaves among it and its children go to the sink,
  // and the children that still need exploring are returned in order.
  std::vector<EnumerationNode> split(const EnumerationNode& node, const LeafSink& sink);

  const EnumerationStats& stats() const { return stats_; }
  int n_states() const { return n_states_; }
  int n_symbols() const { return n_symbols_; }

 private:
  // Runs node forward; true when it stopped at an undefined pair.
  bool advance(EnumerationNode& node, const LeafSink& sink);
  void explore_at(std::size_t depth, const LeafSink& sink);
  // Emits halting children and calls visit(child_index) for the others after
  // placing the child into frames_[depth + 1].
  template <class Visit>
  void for_each_child(std::size_t depth, const LeafSink& sink, Visit&& visit);

  int n_states_;
  int n_symbols_;
  DeciderLimits limits_;
  EnumerationMode mode_;
  EnumerationStats stats_;
  std::vector<EnumerationNode> frames_;
};

// Convenience wrapper: explores every root.
EnumerationStats enumerate(int n_states, int n_symbols, const DeciderLimits& limits,
                           const LeafSink& sink, EnumerationMode mode = EnumerationMode::Default);

}  // namespace castor
