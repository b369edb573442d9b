// Direct step-by-step simulation with blank-halt detection.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "castor/machine.hpp"
#include "castor/tape.hpp"

namespace castor {

enum class StepStatus { Running, Halted, Undefined };

// Applies one transition in place. A halting transition still writes and
// moves, and counts as a step. Undefined leaves the configuration untouched.
inline StepStatus step(Configuration& config, const TransitionTable& table) {
  const Symbol read = config.tape.read(config.head);
  const PackedEntry& e = table.entry(config.state.index(), read);
  if (!e.defined()) return StepStatus::Undefined;
  config.tape.write(config.head, e.write);
  config.head += e.move;
  config.tape.visit(config.head);
  ++config.steps;
  if (e.halts()) {
    config.state = StateId::halt();
    return StepStatus::Halted;
  }
  config.state = StateId(e.next);
  return StepStatus::Running;
}

struct RunResult {
  enum class Kind { HaltedBlank, HaltedDirty, Cutoff };

  Kind kind = Kind::Cutoff;
  std::uint64_t steps = 0;
  std::int64_t head = 0;

  bool operator==(const RunResult&) const = default;
};

std::string to_string(RunResult::Kind kind);

class UndefinedTransitionError : public std::runtime_error {
 public:
  UndefinedTransitionError(StateId state, Symbol read, std::uint64_t steps);

  StateId state;
  Symbol read;
  std::uint64_t steps;
};

// Steps the configuration until it halts, reaches max_steps total steps, or
// hits an undefined pair. Returns the final status.
StepStatus run(Configuration& config, const TransitionTable& table, std::uint64_t max_steps);

// Runs from the blank tape in state A. Throws UndefinedTransitionError when
// the trajectory reaches an undefined pair.
RunResult simulate(const TransitionTable& table, std::uint64_t max_steps);

}  // namespace castor
