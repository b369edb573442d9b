#include "castor/simulator.hpp"

namespace castor {

std::string to_string(RunResult::Kind kind) {
  switch (kind) {
    case RunResult::Kind::HaltedBlank: return "halted-blank";
    case RunResult::Kind::HaltedDirty: return "halted-dirty";
    case RunResult::Kind::Cutoff: return "cutoff";
  }
  return "?";
}

UndefinedTransitionError::UndefinedTransitionError(StateId state_, Symbol read_,
                                                   std::uint64_t steps_)
    : std::runtime_error(std::string("undefined transition ") + state_.letter() +
                         std::to_string(read_) + " reached after " + std::to_string(steps_) +
                         " steps"),
      state(state_),
      read(read_),
      steps(steps_) {}

StepStatus run(Configuration& config, const TransitionTable& table, std::uint64_t max_steps) {
  while (config.steps < max_steps) {
    const StepStatus status = step(config, table);
    if (status != StepStatus::Running) return status;
  }
  return StepStatus::Running;
}

RunResult simulate(const TransitionTable& table, std::uint64_t max_steps) {
  Configuration config;
  const StepStatus status = run(config, table, max_steps);
  if (status == StepStatus::Undefined) {
    throw UndefinedTransitionError(config.state, config.tape.read(config.head), config.steps);
  }
  RunResult result;
  result.steps = config.steps;
  result.head = config.head;
  if (status == StepStatus::Halted) {
    result.kind = config.tape.blank() ? RunResult::Kind::HaltedBlank : RunResult::Kind::HaltedDirty;
  }
  return result;
}

}  // namespace castor
