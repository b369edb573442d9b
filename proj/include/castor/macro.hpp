// Macro-level analysis of the 6-state blank-halting champion.
//
// Its recurring tape shapes are C(k0,k1,k2) = 1^k0 0 1^k1 [C] 1^k2: state C
// with the head on the last one of the middle block (on the separating zero
// when k1 = 0). A handful of case rules with exact step costs move between
// such shapes, and summing them gives the machine's total running time
// without simulating it. cross_check() validates every rule against direct
// simulation.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "castor/machine.hpp"
#include "castor/tape.hpp"

namespace castor::macro {

inline constexpr std::string_view kChampion = "1RB1RA_1LB1LC_1RD0RE_0LE0RA_0RZ0RF_0RB0RC";
const TransitionTable& champion();

struct MacroConfig {
  std::int64_t k0 = 0;
  std::int64_t k1 = 0;
  std::int64_t k2 = 0;

  bool operator==(const MacroConfig&) const = default;
};

std::string to_string(const MacroConfig& mc);

// Raised for configurations the case analysis does not cover.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Rule {
  enum class Kind { Start, Case1, Case2_1, Case2_2a, Case2_2b, Case2_3a, Case2_3b, ClosedForm };
  Kind kind = Kind::Start;
  // ClosedForm only: k1 = 4m + r.
  int r = 0;
  std::int64_t m = 0;

  bool operator==(const Rule&) const = default;
};

// "Case2.2a", "ClosedForm(r=3,m=138)", ...
std::string to_string(const Rule& rule);
std::optional<Rule> parse_rule(std::string_view text);

struct MacroStep {
  std::optional<MacroConfig> from;  // nullopt: START (blank tape, state A)
  std::optional<MacroConfig> to;    // nullopt: HALT
  std::uint64_t cost = 0;
  Rule rule;
  // HALT only: the tape is blank when the machine stops.
  bool blank_halt = false;

  bool operator==(const MacroStep&) const = default;
};

// Tape, head and state for C(k0,k1,k2); the zero separating the blocks sits
// at offset k0, so the head is at offset k0 + k1.
Configuration expand(const MacroConfig& mc);

// The single case rule that applies to mc.
MacroStep macro_step(const MacroConfig& mc);

// Several case rules at once for k2 ≡ 2 (mod 3), following k1 = 4m + r down to
// the next Case 1 (r even) or k1 = 1 step (r odd).
MacroStep closed_form_step(const MacroConfig& mc);

// Applies macro_step until the chain reaches what closed_form_step jumps to;
// returns the combined step.
MacroStep fold(const MacroConfig& mc);

// The step from the blank tape into C(0,0,2).
MacroStep start_step();

struct Certificate {
  std::vector<MacroStep> steps;  // START first, HALT last
  // The "total" line of a parsed certificate.
  std::optional<std::uint64_t> stated_total;
  std::uint64_t total() const;
};

// START -> ... -> HALT using closed forms wherever they apply.
Certificate build_certificate();

// Direct simulation of the champion from expand(step.from) (or the blank tape)
// for exactly step.cost steps must land on expand(step.to) up to translation,
// or halt on the last step with the predicted tape blankness.
bool cross_check(const MacroStep& step);

// "C(1,7,2) -> C(0,0,21) 105 ClosedForm(r=3,m=1)" lines, START/HALT for the
// endpoints (HALT steps append "blank" or "dirty"), then "total N".
std::string export_certificate(const Certificate& cert);
// Throws std::invalid_argument on malformed text.
Certificate parse_certificate(std::string_view text);

struct VerifyResult {
  bool ok = false;
  std::string message;
};

// Checks chaining, endpoints, each rule's successor and cost, every step
// against direct simulation, and the stated total if any.
VerifyResult verify_certificate(const Certificate& cert);

}  // namespace castor::macro
