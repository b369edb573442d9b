// Turing machine transition tables and the compact machine-string format.
//
// A machine string lists the states in order A, B, C, ...; each state holds
// one three-character triple per read symbol (write digit, 'L' or 'R', next
// state letter with 'Z' for halt, or "---" when undefined). States are joined
// by '_', e.g. "1RB1LB_1LA0LC_0RZ0LD_1RD0LB".

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace castor {

using Symbol = std::uint8_t;

inline constexpr Symbol kBlank = 0;
inline constexpr int kMaxStates = 25;  // 'Z' is reserved for halt
inline constexpr int kMaxSymbols = 10;

enum class Move : std::int8_t { Left = -1, Right = 1 };

constexpr Move opposite(Move m) { return m == Move::Left ? Move::Right : Move::Left; }

class StateId {
 public:
  constexpr StateId() = default;
  constexpr explicit StateId(int index) : value_(static_cast<std::uint8_t>(index)) {}

  static constexpr StateId halt() {
    StateId s;
    s.value_ = kHaltValue;
    return s;
  }

  constexpr bool is_halt() const { return value_ == kHaltValue; }
  constexpr int index() const { return value_; }
  char letter() const { return is_halt() ? 'Z' : static_cast<char>('A' + value_); }

  constexpr auto operator<=>(const StateId&) const = default;

 private:
  static constexpr std::uint8_t kHaltValue = 0xFE;
  std::uint8_t value_ = 0;
};

struct Transition {
  Symbol write = 0;
  Move move = Move::Right;
  StateId next;

  constexpr bool operator==(const Transition&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Packed table entry; the simulator's inner loop reads these directly.
struct PackedEntry {
  static constexpr std::uint8_t kUndefined = 0xFF;
  static constexpr std::uint8_t kHalt = 0xFE;

  std::uint8_t write = 0;
  std::int8_t move = 1;
  std::uint8_t next = kUndefined;

  constexpr bool defined() const { return next != kUndefined; }
  constexpr bool halts() const { return next == kHalt; }
  constexpr bool operator==(const PackedEntry&) const = default;
};

class TransitionTable {
 public:
  TransitionTable() : TransitionTable(1, 2) {}
  TransitionTable(int n_states, int n_symbols);

  int n_states() const { return n_states_; }
  int n_symbols() const { return n_symbols_; }

  std::optional<Transition> at(StateId state, Symbol read) const;
  bool defined(int state, Symbol read) const { return entry(state, read).defined(); }
  void set(StateId state, Symbol read, const Transition& t);
  void clear(StateId state, Symbol read);

  const PackedEntry& entry(int state, Symbol read) const {
    return entries_[static_cast<std::size_t>(state * n_symbols_ + read)];
  }

  // Number of defined entries.
  int defined_count() const;
  // True when every (state, symbol) pair has an entry.
  bool is_complete() const { return defined_count() == n_states_ * n_symbols_; }
  // States with at least one defined transition.
  int partially_defined_states() const;
  bool state_fully_defined(int state) const;
  // One more than the largest symbol read or written by a defined entry.
  int symbols_in_use() const;

  bool operator==(const TransitionTable& other) const;

 private:
  int n_states_;
  int n_symbols_;
  std::array<PackedEntry, kMaxStates * kMaxSymbols> entries_{};
};

TransitionTable parse_machine(std::string_view text);
std::string format_machine(const TransitionTable& table);

// Swaps every Left and Right.
TransitionTable mirror(const TransitionTable& table);

// Relabels states: state i becomes new_index[i]. new_index must be a
// bijection on [0, n) with new_index[0] == 0.
TransitionTable permute_states(const TransitionTable& table, const std::vector<int>& new_index);

// (2 * m * (n + 1))^(n * m): every (state, symbol) pair picks a write symbol,
// a direction and one of n states or halt. For m = 2 this is (4n + 4)^(2n);
// the general-m form extends the same counting argument.
boost::multiprecision::cpp_int count_raw_machines(int n_states, int n_symbols);

}  // namespace castor
