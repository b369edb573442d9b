#include "castor/machine.hpp"

#include <algorithm>

namespace castor {

namespace {

void check_dimensions(int n_states, int n_symbols) {
  if (n_states < 1 || n_states > kMaxStates) {
    throw std::invalid_argument("state count must be in [1, " + std::to_string(kMaxStates) + "]");
  }
  if (n_symbols < 2 || n_symbols > kMaxSymbols) {
    throw std::invalid_argument("symbol count must be in [2, " + std::to_string(kMaxSymbols) +
                                "]");
  }
}

PackedEntry pack(const Transition& t) {
  PackedEntry e;
  e.write = t.write;
  e.move = static_cast<std::int8_t>(t.move);
  e.next = t.next.is_halt() ? PackedEntry::kHalt : static_cast<std::uint8_t>(t.next.index());
  return e;
}

}  // namespace

TransitionTable::TransitionTable(int n_states, int n_symbols)
    : n_states_(n_states), n_symbols_(n_symbols) {
  check_dimensions(n_states, n_symbols);
}

std::optional<Transition> TransitionTable::at(StateId state, Symbol read) const {
  const PackedEntry& e = entry(state.index(), read);
  if (!e.defined()) return std::nullopt;
  Transition t;
  t.write = e.write;
  t.move = static_cast<Move>(e.move);
  t.next = e.halts() ? StateId::halt() : StateId(e.next);
  return t;
}

void TransitionTable::set(StateId state, Symbol read, const Transition& t) {
  if (state.is_halt() || state.index() >= n_states_ || read >= n_symbols_) {
    throw std::out_of_range("transition source out of range");
  }
  if (t.write >= n_symbols_ || (!t.next.is_halt() && t.next.index() >= n_states_)) {
    throw std::out_of_range("transition target out of range");
  }
  entries_[static_cast<std::size_t>(state.index() * n_symbols_ + read)] = pack(t);
}

void TransitionTable::clear(StateId state, Symbol read) {
  entries_[static_cast<std::size_t>(state.index() * n_symbols_ + read)] = PackedEntry{};
}

int TransitionTable::defined_count() const {
  int count = 0;
  for (int i = 0; i < n_states_ * n_symbols_; ++i) count += entries_[i].defined() ? 1 : 0;
  return count;
}

int TransitionTable::partially_defined_states() const {
  int count = 0;
  for (int s = 0; s < n_states_; ++s) {
    for (int r = 0; r < n_symbols_; ++r) {
      if (entry(s, static_cast<Symbol>(r)).defined()) {
        ++count;
        break;
      }
    }
  }
  return count;
}

bool TransitionTable::state_fully_defined(int state) const {
  for (int r = 0; r < n_symbols_; ++r) {
    if (!entry(state, static_cast<Symbol>(r)).defined()) return false;
  }
  return true;
}

int TransitionTable::symbols_in_use() const {
  int top = 0;
  for (int s = 0; s < n_states_; ++s) {
    for (int r = 0; r < n_symbols_; ++r) {
      const PackedEntry& e = entry(s, static_cast<Symbol>(r));
      if (!e.defined()) continue;
      top = std::max({top, r, static_cast<int>(e.write)});
    }
  }
  return top + 1;
}

bool TransitionTable::operator==(const TransitionTable& other) const {
  if (n_states_ != other.n_states_ || n_symbols_ != other.n_symbols_) return false;
  return std::equal(entries_.begin(), entries_.begin() + n_states_ * n_symbols_,
                    other.entries_.begin());
}

TransitionTable parse_machine(std::string_view text) {
  std::vector<std::string_view> rows;
  std::size_t start = 0;
  while (true) {
    std::size_t sep = text.find('_', start);
    rows.push_back(text.substr(start, sep == std::string_view::npos ? sep : sep - start));
    if (sep == std::string_view::npos) break;
    start = sep + 1;
  }

  const std::size_t row_len = rows.front().size();
  if (row_len == 0 || row_len % 3 != 0) {
    throw ParseError("row length must be a positive multiple of 3");
  }
  const int n_symbols = static_cast<int>(row_len / 3);
  const int n_states = static_cast<int>(rows.size());
  if (n_symbols < 2 || n_symbols > kMaxSymbols) {
    throw ParseError("unsupported symbol count " + std::to_string(n_symbols));
  }
  if (n_states > kMaxStates) {
    throw ParseError("too many states");
  }

  TransitionTable table(n_states, n_symbols);
  for (int s = 0; s < n_states; ++s) {
    const std::string_view row = rows[static_cast<std::size_t>(s)];
    if (row.size() != row_len) {
      throw ParseError("inconsistent row lengths");
    }
    for (int r = 0; r < n_symbols; ++r) {
      const std::string_view triple = row.substr(static_cast<std::size_t>(r) * 3, 3);
      if (triple == "---") continue;

      const char w = triple[0], d = triple[1], nx = triple[2];
      if (w < '0' || w > '9') throw ParseError("bad write symbol in '" + std::string(triple) + "'");
      if (w - '0' >= n_symbols) {
        throw ParseError("write symbol out of range in '" + std::string(triple) + "'");
      }
      if (d != 'L' && d != 'R') {
        throw ParseError("bad direction in '" + std::string(triple) + "'");
      }
      StateId next;
      if (nx == 'Z') {
        next = StateId::halt();
      } else if (nx >= 'A' && nx < 'A' + n_states) {
        next = StateId(nx - 'A');
      } else {
        throw ParseError("bad next state in '" + std::string(triple) + "'");
      }
      table.set(StateId(s), static_cast<Symbol>(r),
                Transition{static_cast<Symbol>(w - '0'), d == 'L' ? Move::Left : Move::Right, next});
    }
  }
  return table;
}

std::string format_machine(const TransitionTable& table) {
  std::string out;
  out.reserve(static_cast<std::size_t>(table.n_states() * (table.n_symbols() * 3 + 1)));
  for (int s = 0; s < table.n_states(); ++s) {
    if (s > 0) out.push_back('_');
    for (int r = 0; r < table.n_symbols(); ++r) {
      const PackedEntry& e = table.entry(s, static_cast<Symbol>(r));
      if (!e.defined()) {
        out += "---";
        continue;
      }
      out.push_back(static_cast<char>('0' + e.write));
      out.push_back(e.move < 0 ? 'L' : 'R');
      out.push_back(e.halts() ? 'Z' : static_cast<char>('A' + e.next));
    }
  }
  return out;
}

TransitionTable mirror(const TransitionTable& table) {
  TransitionTable out(table.n_states(), table.n_symbols());
  for (int s = 0; s < table.n_states(); ++s) {
    for (int r = 0; r < table.n_symbols(); ++r) {
      if (auto t = table.at(StateId(s), static_cast<Symbol>(r))) {
        t->move = opposite(t->move);
        out.set(StateId(s), static_cast<Symbol>(r), *t);
      }
    }
  }
  return out;
}

TransitionTable permute_states(const TransitionTable& table, const std::vector<int>& new_index) {
  const int n = table.n_states();
  if (static_cast<int>(new_index.size()) != n) {
    throw std::invalid_argument("permutation size does not match state count");
  }
  if (new_index[0] != 0) {
    throw std::invalid_argument("permutation must fix the start state");
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int target : new_index) {
    if (target < 0 || target >= n || seen[static_cast<std::size_t>(target)]) {
      throw std::invalid_argument("permutation is not a bijection");
    }
    seen[static_cast<std::size_t>(target)] = true;
  }

  TransitionTable out(n, table.n_symbols());
  for (int s = 0; s < n; ++s) {
    for (int r = 0; r < table.n_symbols(); ++r) {
      if (auto t = table.at(StateId(s), static_cast<Symbol>(r))) {
        if (!t->next.is_halt()) t->next = StateId(new_index[static_cast<std::size_t>(t->next.index())]);
        out.set(StateId(new_index[static_cast<std::size_t>(s)]), static_cast<Symbol>(r), *t);
      }
    }
  }
  return out;
}

boost::multiprecision::cpp_int count_raw_machines(int n_states, int n_symbols) {
  if (n_states < 1 || n_symbols < 2) {
    throw std::invalid_argument("need at least one state and two symbols");
  }
  const boost::multiprecision::cpp_int per_pair = 2 * n_symbols * (n_states + 1);
  return boost::multiprecision::pow(per_pair, static_cast<unsigned>(n_states * n_symbols));
}

}  // namespace castor
