#include "castor/enumerator.hpp"

#include <algorithm>
#include <array>

#include "castor/simulator.hpp"

namespace castor {

std::string to_string(EnumerationMode mode) {
  return mode == EnumerationMode::Default ? "default" : "paper-pruning";
}

std::optional<EnumerationMode> parse_mode(std::string_view text) {
  if (text == "default") return EnumerationMode::Default;
  if (text == "paper-pruning") return EnumerationMode::PaperPruning;
  return std::nullopt;
}

PartialMachine PartialMachine::from_table(const TransitionTable& table) {
  PartialMachine pm{table, 1, 1};
  for (int s = 0; s < table.n_states(); ++s) {
    for (int r = 0; r < table.n_symbols(); ++r) {
      const PackedEntry& e = table.entry(s, static_cast<Symbol>(r));
      if (!e.defined()) continue;
      pm.used_states = std::max(pm.used_states, s + 1);
      if (!e.halts()) pm.used_states = std::max(pm.used_states, e.next + 1);
      pm.used_symbols = std::max(pm.used_symbols, e.write + 1);
    }
  }
  return pm;
}

std::vector<PartialMachine> root_machines(int n_states, int n_symbols, EnumerationMode mode) {
  std::vector<PartialMachine> roots;
  const StateId next = n_states == 1 ? StateId::halt() : StateId(1);
  for (Symbol w = 0; w <= 1; ++w) {
    if (mode == EnumerationMode::PaperPruning && w == 0) continue;
    PartialMachine pm{TransitionTable(n_states, n_symbols), n_states == 1 ? 1 : 2, w + 1};
    pm.table.set(StateId(0), kBlank, Transition{w, Move::Right, next});
    roots.push_back(pm);
  }
  return roots;
}

std::optional<std::pair<StateId, StateId>> equivalent_states(const TransitionTable& table) {
  const int n = table.n_states();
  const int m = table.n_symbols();
  std::array<bool, kMaxStates> full{};
  int full_count = 0;
  for (int s = 0; s < n; ++s) {
    full[static_cast<std::size_t>(s)] = table.state_fully_defined(s);
    full_count += full[static_cast<std::size_t>(s)] ? 1 : 0;
  }
  if (full_count < 2) return std::nullopt;

  // Equivalent states write and move alike on every symbol; most tables have
  // no such pair, which settles them without refinement.
  bool candidates = false;
  for (int p = 0; p < n && !candidates; ++p) {
    if (!full[static_cast<std::size_t>(p)]) continue;
    for (int q = p + 1; q < n && !candidates; ++q) {
      if (!full[static_cast<std::size_t>(q)]) continue;
      bool alike = true;
      for (int r = 0; r < m && alike; ++r) {
        const PackedEntry& a = table.entry(p, static_cast<Symbol>(r));
        const PackedEntry& b = table.entry(q, static_cast<Symbol>(r));
        alike = a.write == b.write && a.move == b.move && a.halts() == b.halts();
      }
      candidates = alike;
    }
  }
  if (!candidates) return std::nullopt;

  // Partition refinement. Class ids: fully defined states start together;
  // every other state and halt (id n) stay in singleton classes.
  std::array<int, kMaxStates + 1> cls{};
  for (int s = 0; s <= n; ++s) cls[static_cast<std::size_t>(s)] = (s < n && full[s]) ? 0 : s + 1;

  auto target_class = [&](const PackedEntry& e) {
    return cls[static_cast<std::size_t>(e.halts() ? n : e.next)];
  };
  using Signature = std::array<int, 1 + 3 * kMaxSymbols>;
  std::array<Signature, kMaxStates> sig;
  const auto sig_len = static_cast<std::size_t>(1 + 3 * m);

  int class_count = 0;
  while (true) {
    for (int s = 0; s < n; ++s) {
      if (!full[static_cast<std::size_t>(s)]) continue;
      Signature& g = sig[static_cast<std::size_t>(s)];
      g[0] = cls[static_cast<std::size_t>(s)];
      for (int r = 0; r < m; ++r) {
        const PackedEntry& e = table.entry(s, static_cast<Symbol>(r));
        g[static_cast<std::size_t>(1 + 3 * r)] = e.write;
        g[static_cast<std::size_t>(2 + 3 * r)] = e.move;
        g[static_cast<std::size_t>(3 + 3 * r)] = target_class(e);
      }
    }
    // New ids: the first state with a given signature names the class.
    std::array<int, kMaxStates + 1> next_cls = cls;
    int count = 0;
    for (int s = 0; s < n; ++s) {
      if (!full[static_cast<std::size_t>(s)]) continue;
      const Signature& g = sig[static_cast<std::size_t>(s)];
      int id = -1;
      for (int t = 0; t < s && id < 0; ++t) {
        if (full[static_cast<std::size_t>(t)] &&
            std::equal(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(sig_len),
                       sig[static_cast<std::size_t>(t)].begin())) {
          id = next_cls[static_cast<std::size_t>(t)];
        }
      }
      if (id < 0) id = n + 2 + count++;
      next_cls[static_cast<std::size_t>(s)] = id;
    }
    cls = next_cls;
    if (count == class_count) break;
    class_count = count;
  }

  for (int p = 0; p < n; ++p) {
    if (!full[static_cast<std::size_t>(p)]) continue;
    for (int q = p + 1; q < n; ++q) {
      if (full[static_cast<std::size_t>(q)] &&
          cls[static_cast<std::size_t>(p)] == cls[static_cast<std::size_t>(q)]) {
        return std::pair{StateId(p), StateId(q)};
      }
    }
  }
  return std::nullopt;
}

namespace {

// Calls f(write, move, next) for every legal transition at this point, in
// traversal order.
template <class F>
void for_each_transition(const PartialMachine& pm, F&& f) {
  const int n = pm.table.n_states();
  const int m = pm.table.n_symbols();
  const int top_write = std::min(pm.used_symbols, m - 1);
  const int top_state = std::min(pm.used_states, n - 1);
  for (int w = 0; w <= top_write; ++w) {
    for (Move move : {Move::Right, Move::Left}) {
      for (int t = 0; t <= top_state; ++t) f(static_cast<Symbol>(w), move, StateId(t));
      f(static_cast<Symbol>(w), move, StateId::halt());
    }
  }
}

void define(PartialMachine& pm, StateId state, Symbol read, const Transition& t) {
  pm.table.set(state, read, t);
  if (!t.next.is_halt()) pm.used_states = std::max(pm.used_states, t.next.index() + 1);
  pm.used_symbols = std::max(pm.used_symbols, t.write + 1);
}

}  // namespace

std::vector<EnumerationNode> expand(const EnumerationNode& node, StateId pending_state,
                                    Symbol pending_read) {
  if (node.machine.table.defined(pending_state.index(), pending_read)) {
    throw std::invalid_argument("pending pair is already defined");
  }
  if (node.config.state != pending_state || node.config.tape.read(node.config.head) != pending_read) {
    throw std::invalid_argument("pending pair does not match the resume configuration");
  }
  std::vector<EnumerationNode> children;
  for_each_transition(node.machine, [&](Symbol w, Move move, StateId next) {
    EnumerationNode child = node;
    define(child.machine, pending_state, pending_read, Transition{w, move, next});
    step(child.config, child.machine.table);
    children.push_back(std::move(child));
  });
  return children;
}

EnumerationNode replay_node(const TransitionTable& table, std::uint64_t steps) {
  EnumerationNode node{PartialMachine::from_table(table), Configuration{}};
  const StepStatus status = run(node.config, table, steps);
  if (status != StepStatus::Running || node.config.steps != steps) {
    throw std::invalid_argument("machine does not run " + std::to_string(steps) +
                                " steps from the blank tape");
  }
  return node;
}

Enumerator::Enumerator(int n_states, int n_symbols, DeciderLimits limits, EnumerationMode mode)
    : n_states_(n_states),
      n_symbols_(n_symbols),
      limits_(std::move(limits)),
      mode_(mode),
      frames_(static_cast<std::size_t>(n_states * n_symbols + 2)) {
  if (n_states < 1 || n_symbols < 2) throw std::invalid_argument("invalid machine class");
  limits_.validate();
}

std::vector<EnumerationNode> Enumerator::roots() const {
  std::vector<EnumerationNode> out;
  for (PartialMachine& pm : root_machines(n_states_, n_symbols_, mode_)) {
    out.push_back({std::move(pm), Configuration{}});
  }
  return out;
}

bool Enumerator::advance(EnumerationNode& node, const LeafSink& sink) {
  ++stats_.nodes;
  const TransitionTable& table = node.machine.table;
  if (!halt_reachability(table, node.config.state)) {
    sink(table, Decision::non_halting(Reason::HaltUnreachable));
    return false;
  }
  using Event = RunOutcome::Event;
  const RunOutcome outcome = run_checked(node.config, table, limits_);
  switch (outcome.event) {
    case Event::Undefined: return true;
    case Event::Halted:
      sink(table, Decision::halts(node.config.tape.blank(), node.config.steps));
      return false;
    case Event::Cycler: sink(table, Decision::non_halting(Reason::CyclerRepeat)); return false;
    case Event::Escape: sink(table, Decision::non_halting(Reason::EscapeHeuristic)); return false;
    case Event::KnownBound:
      sink(table, Decision::non_halting(Reason::KnownBoundExceeded));
      return false;
    case Event::Cap: break;
  }
  if (limits_.backward_depth > 0 &&
      backward_reasoning(table, limits_.backward_depth, BackwardTarget::AnyHalt,
                         limits_.backward_nodes)) {
    sink(table, Decision::non_halting(Reason::BackwardContradiction));
  } else {
    sink(table, Decision::unknown(limits_.max_steps));
  }
  return false;
}

template <class Visit>
void Enumerator::for_each_child(std::size_t depth, const LeafSink& sink, Visit&& visit) {
  const EnumerationNode& node = frames_[depth];
  const StateId state = node.config.state;
  const Symbol read = node.config.tape.read(node.config.head);
  const std::int64_t nonblank_rest = node.config.tape.nonblank_count() - (read != kBlank ? 1 : 0);

  for_each_transition(node.machine, [&](Symbol w, Move move, StateId next) {
    const Transition t{w, move, next};
    if (next.is_halt()) {
      // Halting children are leaves: no need to copy the configuration.
      TransitionTable leaf = node.machine.table;
      leaf.set(state, read, t);
      sink(leaf, Decision::halts(nonblank_rest == 0 && w == kBlank, node.config.steps + 1));
      return;
    }
    EnumerationNode& child = frames_[depth + 1];
    child.machine = node.machine;
    define(child.machine, state, read, t);
    if (child.machine.table.state_fully_defined(state.index()) &&
        equivalent_states(child.machine.table)) {
      ++stats_.pruned_equivalent;
      return;
    }
    child.config = node.config;
    step(child.config, child.machine.table);
    visit();
  });
}

void Enumerator::explore_at(std::size_t depth, const LeafSink& sink) {
  if (!advance(frames_[depth], sink)) return;
  for_each_child(depth, sink, [&] { explore_at(depth + 1, sink); });
}

void Enumerator::explore(const EnumerationNode& node, const LeafSink& sink) {
  frames_[0] = node;
  explore_at(0, sink);
}

std::vector<EnumerationNode> Enumerator::split(const EnumerationNode& node, const LeafSink& sink) {
  frames_[0] = node;
  std::vector<EnumerationNode> out;
  if (!advance(frames_[0], sink)) return out;
  for_each_child(0, sink, [&] { out.push_back(frames_[1]); });
  return out;
}

EnumerationStats enumerate(int n_states, int n_symbols, const DeciderLimits& limits,
                           const LeafSink& sink, EnumerationMode mode) {
  Enumerator e(n_states, n_symbols, limits, mode);
  for (const EnumerationNode& root : e.roots()) e.explore(root, sink);
  return e.stats();
}

}  // namespace castor
