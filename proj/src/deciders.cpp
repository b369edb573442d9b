#include "castor/deciders.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>

#include "castor/simulator.hpp"

namespace castor {

std::string to_string(Reason reason) {
  switch (reason) {
    case Reason::BackwardContradiction: return "backward-contradiction";
    case Reason::HaltUnreachable: return "halt-unreachable";
    case Reason::CyclerRepeat: return "cycler-repeat";
    case Reason::EscapeHeuristic: return "escape-heuristic";
    case Reason::KnownBoundExceeded: return "known-bound-exceeded";
  }
  return "?";
}

std::optional<Reason> parse_reason(std::string_view text) {
  for (Reason r : {Reason::BackwardContradiction, Reason::HaltUnreachable, Reason::CyclerRepeat,
                   Reason::EscapeHeuristic, Reason::KnownBoundExceeded}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

bool Decision::operator==(const Decision& other) const {
  if (verdict != other.verdict) return false;
  if (has_reason()) return reason == other.reason;
  return steps == other.steps;
}

std::string to_string(Decision::Verdict verdict) {
  switch (verdict) {
    case Decision::Verdict::HaltsBlank: return "halts-blank";
    case Decision::Verdict::HaltsDirty: return "halts-dirty";
    case Decision::Verdict::NonHalting: return "non-halting";
    case Decision::Verdict::NoBlankHalt: return "no-blank-halt";
    case Decision::Verdict::Unknown: return "unknown";
  }
  return "?";
}

std::string to_string(const Decision& decision) {
  std::string out = to_string(decision.verdict) + " ";
  if (decision.has_reason()) return out + to_string(decision.reason);
  return out + std::to_string(decision.steps);
}

// ---------------------------------------------------------------------------
// Known bounds

KnownBounds KnownBounds::defaults() {
  KnownBounds b;
  b.add(4, 2, 107);
  b.add(5, 2, 47'176'870);
  return b;
}

KnownBounds KnownBounds::parse(std::string_view text) {
  KnownBounds b;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long states = 0, symbols = 0, steps = 0;
    if (!(fields >> states)) continue;  // blank line
    std::string rest;
    if (!(fields >> symbols >> steps) || (fields >> rest) || states < 1 || symbols < 2 ||
        steps < 0) {
      throw ParseError("known bounds line " + std::to_string(line_no) +
                       ": expected 'states symbols max_steps'");
    }
    b.add(static_cast<int>(states), static_cast<int>(symbols), static_cast<std::uint64_t>(steps));
  }
  return b;
}

KnownBounds KnownBounds::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open known bounds file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

void KnownBounds::add(int states, int symbols, std::uint64_t max_steps) {
  entries_[{states, symbols}] = max_steps;
}

std::optional<std::uint64_t> KnownBounds::bound_for(int states, int symbols) const {
  std::optional<std::uint64_t> best;
  for (const auto& [key, value] : entries_) {
    if (key.first >= states && key.second >= symbols && (!best || value < *best)) best = value;
  }
  return best;
}

std::string KnownBounds::to_text() const {
  std::string out;
  for (const auto& [key, value] : entries_) {
    out += std::to_string(key.first) + " " + std::to_string(key.second) + " " +
           std::to_string(value) + "\n";
  }
  return out;
}

void DeciderLimits::validate() const {
  if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  if (backward_depth < 0) throw std::invalid_argument("backward_depth must be non-negative");
}

// ---------------------------------------------------------------------------
// Static checks

bool halt_reachability(const TransitionTable& machine, StateId from) {
  if (from.is_halt()) return true;
  std::array<bool, kMaxStates> seen{};
  std::array<int, kMaxStates> stack{};
  std::size_t top = 0;
  stack[top++] = from.index();
  seen[static_cast<std::size_t>(from.index())] = true;
  while (top > 0) {
    const int s = stack[--top];
    for (int r = 0; r < machine.n_symbols(); ++r) {
      const PackedEntry& e = machine.entry(s, static_cast<Symbol>(r));
      if (!e.defined() || e.halts()) return true;
      if (!seen[e.next]) {
        seen[e.next] = true;
        stack[top++] = e.next;
      }
    }
  }
  return false;
}

bool blank_halt_feasible(const TransitionTable& machine) {
  for (int s = 0; s < machine.n_states(); ++s) {
    for (int r = 0; r < machine.n_symbols(); ++r) {
      const PackedEntry& e = machine.entry(s, static_cast<Symbol>(r));
      if (!e.defined() || (e.halts() && e.write == kBlank)) return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Backward reasoning

namespace {

constexpr std::int8_t kUnknownCell = -1;

struct Incoming {
  int state;
  Symbol read;
  Symbol write;
  int move;
};

class BackwardSearch {
 public:
  BackwardSearch(const TransitionTable& machine, int limit, BackwardTarget target,
                 std::size_t budget)
      : machine_(machine),
        limit_(limit),
        target_(target),
        budget_(budget),
        width_(2 * limit + 5),
        center_(limit + 2),
        incoming_(static_cast<std::size_t>(machine.n_states())) {
    for (int p = 0; p < machine.n_states(); ++p) {
      for (int r = 0; r < machine.n_symbols(); ++r) {
        const PackedEntry& e = machine.entry(p, static_cast<Symbol>(r));
        if (e.defined() && !e.halts()) {
          incoming_[e.next].push_back({p, static_cast<Symbol>(r), e.write, e.move});
        } else if (!e.defined() && target == BackwardTarget::BlankHalt) {
          // An undefined entry may later become any transition.
          wildcards_.push_back({p, static_cast<Symbol>(r)});
        }
      }
    }
  }

  std::optional<BackwardProof> run() {
    proof_.target = target_;
    for (int q = 0; q < machine_.n_states(); ++q) {
      for (int s = 0; s < machine_.n_symbols(); ++s) {
        const PackedEntry& e = machine_.entry(q, static_cast<Symbol>(s));
        const bool halting = !e.defined() || e.halts();
        if (!halting) continue;
        if (target_ == BackwardTarget::BlankHalt && e.defined() && e.write != kBlank) {
          proof_.blocked_roots.push_back({q, static_cast<Symbol>(s)});
          continue;
        }
        cells_.assign(static_cast<std::size_t>(width_),
                      target_ == BackwardTarget::BlankHalt ? std::int8_t{0} : kUnknownCell);
        cells_[static_cast<std::size_t>(center_)] = static_cast<std::int8_t>(s);
        BackwardProof::Node root;
        root.state = q;
        root.read = static_cast<Symbol>(s);
        proof_.nodes.push_back(root);
        if (!expand(static_cast<int>(proof_.nodes.size()) - 1, q, center_, 1)) return std::nullopt;
      }
    }
    return std::move(proof_);
  }

 private:
  bool start_compatible(int state) const {
    if (state != 0) return false;
    return std::all_of(cells_.begin(), cells_.end(),
                       [](std::int8_t c) { return c == 0 || c == kUnknownCell; });
  }

  bool expand(int node, int state, int head, int depth) {
    if (++visited_ > budget_) return false;
    if (start_compatible(state)) return false;
    proof_.max_depth = std::max(proof_.max_depth, depth);

    struct Candidate {
      int state;
      Symbol read;
      int move;
      bool wildcard;
    };
    std::vector<Candidate> viable;
    for (const Incoming& in : incoming_[static_cast<std::size_t>(state)]) {
      const std::int8_t cur = cells_[static_cast<std::size_t>(head - in.move)];
      if (cur == kUnknownCell || cur == static_cast<std::int8_t>(in.write)) {
        viable.push_back({in.state, in.read, in.move, false});
      } else {
        proof_.nodes[static_cast<std::size_t>(node)].blocked.push_back(
            {in.state, in.read, in.write, static_cast<Symbol>(cur)});
      }
    }
    for (const auto& [p, r] : wildcards_) {
      viable.push_back({p, r, 1, true});
      viable.push_back({p, r, -1, true});
    }
    if (viable.empty()) return true;
    if (depth >= limit_) return false;

    for (const Candidate& c : viable) {
      const int pos = head - c.move;
      BackwardProof::Node child;
      child.parent = node;
      child.depth = depth + 1;
      child.state = c.state;
      child.read = c.read;
      child.move = static_cast<Move>(c.move);
      child.wildcard = c.wildcard;
      proof_.nodes.push_back(child);
      const std::int8_t saved = cells_[static_cast<std::size_t>(pos)];
      cells_[static_cast<std::size_t>(pos)] = static_cast<std::int8_t>(c.read);
      const bool dead = expand(static_cast<int>(proof_.nodes.size()) - 1, c.state, pos, depth + 1);
      cells_[static_cast<std::size_t>(pos)] = saved;
      if (!dead) return false;
    }
    return true;
  }

  const TransitionTable& machine_;
  int limit_;
  BackwardTarget target_;
  std::size_t budget_;
  int width_;
  int center_;
  std::vector<std::vector<Incoming>> incoming_;
  std::vector<std::pair<int, Symbol>> wildcards_;
  std::vector<std::int8_t> cells_;
  std::size_t visited_ = 0;
  BackwardProof proof_;
};

}  // namespace

std::optional<BackwardProof> backward_reasoning(const TransitionTable& machine, int depth,
                                                BackwardTarget target, std::size_t node_budget) {
  if (depth < 1) throw std::invalid_argument("backward reasoning depth must be at least 1");
  return BackwardSearch(machine, depth, target, node_budget).run();
}

bool check_backward_proof(const TransitionTable& machine, const BackwardProof& proof) {
  const bool blank_target = proof.target == BackwardTarget::BlankHalt;
  const auto& nodes = proof.nodes;

  // Roots and blocked roots must partition the halting pairs.
  std::vector<std::pair<int, Symbol>> expected_roots, expected_blocked, roots;
  for (int q = 0; q < machine.n_states(); ++q) {
    for (int s = 0; s < machine.n_symbols(); ++s) {
      const PackedEntry& e = machine.entry(q, static_cast<Symbol>(s));
      if (e.defined() && !e.halts()) continue;
      if (blank_target && e.defined() && e.write != kBlank) {
        expected_blocked.push_back({q, static_cast<Symbol>(s)});
      } else {
        expected_roots.push_back({q, static_cast<Symbol>(s)});
      }
    }
  }
  for (const auto& n : nodes) {
    if (n.parent < 0) roots.push_back({n.state, n.read});
  }
  auto sorted = [](auto v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  if (sorted(roots) != expected_roots || sorted(proof.blocked_roots) != expected_blocked) {
    return false;
  }

  std::vector<std::vector<int>> children(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const int parent = nodes[i].parent;
    if (parent >= static_cast<int>(i)) return false;
    if (parent >= 0) children[static_cast<std::size_t>(parent)].push_back(static_cast<int>(i));
  }

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    // Rebuild this node's configuration from its root.
    std::vector<std::size_t> path;
    for (int k = static_cast<int>(i); k >= 0; k = nodes[static_cast<std::size_t>(k)].parent) {
      path.push_back(static_cast<std::size_t>(k));
    }
    std::map<std::int64_t, Symbol> cells;
    std::int64_t head = 0;
    int state = 0;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      const auto& n = nodes[*it];
      if (n.parent >= 0) {
        if (!n.wildcard) {
          const PackedEntry& e = machine.entry(n.state, n.read);
          if (!e.defined() || e.halts() || e.next != state || e.move != static_cast<int>(n.move)) {
            return false;
          }
          auto known = cells.find(head - e.move);
          if (known != cells.end() && known->second != e.write) return false;
          if (known == cells.end() && blank_target && e.write != kBlank) return false;
        } else if (machine.defined(n.state, n.read)) {
          return false;
        }
        head -= static_cast<int>(n.move);
      }
      cells[head] = n.read;
      state = n.state;
    }
    auto cell_at = [&](std::int64_t pos) -> std::optional<Symbol> {
      auto it = cells.find(pos);
      if (it != cells.end()) return it->second;
      if (blank_target) return kBlank;
      return std::nullopt;
    };

    // A node compatible with the start configuration would be a real run.
    if (state == 0 && std::all_of(cells.begin(), cells.end(),
                                  [](const auto& kv) { return kv.second == kBlank; })) {
      return false;
    }

    // Every transition into this state must be a child or a justified block.
    std::vector<std::tuple<int, Symbol, int>> accounted;
    for (int c : children[i]) {
      const auto& n = nodes[static_cast<std::size_t>(c)];
      accounted.emplace_back(n.state, n.read, static_cast<int>(n.move));
    }
    for (const auto& b : nodes[i].blocked) {
      const PackedEntry& e = machine.entry(b.state, b.read);
      if (!e.defined() || e.halts() || e.next != state || e.write != b.required) return false;
      const auto found = cell_at(head - e.move);
      if (!found || *found != b.found || b.found == b.required) return false;
      accounted.emplace_back(b.state, b.read, static_cast<int>(e.move));
    }
    std::vector<std::tuple<int, Symbol, int>> expected;
    for (int p = 0; p < machine.n_states(); ++p) {
      for (int r = 0; r < machine.n_symbols(); ++r) {
        const PackedEntry& e = machine.entry(p, static_cast<Symbol>(r));
        if (e.defined() && !e.halts() && e.next == state) {
          expected.emplace_back(p, static_cast<Symbol>(r), e.move);
        } else if (!e.defined() && blank_target) {
          expected.emplace_back(p, static_cast<Symbol>(r), 1);
          expected.emplace_back(p, static_cast<Symbol>(r), -1);
        }
      }
    }
    if (sorted(accounted) != sorted(expected)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Cycler

std::uint64_t cell_hash(std::int64_t pos, Symbol value) {
  if (value == kBlank) return 0;
  // splitmix64 finaliser
  std::uint64_t z = static_cast<std::uint64_t>(pos) * 16 + value + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t tape_hash(const Tape& tape) {
  std::uint64_t h = 0;
  for (std::int64_t p = tape.leftmost(); p <= tape.rightmost(); ++p) h += cell_hash(p, tape.read(p));
  return h;
}

void CyclerDetector::take(const Configuration& config, std::uint64_t hash) {
  const auto window = static_cast<std::size_t>(config.tape.rightmost() - config.tape.leftmost() + 1);
  if (has_snapshot_ && window > budget_) return;
  snapshot_ = config;
  snapshot_hash_ = hash;
  has_snapshot_ = true;
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> CyclerDetector::observe(
    const Configuration& config, std::uint64_t hash) {
  if (!has_snapshot_) {
    take(config, hash);
    return std::nullopt;
  }
  if (config.state == snapshot_.state && config.head == snapshot_.head && hash == snapshot_hash_ &&
      config.steps != snapshot_.steps && config.tape.same_contents(snapshot_.tape)) {
    return std::pair{snapshot_.steps, config.steps};
  }
  if (config.steps >= snapshot_.steps + interval_) {
    take(config, hash);
    interval_ *= 2;
  }
  return std::nullopt;
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> cycler_check(
    std::span<const Configuration> trace, std::size_t budget_cells) {
  CyclerDetector detector(budget_cells);
  for (const Configuration& c : trace) {
    if (auto hit = detector.observe(c)) return hit;
  }
  return std::nullopt;
}

std::optional<Decision> known_bound_cutoff(const TransitionTable& machine, std::uint64_t steps,
                                           const DeciderLimits& limits) {
  const auto bound =
      limits.known_bounds.bound_for(machine.partially_defined_states(), machine.symbols_in_use());
  if (bound && steps > *bound) return Decision::non_halting(Reason::KnownBoundExceeded);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Checked simulation

RunOutcome run_checked(Configuration& config, const TransitionTable& machine,
                       const DeciderLimits& limits) {
  using Event = RunOutcome::Event;
  const auto bound =
      limits.known_bounds.bound_for(machine.partially_defined_states(), machine.symbols_in_use());
  const std::uint64_t bound_steps = bound ? *bound : ~std::uint64_t{0};
  const std::uint64_t cap = limits.max_steps;
  const bool escape = limits.escape_enabled;
  const int m = machine.n_symbols();
  const PackedEntry* table = &machine.entry(0, 0);

  CyclerDetector cycler(limits.cycler_memory);
  std::uint64_t hash = tape_hash(config.tape);
  cycler.observe(config, hash);

  // Hot loop on local copies; config is brought up to date before anything
  // outside the loop looks at it.
  Tape& tape = config.tape;
  Symbol* cells = tape.raw();
  std::int64_t origin = tape.raw_origin();
  std::int64_t size = tape.raw_size();
  std::int64_t lo = tape.leftmost();
  std::int64_t hi = tape.rightmost();
  std::int64_t nonblank = tape.nonblank_count();
  std::int64_t head = config.head;
  int state = config.state.is_halt() ? 0 : config.state.index();
  std::uint64_t steps = config.steps;

  // Symbol stores may alias anything, so the cycler's fields are mirrored in
  // locals rather than re-read after every write.
  int snap_state = 0;
  std::int64_t snap_head = 0;
  std::uint64_t snap_hash = 0;
  std::uint64_t snap_due = 0;
  auto reload_snapshot = [&] {
    snap_state = cycler.snapshot_state().is_halt() ? -1 : cycler.snapshot_state().index();
    snap_head = cycler.snapshot_head();
    snap_hash = cycler.snapshot_hash();
    snap_due = cycler.next_due();
  };
  reload_snapshot();

  auto sync = [&] {
    tape.sync(lo, hi, nonblank);
    config.head = head;
    config.state = StateId(state);
    config.steps = steps;
  };

  while (steps < cap) {
    Symbol* cell = cells + (head + origin);
    const Symbol read = *cell;
    const PackedEntry e = table[state * m + read];
    if (!e.defined()) {
      sync();
      return {Event::Undefined, std::nullopt};
    }
    if (e.write != read) {
      hash += cell_hash(head, e.write) - cell_hash(head, read);
      nonblank += (e.write != kBlank) - (read != kBlank);
      *cell = e.write;
    }
    head += e.move;
    ++steps;
    if (head < lo || head > hi) {
      lo = std::min(lo, head);
      hi = std::max(hi, head);
      if (head + origin < 0 || head + origin >= size) {
        tape.ensure_capacity(head);
        cells = tape.raw();
        origin = tape.raw_origin();
        size = tape.raw_size();
      }
    }
    if (e.halts()) {
      sync();
      config.state = StateId::halt();
      return {Event::Halted, std::nullopt};
    }
    state = e.next;

    if (steps > bound_steps) {
      sync();
      return {Event::KnownBound, std::nullopt};
    }
    if (escape && steps >= 2 && 2 * static_cast<std::uint64_t>(head < 0 ? -head : head) > steps) {
      sync();
      return {Event::Escape, std::nullopt};
    }
    if ((hash == snap_hash && head == snap_head && state == snap_state) || steps >= snap_due) {
      sync();
      if (auto hit = cycler.observe(config, hash)) return {Event::Cycler, hit};
      reload_snapshot();
    }
  }
  sync();
  return {Event::Cap, std::nullopt};
}

Decision decide(const TransitionTable& machine, const DeciderLimits& limits) {
  limits.validate();
  if (!halt_reachability(machine)) return Decision::non_halting(Reason::HaltUnreachable);
  if (!blank_halt_feasible(machine)) return Decision::no_blank_halt(Reason::BackwardContradiction);
  if (limits.backward_depth > 0 &&
      backward_reasoning(machine, limits.backward_depth, BackwardTarget::BlankHalt,
                         limits.backward_nodes)) {
    return Decision::no_blank_halt(Reason::BackwardContradiction);
  }

  Configuration config;
  const RunOutcome outcome = run_checked(config, machine, limits);
  using Event = RunOutcome::Event;
  switch (outcome.event) {
    case Event::Halted: return Decision::halts(config.tape.blank(), config.steps);
    case Event::Undefined: return Decision::unknown(config.steps);
    case Event::Cycler: return Decision::non_halting(Reason::CyclerRepeat);
    case Event::Escape: return Decision::non_halting(Reason::EscapeHeuristic);
    case Event::KnownBound: return Decision::non_halting(Reason::KnownBoundExceeded);
    case Event::Cap: break;
  }
  if (limits.backward_depth > 0 &&
      backward_reasoning(machine, limits.backward_depth, BackwardTarget::AnyHalt,
                         limits.backward_nodes)) {
    return Decision::non_halting(Reason::BackwardContradiction);
  }
  return Decision::unknown(limits.max_steps);
}

}  // namespace castor
