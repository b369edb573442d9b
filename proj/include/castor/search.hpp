// Whole-class searches: enumeration plus deciding, champion tracking,
// verdict statistics, parallel execution over enumeration subtrees and
// checkpoint/resume.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "castor/deciders.hpp"
#include "castor/enumerator.hpp"
#include "json.hpp"

namespace castor {

struct SearchConfig {
  int n_states = 2;
  int n_symbols = 2;
  DeciderLimits limits;
  EnumerationMode mode = EnumerationMode::Default;
  // Only exhaustively justified deciders may prune: disables the escape rule.
  bool strict = false;
  int workers = 1;
  // Written while the search runs; an existing file is resumed from.
  std::optional<std::string> checkpoint_path;
  double checkpoint_interval_seconds = 30.0;
  // Stop after this many frontier subtrees (for interrupted runs).
  std::optional<std::size_t> stop_after;
  // One "machine TAB verdict TAB steps-or-reason" line per emitted machine.
  std::ostream* records = nullptr;

  void validate() const;
  DeciderLimits effective_limits() const;
};

// The parts of a configuration that determine a report's contents.
struct ConfigEcho {
  int n_states = 0;
  int n_symbols = 0;
  std::uint64_t max_steps = 0;
  int backward_depth = 0;
  std::size_t backward_nodes = 0;
  std::size_t cycler_memory = 0;
  bool escape_enabled = false;
  KnownBounds known_bounds;
  EnumerationMode mode = EnumerationMode::Default;
  bool strict = false;

  static ConfigEcho of(const SearchConfig& config);
  bool operator==(const ConfigEcho&) const = default;
};

struct ChampionRecord {
  std::string machine;
  std::uint64_t steps = 0;
  bool proven = false;

  bool operator==(const ChampionRecord&) const = default;
};

class ConfigMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SearchReport {
  static constexpr std::size_t kUnknownListCap = 10'000;

  ConfigEcho config;
  std::optional<ChampionRecord> champion;
  // Keyed like "halts-blank", "non-halting cycler-repeat", "unknown".
  std::map<std::string, std::uint64_t> counts;
  // Lexicographically smallest unknown machines, at most kUnknownListCap.
  std::vector<std::string> unknowns;
  std::uint64_t unknown_total = 0;
  std::uint64_t nodes = 0;
  std::uint64_t pruned_equivalent = 0;
  // False for a search stopped before walking the whole tree.
  bool complete = true;
  double wall_seconds = 0.0;

  explicit SearchReport(ConfigEcho echo = {}) : config(std::move(echo)) {}

  void record(const TransitionTable& machine, const Decision& decision);
  std::uint64_t emitted() const;
  // Strict, default mode, complete, and no Unknown verdicts.
  bool proven() const;
  // Sorts and trims the unknown list and refreshes the champion's proven flag.
  void normalize();

  // Everything except wall time.
  bool same_results(const SearchReport& other) const;
};

// Counts added, champion by (steps, then smaller machine string), unknown
// lists united. Associative and commutative; SearchReport(config) is the
// identity. Throws ConfigMismatchError for different configurations.
SearchReport merge_reports(const SearchReport& a, const SearchReport& b);

nlohmann::json to_json(const ConfigEcho& echo);
ConfigEcho config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SearchReport& report, bool include_runtime = true);
SearchReport report_from_json(const nlohmann::json& j);
std::string summary_text(const SearchReport& report);

// "machine TAB verdict TAB steps-or-reason".
std::string record_line(const TransitionTable& machine, const Decision& decision);

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  ConfigEcho config;
  // Unexplored subtree roots in traversal order: machine and resume step.
  std::vector<std::pair<std::string, std::uint64_t>> frontier;
  // Everything already explored.
  SearchReport partial;
};

void write_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::string& path);

// Parallel search over a frontier of enumeration subtrees.
SearchReport run_search(const SearchConfig& config);

// Single-threaded depth-first reference; ignores checkpoint settings.
SearchReport run_search_serial(const SearchConfig& config);

// One grid cell per report, keyed by (states, symbols).
struct TableDocument {
  struct Cell {
    std::uint64_t steps = 0;
    bool has_champion = false;
    bool proven = false;
  };
  std::map<std::pair<int, int>, Cell> cells;

  bool empty() const { return cells.empty(); }
};

TableDocument emit_table(const std::vector<SearchReport>& reports);
// Symbols down, states across; proven cells carry a trailing '*', cells
// without a report or without a champion show "—".
std::string render_plain(const TableDocument& table);
// "states TAB symbols TAB steps TAB proven|candidate" lines.
std::string render_records(const TableDocument& table);

}  // namespace castor
