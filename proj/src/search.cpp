#include "castor/search.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <deque>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace castor {

using nlohmann::json;

namespace {

constexpr int kCheckpointVersion = 1;
// Subtrees handed to the workers; fixed so the traversal does not depend on
// the worker count.
constexpr std::size_t kFrontierTarget = 256;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Keys are built once; record() runs for every emitted machine.
const std::string& count_key(const Decision& d) {
  constexpr int kVerdicts = 5, kReasons = 5;
  static const auto keys = [] {
    std::array<std::string, kVerdicts * kReasons> k;
    for (int v = 0; v < kVerdicts; ++v) {
      for (int r = 0; r < kReasons; ++r) {
        const Decision d{static_cast<Decision::Verdict>(v), 0, static_cast<Reason>(r)};
        k[static_cast<std::size_t>(v * kReasons + r)] =
            to_string(d.verdict) + (d.has_reason() ? " " + to_string(d.reason) : "");
      }
    }
    return k;
  }();
  return keys[static_cast<std::size_t>(static_cast<int>(d.verdict) * kReasons + static_cast<int>(d.reason))];
}

bool better_champion(const ChampionRecord& a, const ChampionRecord& b) {
  return a.steps != b.steps ? a.steps > b.steps : a.machine < b.machine;
}

void trim_unknowns(std::vector<std::string>& list) {
  std::sort(list.begin(), list.end());
  list.erase(std::unique(list.begin(), list.end()), list.end());
  if (list.size() > SearchReport::kUnknownListCap) list.resize(SearchReport::kUnknownListCap);
}

}  // namespace

void SearchConfig::validate() const {
  if (n_states < 1 || n_states > kMaxStates) throw std::invalid_argument("states out of range");
  if (n_symbols < 2 || n_symbols > kMaxSymbols) throw std::invalid_argument("symbols out of range");
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  limits.validate();
}

DeciderLimits SearchConfig::effective_limits() const {
  DeciderLimits l = limits;
  if (strict) l.escape_enabled = false;
  return l;
}

ConfigEcho ConfigEcho::of(const SearchConfig& config) {
  const DeciderLimits l = config.effective_limits();
  ConfigEcho e;
  e.n_states = config.n_states;
  e.n_symbols = config.n_symbols;
  e.max_steps = l.max_steps;
  e.backward_depth = l.backward_depth;
  e.backward_nodes = l.backward_nodes;
  e.cycler_memory = l.cycler_memory;
  e.escape_enabled = l.escape_enabled;
  e.known_bounds = l.known_bounds;
  e.mode = config.mode;
  e.strict = config.strict;
  return e;
}

void SearchReport::record(const TransitionTable& machine, const Decision& decision) {
  ++counts[count_key(decision)];
  switch (decision.verdict) {
    case Decision::Verdict::HaltsBlank:
      if (!champion || decision.steps >= champion->steps) {
        ChampionRecord candidate{format_machine(machine), decision.steps, false};
        if (!champion || better_champion(candidate, *champion)) champion = std::move(candidate);
      }
      break;
    case Decision::Verdict::Unknown:
      ++unknown_total;
      unknowns.push_back(format_machine(machine));
      if (unknowns.size() >= 2 * kUnknownListCap) trim_unknowns(unknowns);
      break;
    default: break;
  }
}

std::uint64_t SearchReport::emitted() const {
  std::uint64_t sum = 0;
  for (const auto& [key, n] : counts) sum += n;
  return sum;
}

bool SearchReport::proven() const {
  return config.strict && !config.escape_enabled && config.mode == EnumerationMode::Default &&
         complete && unknown_total == 0;
}

void SearchReport::normalize() {
  trim_unknowns(unknowns);
  if (champion) champion->proven = proven();
}

bool SearchReport::same_results(const SearchReport& o) const {
  return config == o.config && champion == o.champion && counts == o.counts &&
         unknowns == o.unknowns && unknown_total == o.unknown_total && nodes == o.nodes &&
         pruned_equivalent == o.pruned_equivalent && complete == o.complete;
}

SearchReport merge_reports(const SearchReport& a, const SearchReport& b) {
  if (!(a.config == b.config)) throw ConfigMismatchError("cannot merge reports of different searches");
  SearchReport out = a;
  if (b.champion && (!out.champion || better_champion(*b.champion, *out.champion))) {
    out.champion = b.champion;
  }
  for (const auto& [key, n] : b.counts) out.counts[key] += n;
  out.unknowns.insert(out.unknowns.end(), b.unknowns.begin(), b.unknowns.end());
  out.unknown_total += b.unknown_total;
  out.nodes += b.nodes;
  out.pruned_equivalent += b.pruned_equivalent;
  out.complete = a.complete && b.complete;
  out.wall_seconds += b.wall_seconds;
  out.normalize();
  return out;
}

json to_json(const ConfigEcho& e) {
  json bounds = json::array();
  for (const auto& [key, steps] : e.known_bounds.entries()) {
    bounds.push_back({key.first, key.second, steps});
  }
  return {{"states", e.n_states},
          {"symbols", e.n_symbols},
          {"max_steps", e.max_steps},
          {"backward_depth", e.backward_depth},
          {"backward_nodes", e.backward_nodes},
          {"cycler_memory", e.cycler_memory},
          {"escape_enabled", e.escape_enabled},
          {"known_bounds", bounds},
          {"mode", to_string(e.mode)},
          {"strict", e.strict}};
}

ConfigEcho config_from_json(const json& j) {
  ConfigEcho e;
  e.n_states = j.at("states").get<int>();
  e.n_symbols = j.at("symbols").get<int>();
  e.max_steps = j.at("max_steps").get<std::uint64_t>();
  e.backward_depth = j.at("backward_depth").get<int>();
  e.backward_nodes = j.at("backward_nodes").get<std::size_t>();
  e.cycler_memory = j.at("cycler_memory").get<std::size_t>();
  e.escape_enabled = j.at("escape_enabled").get<bool>();
  for (const json& b : j.at("known_bounds")) {
    e.known_bounds.add(b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<std::uint64_t>());
  }
  const auto mode = parse_mode(j.at("mode").get<std::string>());
  if (!mode) throw std::invalid_argument("unknown enumeration mode");
  e.mode = *mode;
  e.strict = j.at("strict").get<bool>();
  return e;
}

json to_json(const SearchReport& r, bool include_runtime) {
  json j;
  j["config"] = to_json(r.config);
  if (r.champion) {
    j["champion"] = {{"machine", r.champion->machine},
                     {"steps", r.champion->steps},
                     {"proven", r.champion->proven}};
  } else {
    j["champion"] = nullptr;
  }
  j["counts"] = r.counts;
  j["emitted"] = r.emitted();
  j["unknowns"] = r.unknowns;
  j["unknown_total"] = r.unknown_total;
  j["nodes"] = r.nodes;
  j["pruned_equivalent"] = r.pruned_equivalent;
  j["complete"] = r.complete;
  j["proven"] = r.proven();
  if (include_runtime) j["wall_seconds"] = r.wall_seconds;
  return j;
}

SearchReport report_from_json(const json& j) {
  SearchReport r(config_from_json(j.at("config")));
  if (!j.at("champion").is_null()) {
    const json& c = j.at("champion");
    r.champion = ChampionRecord{c.at("machine").get<std::string>(), c.at("steps").get<std::uint64_t>(),
                                c.at("proven").get<bool>()};
  }
  r.counts = j.at("counts").get<std::map<std::string, std::uint64_t>>();
  r.unknowns = j.at("unknowns").get<std::vector<std::string>>();
  r.unknown_total = j.at("unknown_total").get<std::uint64_t>();
  r.nodes = j.at("nodes").get<std::uint64_t>();
  r.pruned_equivalent = j.at("pruned_equivalent").get<std::uint64_t>();
  r.complete = j.at("complete").get<bool>();
  r.wall_seconds = j.value("wall_seconds", 0.0);
  r.normalize();
  return r;
}

std::string summary_text(const SearchReport& r) {
  std::ostringstream out;
  out << "class " << r.config.n_states << " states, " << r.config.n_symbols << " symbols ("
      << to_string(r.config.mode) << (r.config.strict ? ", strict" : "") << ", max-steps "
      << r.config.max_steps << ")\n";
  if (r.champion) {
    out << "champion " << r.champion->machine << " " << r.champion->steps
        << (r.champion->proven ? " proven" : " candidate") << "\n";
  } else {
    out << "champion none\n";
  }
  for (const auto& [key, n] : r.counts) out << "  " << key << ": " << n << "\n";
  out << "emitted " << r.emitted() << ", nodes " << r.nodes << ", pruned-equivalent "
      << r.pruned_equivalent << ", unknown " << r.unknown_total << (r.complete ? "" : ", incomplete")
      << "\n";
  return out.str();
}

std::string record_line(const TransitionTable& machine, const Decision& d) {
  std::string line = format_machine(machine);
  line += '\t';
  line += to_string(d.verdict);
  line += '\t';
  line += d.has_reason() ? to_string(d.reason) : std::to_string(d.steps);
  return line;
}

void write_checkpoint(const std::string& path, const Checkpoint& cp) {
  json frontier = json::array();
  for (const auto& [machine, steps] : cp.frontier) frontier.push_back({machine, steps});
  const json j = {{"version", kCheckpointVersion},
                  {"config", to_json(cp.config)},
                  {"frontier", frontier},
                  {"partial", to_json(cp.partial)}};
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw CheckpointError("cannot write checkpoint " + tmp);
    out << j.dump() << '\n';
    if (!out) throw CheckpointError("cannot write checkpoint " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CheckpointError("cannot move checkpoint into place: " + ec.message());
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot read checkpoint " + path);
  try {
    const json j = json::parse(in);
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw CheckpointError("checkpoint " + path + " has an unsupported version");
    }
    Checkpoint cp;
    cp.config = config_from_json(j.at("config"));
    for (const json& f : j.at("frontier")) {
      cp.frontier.emplace_back(f.at(0).get<std::string>(), f.at(1).get<std::uint64_t>());
    }
    cp.partial = report_from_json(j.at("partial"));
    if (!(cp.partial.config == cp.config)) throw CheckpointError("checkpoint is inconsistent");
    return cp;
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError("corrupt checkpoint " + path + ": " + e.what());
  }
}

namespace {

// Splits roots breadth-first until the frontier is large enough or the tree
// is exhausted. Leaves found on the way go to report.
std::vector<EnumerationNode> build_frontier(Enumerator& e, SearchReport& report,
                                            std::ostream* records) {
  std::deque<EnumerationNode> queue;
  for (EnumerationNode& root : e.roots()) queue.push_back(std::move(root));
  const LeafSink sink = [&](const TransitionTable& t, const Decision& d) {
    report.record(t, d);
    if (records) *records << record_line(t, d) << '\n';
  };
  while (!queue.empty() && queue.size() < kFrontierTarget) {
    EnumerationNode node = std::move(queue.front());
    queue.pop_front();
    for (EnumerationNode& child : e.split(node, sink)) queue.push_back(std::move(child));
  }
  return {std::make_move_iterator(queue.begin()), std::make_move_iterator(queue.end())};
}

}  // namespace

SearchReport run_search(const SearchConfig& config) {
  config.validate();
  const auto t0 = Clock::now();
  const ConfigEcho echo = ConfigEcho::of(config);
  const DeciderLimits limits = config.effective_limits();

  SearchReport done(echo);
  std::vector<EnumerationNode> frontier;
  double prior_seconds = 0.0;

  const bool resuming = config.checkpoint_path && std::filesystem::exists(*config.checkpoint_path);
  if (resuming) {
    Checkpoint cp = read_checkpoint(*config.checkpoint_path);
    if (!(cp.config == echo)) {
      throw ConfigMismatchError("checkpoint " + *config.checkpoint_path +
                                " belongs to a different search configuration");
    }
    done = std::move(cp.partial);
    done.complete = true;
    prior_seconds = done.wall_seconds;
    done.wall_seconds = 0.0;
    for (const auto& [machine, steps] : cp.frontier) {
      try {
        frontier.push_back(replay_node(parse_machine(machine), steps));
      } catch (const std::exception& e) {
        throw CheckpointError("bad frontier entry " + machine + ": " + e.what());
      }
    }
  } else {
    Enumerator e(config.n_states, config.n_symbols, limits, config.mode);
    frontier = build_frontier(e, done, config.records);
    done.nodes += e.stats().nodes;
    done.pruned_equivalent += e.stats().pruned_equivalent;
  }

  const std::size_t total = frontier.size();
  const std::size_t limit = config.stop_after ? std::min(*config.stop_after, total) : total;
  std::vector<char> finished(total, 0);
  auto last_checkpoint = Clock::now();
  std::exception_ptr failure;

  auto save = [&] {
    Checkpoint cp{echo, {}, done};
    for (std::size_t i = 0; i < total; ++i) {
      if (!finished[i]) {
        cp.frontier.emplace_back(format_machine(frontier[i].machine.table), frontier[i].config.steps);
      }
    }
    cp.partial.complete = true;
    cp.partial.wall_seconds = prior_seconds + seconds_since(t0);
    write_checkpoint(*config.checkpoint_path, cp);
  };

  if (config.checkpoint_path && !resuming) save();

  auto process = [&](std::size_t i, Enumerator& e, std::string* buffer) {
    SearchReport local(echo);
    const EnumerationStats before = e.stats();
    e.explore(frontier[i], [&](const TransitionTable& t, const Decision& d) {
      local.record(t, d);
      if (buffer) (*buffer += record_line(t, d)) += '\n';
    });
    local.nodes = e.stats().nodes - before.nodes;
    local.pruned_equivalent = e.stats().pruned_equivalent - before.pruned_equivalent;
    return local;
  };

  auto commit = [&](std::size_t i, const SearchReport& local) {
#pragma omp critical(castor_search_commit)
    {
      try {
        done = merge_reports(done, local);
        finished[i] = 1;
        if (config.checkpoint_path &&
            seconds_since(last_checkpoint) >= config.checkpoint_interval_seconds) {
          save();
          last_checkpoint = Clock::now();
        }
      } catch (...) {
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const auto n = static_cast<std::int64_t>(limit);
  if (config.records) {
#pragma omp parallel num_threads(config.workers)
    {
      Enumerator e(config.n_states, config.n_symbols, limits, config.mode);
#pragma omp for schedule(dynamic, 1) ordered
      for (std::int64_t i = 0; i < n; ++i) {
        std::string buffer;
        SearchReport local = process(static_cast<std::size_t>(i), e, &buffer);
#pragma omp ordered
        { *config.records << buffer; }
        commit(static_cast<std::size_t>(i), local);
      }
    }
  } else {
#pragma omp parallel num_threads(config.workers)
    {
      Enumerator e(config.n_states, config.n_symbols, limits, config.mode);
#pragma omp for schedule(dynamic, 1)
      for (std::int64_t i = 0; i < n; ++i) {
        commit(static_cast<std::size_t>(i), process(static_cast<std::size_t>(i), e, nullptr));
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  if (config.checkpoint_path) save();
  done.complete = limit == total;
  done.wall_seconds = prior_seconds + seconds_since(t0);
  done.normalize();
  return done;
}

SearchReport run_search_serial(const SearchConfig& config) {
  config.validate();
  const auto t0 = Clock::now();
  SearchReport report(ConfigEcho::of(config));
  const EnumerationStats stats = enumerate(
      config.n_states, config.n_symbols, config.effective_limits(),
      [&](const TransitionTable& t, const Decision& d) {
        report.record(t, d);
        if (config.records) *config.records << record_line(t, d) << '\n';
      },
      config.mode);
  report.nodes = stats.nodes;
  report.pruned_equivalent = stats.pruned_equivalent;
  report.wall_seconds = seconds_since(t0);
  report.normalize();
  return report;
}

TableDocument emit_table(const std::vector<SearchReport>& reports) {
  TableDocument table;
  for (const SearchReport& r : reports) {
    TableDocument::Cell cell;
    if (r.champion) {
      cell.has_champion = true;
      cell.steps = r.champion->steps;
      cell.proven = r.proven();
    }
    const std::pair key{r.config.n_states, r.config.n_symbols};
    if (table.cells.count(key)) throw std::invalid_argument("two reports for the same class");
    table.cells[key] = cell;
  }
  return table;
}

std::string render_plain(const TableDocument& table) {
  if (table.empty()) return "";
  int max_states = 0, min_symbols = kMaxSymbols, max_symbols = 0;
  for (const auto& [key, cell] : table.cells) {
    max_states = std::max(max_states, key.first);
    min_symbols = std::min(min_symbols, key.second);
    max_symbols = std::max(max_symbols, key.second);
  }
  auto text = [&](int n, int m) -> std::string {
    const auto it = table.cells.find({n, m});
    if (it == table.cells.end() || !it->second.has_champion) return "—";
    return std::to_string(it->second.steps) + (it->second.proven ? "*" : "");
  };
  // "—" is one column wide but three bytes long.
  auto width_of = [](const std::string& s) { return s == "—" ? std::size_t{1} : s.size(); };
  std::vector<std::size_t> widths(static_cast<std::size_t>(max_states + 1), 0);
  widths[0] = std::string("symbols\\states").size();
  for (int n = 1; n <= max_states; ++n) {
    std::size_t w = std::to_string(n).size();
    for (int m = min_symbols; m <= max_symbols; ++m) w = std::max(w, width_of(text(n, m)));
    widths[static_cast<std::size_t>(n)] = w;
  }
  auto pad = [&](const std::string& s, std::size_t w) {
    return std::string(w - std::min(w, width_of(s)), ' ') + s;
  };
  std::ostringstream out;
  out << pad("symbols\\states", widths[0]);
  for (int n = 1; n <= max_states; ++n) out << "  " << pad(std::to_string(n), widths[n]);
  out << '\n';
  for (int m = min_symbols; m <= max_symbols; ++m) {
    out << pad(std::to_string(m), widths[0]);
    for (int n = 1; n <= max_states; ++n) out << "  " << pad(text(n, m), widths[n]);
    out << '\n';
  }
  out << "(* proven maximum)\n";
  return out.str();
}

std::string render_records(const TableDocument& table) {
  std::ostringstream out;
  for (const auto& [key, cell] : table.cells) {
    out << key.first << '\t' << key.second << '\t';
    if (cell.has_champion) {
      out << cell.steps << '\t' << (cell.proven ? "proven" : "candidate");
    } else {
      out << "—\tnone";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace castor
