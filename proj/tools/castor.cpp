// castor: command-line front end.
//
// Exit codes: 0 conclusive, 1 inconclusive (unknown verdicts, cutoff), 2 usage
// or input error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "castor/deciders.hpp"
#include "castor/machine.hpp"
#include "castor/macro.hpp"
#include "castor/search.hpp"
#include "castor/simulator.hpp"

#ifndef CASTOR_DEFAULT_BOUNDS_FILE
#define CASTOR_DEFAULT_BOUNDS_FILE ""
#endif

namespace {

using namespace castor;

constexpr int kConclusive = 0;
constexpr int kInconclusive = 1;
constexpr int kInputError = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string format = "plain";
  std::string bounds_file;

  bool records() const { return format == "records"; }
};

// --bounds, then $CASTOR_KNOWN_BOUNDS, then the shipped data file, then the
// built-in table.
KnownBounds load_bounds(const Common& common) {
  std::string path = common.bounds_file;
  if (path.empty()) {
    if (const char* env = std::getenv("CASTOR_KNOWN_BOUNDS"); env && *env) path = env;
  }
  if (!path.empty()) {
    try {
      return KnownBounds::load(path);
    } catch (const std::exception& e) {
      throw InputError(e.what());
    }
  }
  const std::string shipped = CASTOR_DEFAULT_BOUNDS_FILE;
  if (!shipped.empty() && std::ifstream(shipped)) return KnownBounds::load(shipped);
  return KnownBounds::defaults();
}

TransitionTable parse_or_throw(const std::string& text) {
  try {
    return parse_machine(text);
  } catch (const ParseError& e) {
    throw InputError(e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct LimitFlags {
  std::uint64_t max_steps = DeciderLimits{}.max_steps;
  int backward_depth = DeciderLimits{}.backward_depth;
  bool strict = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--max-steps", max_steps, "Simulation cap")->capture_default_str();
    cmd->add_option("--backward-depth", backward_depth, "Backward reasoning depth (0 disables)")
        ->capture_default_str();
    cmd->add_flag("--strict", strict, "Disable the escape heuristic");
  }

  DeciderLimits limits(const Common& common) const {
    DeciderLimits l;
    l.max_steps = max_steps;
    l.backward_depth = backward_depth;
    l.escape_enabled = !strict;
    l.known_bounds = load_bounds(common);
    return l;
  }
};

int cmd_simulate(const Common& common, const std::string& machine, std::uint64_t max_steps,
                 bool trace) {
  const TransitionTable table = parse_or_throw(machine);
  Configuration config;
  StepStatus status = StepStatus::Running;
  if (trace) {
    while (config.steps < max_steps) {
      const StateId state = config.state;
      const std::int64_t head = config.head;
      const Symbol read = config.tape.read(head);
      status = step(config, table);
      if (status == StepStatus::Undefined) break;
      const Symbol written = config.tape.read(head);
      std::cout << config.steps << (common.records() ? '\t' : ' ') << state.letter()
                << (common.records() ? '\t' : ' ') << head << (common.records() ? '\t' : ' ')
                << int(read) << (common.records() ? '\t' : ' ') << int(written) << '\n';
      if (status == StepStatus::Halted) break;
    }
  } else {
    status = run(config, table, max_steps);
  }
  if (status == StepStatus::Undefined) {
    std::cout << "undefined " << config.state.letter() << int(config.tape.read(config.head))
              << " after " << config.steps << " steps\n";
    return kInconclusive;
  }
  RunResult result;
  result.steps = config.steps;
  result.head = config.head;
  result.kind = status != StepStatus::Halted  ? RunResult::Kind::Cutoff
                : config.tape.blank()         ? RunResult::Kind::HaltedBlank
                                              : RunResult::Kind::HaltedDirty;
  if (common.records()) {
    std::cout << to_string(result.kind) << '\t' << result.steps << '\t' << result.head << '\n';
  } else {
    std::cout << to_string(result.kind) << ' ' << result.steps << "\nhead " << result.head << '\n';
  }
  return result.kind == RunResult::Kind::Cutoff ? kInconclusive : kConclusive;
}

int cmd_decide(const Common& common, const std::string& machine, const LimitFlags& flags) {
  const TransitionTable table = parse_or_throw(machine);
  const Decision d = decide(table, flags.limits(common));
  if (common.records()) {
    std::cout << to_string(d.verdict) << '\t'
              << (d.has_reason() ? to_string(d.reason) : std::to_string(d.steps)) << '\n';
  } else {
    std::cout << to_string(d) << '\n';
  }
  return d.conclusive() ? kConclusive : kInconclusive;
}

struct SearchFlags {
  int states = 2;
  int symbols = 2;
  std::string mode = "default";
  int workers = 1;
  std::string checkpoint;
  std::string out;
  std::string records_file;
  std::size_t stop_after = 0;
};

int cmd_search(const Common& common, const LimitFlags& limit_flags, const SearchFlags& f) {
  SearchConfig config;
  config.n_states = f.states;
  config.n_symbols = f.symbols;
  config.limits = limit_flags.limits(common);
  config.strict = limit_flags.strict;
  const auto mode = parse_mode(f.mode);
  if (!mode) throw InputError("unknown mode '" + f.mode + "'");
  config.mode = *mode;
  config.workers = f.workers;
  if (!f.checkpoint.empty()) config.checkpoint_path = f.checkpoint;
  if (f.stop_after > 0) config.stop_after = f.stop_after;

  std::ofstream records_out;
  if (!f.records_file.empty()) {
    records_out.open(f.records_file);
    if (!records_out) throw InputError("cannot write " + f.records_file);
    config.records = &records_out;
  } else if (common.records()) {
    config.records = &std::cout;
  }

  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  SearchReport report;
  try {
    report = run_search(config);
  } catch (const CheckpointError& e) {
    throw InputError(e.what());
  } catch (const ConfigMismatchError& e) {
    throw InputError(e.what());
  }

  if (!f.out.empty()) {
    std::ofstream out(f.out);
    if (!out) throw InputError("cannot write " + f.out);
    out << to_json(report).dump(2) << '\n';
  }
  if (!common.records()) std::cout << summary_text(report);
  return report.complete && report.unknown_total == 0 ? kConclusive : kInconclusive;
}

int cmd_verify(const Common& common, bool grid, const std::string& certificate_file,
               const std::string& export_file) {
  (void)common;
  using namespace castor::macro;
  if (grid) {
    std::size_t passed = 0, failed = 0;
    for (std::int64_t k0 = 0; k0 <= 5; ++k0) {
      for (std::int64_t k1 = 0; k1 <= 25; ++k1) {
        for (std::int64_t k2 = 0; k2 <= 50; ++k2) {
          MacroStep s;
          try {
            s = macro_step({k0, k1, k2});
          } catch (const DomainError&) {
            continue;
          }
          if (cross_check(s)) {
            ++passed;
          } else {
            ++failed;
            std::cout << "cross-check failed: " << to_string(*s.from) << " " << to_string(s.rule)
                      << '\n';
          }
        }
      }
    }
    std::cout << "cross-check grid: " << passed << " passed, " << failed << " failed\n";
    return failed == 0 ? kConclusive : kInconclusive;
  }

  Certificate cert;
  if (!certificate_file.empty()) {
    try {
      cert = parse_certificate(read_file(certificate_file));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  } else {
    cert = build_certificate();
  }
  if (!export_file.empty()) {
    std::ofstream out(export_file);
    if (!out) throw InputError("cannot write " + export_file);
    out << export_certificate(cert);
  }
  const VerifyResult result = verify_certificate(cert);
  if (!result.ok) {
    std::cout << "certificate rejected: " << result.message << '\n';
    // A supplied certificate that does not check out is bad input.
    return certificate_file.empty() ? kInconclusive : kInputError;
  }
  std::cout << "certificate ok: " << result.message << ", cross-check passed\n";
  return kConclusive;
}

int cmd_count(int states, int symbols) {
  if (states < 1 || symbols < 2) throw InputError("need states >= 1 and symbols >= 2");
  std::cout << count_raw_machines(states, symbols) << '\n';
  return kConclusive;
}

int cmd_table(const Common& common, const std::vector<std::string>& files) {
  std::vector<SearchReport> reports;
  for (const std::string& path : files) {
    try {
      reports.push_back(report_from_json(nlohmann::json::parse(read_file(path))));
    } catch (const InputError&) {
      throw;
    } catch (const std::exception& e) {
      throw InputError(path + ": " + e.what());
    }
  }
  TableDocument table;
  try {
    table = emit_table(reports);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  std::cout << (common.records() ? render_records(table) : render_plain(table));
  return kConclusive;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search and verification tools for blank-to-blank halting Turing machines"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"plain", "records"}))
      ->capture_default_str();
  app.add_option("--bounds", common.bounds_file, "Known-bounds file (states symbols max_steps)");

  std::string machine;
  std::uint64_t sim_steps = 1'000'000;
  bool trace = false;
  CLI::App* simulate = app.add_subcommand("simulate", "Run a machine from the blank tape");
  simulate->add_option("machine", machine, "Machine string, e.g. 1RB1LB_1LA0LC")->required();
  simulate->add_option("--max-steps", sim_steps, "Step cap")->capture_default_str();
  simulate->add_flag("--trace", trace, "Print every step: step state head read written");

  LimitFlags decide_flags;
  CLI::App* decide_cmd = app.add_subcommand("decide", "Classify a machine");
  decide_cmd->add_option("machine", machine, "Machine string")->required();
  decide_flags.add_to(decide_cmd);

  LimitFlags search_limits;
  SearchFlags search_flags;
  CLI::App* search = app.add_subcommand("search", "Search a whole (states, symbols) class");
  search->add_option("--states", search_flags.states)->capture_default_str();
  search->add_option("--symbols", search_flags.symbols)->capture_default_str();
  search_limits.add_to(search);
  search->add_option("--mode", search_flags.mode, "default | paper-pruning")->capture_default_str();
  search->add_option("--workers", search_flags.workers)->capture_default_str();
  search->add_option("--checkpoint", search_flags.checkpoint,
                     "Checkpoint file; resumed from when it exists");
  search->add_option("--stop-after", search_flags.stop_after,
                     "Stop after this many subtrees (0 = run to completion)");
  search->add_option("--out", search_flags.out, "Write the JSON summary here");
  search->add_option("--records", search_flags.records_file, "Write one line per machine here");

  bool grid = false;
  std::string certificate_file, export_file;
  CLI::App* verify = app.add_subcommand("verify", "Check the 6-state champion's macro certificate");
  verify->add_flag("--cross-check-grid", grid, "Check every case rule on a small grid");
  verify->add_option("--certificate", certificate_file, "Verify this certificate file instead");
  verify->add_option("--export", export_file, "Write the certificate to this file");

  int count_states = 2, count_symbols = 2;
  CLI::App* count = app.add_subcommand("count", "Number of raw machines in a class");
  count->add_option("--states", count_states)->capture_default_str();
  count->add_option("--symbols", count_symbols)->capture_default_str();

  std::vector<std::string> report_files;
  CLI::App* table = app.add_subcommand("table", "Grid of search results");
  table->add_option("reports", report_files, "JSON summaries written by search --out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*simulate) return cmd_simulate(common, machine, sim_steps, trace);
    if (*decide_cmd) return cmd_decide(common, machine, decide_flags);
    if (*search) return cmd_search(common, search_limits, search_flags);
    if (*verify) return cmd_verify(common, grid, certificate_file, export_file);
    if (*count) return cmd_count(count_states, count_symbols);
    if (*table) return cmd_table(common, report_files);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
