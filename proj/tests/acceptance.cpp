// Acceptance run: one PASS/FAIL line per criterion.
//
// Criteria that cannot be attained on the build machine are listed in
// kExpectedFailures with the reason; they still print FAIL. The exit status
// is non-zero when a criterion fails that is not listed there, so ctest
// catches regressions without hiding the unattained ones. --full also runs
// the multi-hour parts (full-cap (5,2), the (2,4) proof, the cap-10^5 cells).

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "castor/deciders.hpp"
#include "castor/macro.hpp"
#include "castor/search.hpp"
#include "castor/simulator.hpp"
#include "random_machines.hpp"

using namespace castor;

namespace {

// Exact step counts; there is no tolerance anywhere.
constexpr std::uint64_t kProvenRow[] = {1, 4, 12, 34};
constexpr std::uint64_t kFiveStateChampion = 187;
constexpr std::uint64_t kCiCap = 10'000;
constexpr std::uint64_t kTableCap = 100'000;
// Above every expected table value in 5b-5d, small enough for one core.
constexpr std::uint64_t kReducedCap = 1'000;
constexpr std::uint64_t kSixStateSteps = 438'120;
constexpr std::uint64_t kSoundnessSamples = 10'000;
constexpr std::uint64_t kSoundnessHorizon = 100'000;

// Criteria known to be out of reach on one core, with the reason.
const std::map<std::string, std::string> kExpectedFailures = {
    {"2b", "full-cap (5,2) search needs hours on one core; run with --full"},
    {"5b", "(2,4) proof simulates ~2*10^5 unknowns to ~4*10^6 steps each; 5b- checks the value at a reduced cap"},
    {"5c", "(2,5) at cap 10^5 needs hours on one core; 5c- checks it at a reduced cap"},
    {"5d", "(3,3) at cap 10^5 needs hours on one core; 5d- checks it at a reduced cap"},
    {"5e", "(3,4) at cap 10^5 needs days on one core; run with --full"},
    {"7a+", "the escape rule is a heuristic with small counterexamples"},
};

struct Options {
  bool full = false;
  std::set<std::string> only;
  int workers = 1;
};

KnownBounds shipped_bounds() {
  try {
    return KnownBounds::load(CASTOR_SOURCE_DIR "/data/known_bounds.txt");
  } catch (const std::exception&) {
    return KnownBounds::defaults();
  }
}

SearchConfig config(int n, int m, std::uint64_t cap, bool strict, const Options& o) {
  SearchConfig c;
  c.n_states = n;
  c.n_symbols = m;
  c.limits.max_steps = cap;
  c.limits.known_bounds = shipped_bounds();
  c.strict = strict;
  c.workers = o.workers;
  return c;
}

std::string champion_text(const SearchReport& r) {
  if (!r.champion) return "no champion";
  std::ostringstream s;
  s << r.champion->steps << " (" << r.champion->machine << "), unknown " << r.unknown_total
    << (r.proven() ? ", proven" : "");
  return s.str();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Runner {
 public:
  explicit Runner(Options o) : opts_(std::move(o)) {}

  void run(const std::string& id, const std::string& name, const std::function<Outcome()>& body,
           bool needs_full = false) {
    if (!opts_.only.empty() && !opts_.only.count(id) && !opts_.only.count(id.substr(0, 1))) return;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    if (needs_full && !opts_.full) {
      out = {false, "not run"};
    } else {
      try {
        out = body();
      } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto expected = kExpectedFailures.find(id);
    std::string note;
    if (!out.pass && expected != kExpectedFailures.end()) {
      note = " [expected: " + expected->second + "]";
    } else if (!out.pass) {
      ++unexpected_;
    }
    std::printf("%s %-3s %s: %s (%.1fs)%s\n", out.pass ? "PASS" : "FAIL", id.c_str(), name.c_str(),
                out.detail.c_str(), secs, note.c_str());
    std::fflush(stdout);
  }

  int unexpected() const { return unexpected_; }
  const Options& options() const { return opts_; }

 private:
  Options opts_;
  int unexpected_ = 0;
};

Outcome proven_rows(const Options& o) {
  std::ostringstream d;
  bool ok = true;
  for (int n = 1; n <= 4; ++n) {
    const SearchReport r = run_search(config(n, 2, 1'000'000, true, o));
    const bool good = r.champion && r.champion->steps == kProvenRow[n - 1] && r.unknown_total == 0 &&
                      r.proven();
    ok = ok && good;
    d << (n > 1 ? "; " : "") << "(" << n << ",2) " << champion_text(r);
  }
  return {ok, d.str()};
}

Outcome five_states(std::uint64_t cap, bool want_unknowns, const Options& o) {
  const SearchReport r = run_search(config(5, 2, cap, false, o));
  const bool ok = r.champion && r.champion->steps == kFiveStateChampion &&
                  (want_unknowns ? r.unknown_total > 0 : true) && r.complete;
  std::ostringstream d;
  d << "cap " << cap << ": champion " << champion_text(r) << ", emitted " << r.emitted();
  return {ok, d.str()};
}

Outcome six_states() {
  const RunResult r = simulate(macro::champion(), 1'000'000);
  std::ostringstream d;
  d << to_string(r.kind) << " " << r.steps;
  return {r.kind == RunResult::Kind::HaltedBlank && r.steps == kSixStateSteps, d.str()};
}

Outcome certificate() {
  const macro::Certificate cert = macro::build_certificate();
  const std::vector<std::uint64_t> want = {3,     6,    15,    12,     105,    25,  581,
                                           2676, 13067, 745, 69626, 350003, 1256};
  std::vector<std::uint64_t> got;
  bool cross = true;
  for (const auto& s : cert.steps) {
    got.push_back(s.cost);
    cross = cross && macro::cross_check(s);
  }
  std::ostringstream d;
  d << cert.steps.size() << " steps, total " << cert.total() << ", cross-check "
    << (cross ? "passed" : "FAILED") << ", chain " << (got == want ? "matches" : "differs");
  return {cert.total() == kSixStateSteps && cross && got == want, d.str()};
}

Outcome one_state_rows(const Options& o) {
  std::ostringstream d;
  bool ok = true;
  for (int m = 2; m <= 5; ++m) {
    const SearchReport r = run_search(config(1, m, 1'000'000, true, o));
    ok = ok && r.champion && r.champion->steps == 1 && r.proven();
    d << (m > 2 ? "; " : "") << "(1," << m << ") " << champion_text(r);
  }
  return {ok, d.str()};
}

Outcome proven_cell(int n, int m, std::uint64_t expected, const Options& o) {
  const std::uint64_t cap = shipped_bounds().bound_for(n, m).value_or(1'000'000) + 1;
  const SearchReport r = run_search(config(n, m, cap, true, o));
  const bool ok = r.champion && r.champion->steps == expected && r.proven();
  return {ok, "cap " + std::to_string(cap) + ": " + champion_text(r)};
}

Outcome capped_cell(int n, int m, std::uint64_t expected, std::uint64_t cap, const Options& o) {
  const SearchReport r = run_search(config(n, m, cap, false, o));
  const bool ok = r.champion && r.champion->steps == expected && r.complete;
  return {ok, "cap " + std::to_string(cap) + ": " + champion_text(r)};
}

Outcome counts() {
  const bool ok = count_raw_machines(3, 2) == 16'777'216 &&
                  count_raw_machines(4, 2) == boost::multiprecision::cpp_int("25600000000") &&
                  count_raw_machines(5, 2) == boost::multiprecision::cpp_int("63403380965376");
  std::ostringstream d;
  d << count_raw_machines(3, 2) << " / " << count_raw_machines(4, 2) << " / "
    << count_raw_machines(5, 2);
  return {ok, d.str()};
}

// No machine flagged as never halting on a blank tape halts blank within the
// horizon. Samples mix random complete machines with enumerated leaves.
// With escape on, counterexamples to the escape rule are counted instead.
Outcome soundness(bool escape) {
  std::mt19937_64 rng(2024);
  DeciderLimits limits;
  limits.max_steps = kCiCap;
  limits.known_bounds = shipped_bounds();
  limits.escape_enabled = escape;
  std::uint64_t samples = 0, flagged = 0, violations = 0;
  std::string example;
  auto check = [&](const TransitionTable& t, const Decision& d) {
    ++samples;
    if (d.verdict != Decision::Verdict::NonHalting && d.verdict != Decision::Verdict::NoBlankHalt) return;
    ++flagged;
    Configuration c;
    if (run(c, t, kSoundnessHorizon) == StepStatus::Halted && c.tape.blank()) {
      if (violations++ == 0) example = format_machine(t) + " " + to_string(d) + ", halts blank at " +
                                       std::to_string(c.steps);
    }
  };
  for (std::uint64_t i = 0; i < kSoundnessSamples; ++i) {
    const int n = 2 + static_cast<int>(i % 4);
    const int m = 2 + static_cast<int>((i / 4) % 2);
    const TransitionTable t = rnd::random_machine(rng, n, m, 0.1);
    check(t, decide(t, limits));
  }
  // Every leaf of two enumerated classes.
  for (auto [n, m] : {std::pair{3, 2}, {2, 3}}) {
    enumerate(n, m, limits, [&](const TransitionTable& t, const Decision& d) { check(t, d); });
  }
  std::ostringstream d;
  d << samples << " samples, " << flagged << " flagged, " << violations << " blank halts within "
    << kSoundnessHorizon;
  if (!example.empty()) d << " (e.g. " << example << ")";
  return {samples >= kSoundnessSamples && flagged > 0 && violations == 0, d.str()};
}

Outcome invariance() {
  std::mt19937_64 rng(99);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 2 + i % 4;
    const TransitionTable t = rnd::random_machine(rng, n, 2 + (i / 4) % 2);
    const RunResult base = simulate(t, 5000);
    const RunResult mir = simulate(mirror(t), 5000);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) perm[static_cast<std::size_t>(s)] = s;
    std::shuffle(perm.begin() + 1, perm.end(), rng);
    const RunResult per = simulate(permute_states(t, perm), 5000);
    if (mir.kind != base.kind || mir.steps != base.steps || mir.head != -base.head) ++bad;
    if (!(per == base)) ++bad;
  }
  return {bad == 0, "1000 machines, " + std::to_string(bad) + " mismatches"};
}

Outcome merge_laws(const Options& o) {
  const SearchConfig c = config(3, 2, 1000, true, o);
  const ConfigEcho echo = ConfigEcho::of(c);
  std::vector<SearchReport> leaves;
  enumerate(3, 2, c.effective_limits(), [&](const TransitionTable& t, const Decision& d) {
    SearchReport r(echo);
    r.record(t, d);
    leaves.push_back(std::move(r));
  });
  SearchReport whole(echo);
  for (const auto& l : leaves) whole = merge_reports(whole, l);
  whole.normalize();
  const auto dump = [](const SearchReport& r) { return to_json(r, false).dump(); };
  std::mt19937_64 rng(17);
  int bad = 0, trials = 0;
  for (int k = 2; k <= 9; ++k, ++trials) {
    std::vector<SearchReport> parts(static_cast<std::size_t>(k), SearchReport(echo));
    std::uniform_int_distribution<int> pick(0, k - 1);
    for (const auto& l : leaves) {
      auto& p = parts[static_cast<std::size_t>(pick(rng))];
      p = merge_reports(p, l);
    }
    std::shuffle(parts.begin(), parts.end(), rng);
    SearchReport merged(echo);
    for (const auto& p : parts) merged = merge_reports(merged, p);
    merged.normalize();
    if (dump(merged) != dump(whole)) ++bad;
    if (dump(merge_reports(parts[0], parts[1])) != dump(merge_reports(parts[1], parts[0]))) ++bad;
    const auto& z = parts[static_cast<std::size_t>(k - 1)];
    if (dump(merge_reports(merge_reports(parts[0], parts[1]), z)) !=
        dump(merge_reports(parts[0], merge_reports(parts[1], z))))
      ++bad;
    if (dump(merge_reports(parts[0], SearchReport(echo))) != dump(parts[0])) ++bad;
  }
  return {bad == 0, std::to_string(trials) + " random partitions of " + std::to_string(leaves.size()) +
                        " leaves, " + std::to_string(bad) + " violations"};
}

Outcome macro_properties() {
  using namespace castor::macro;
  int fold_checked = 0, bad = 0;
  for (int r = 0; r < 4; ++r) {
    for (std::int64_t m = 0; m <= 10; ++m) {
      for (std::int64_t k0 = 0; k0 <= 5; ++k0) {
        for (std::int64_t k2 = 2; k2 <= 100; k2 += 3) {
          const MacroConfig mc{k0, 4 * m + r, k2};
          if (r % 2 == 1 && k0 == 0) continue;
          const MacroStep closed = closed_form_step(mc);
          MacroConfig at = mc;
          std::uint64_t cost = 0;
          for (int guard = 0; guard < 100 && !(cost > 0 && at == *closed.to); ++guard) {
            const MacroStep s = macro_step(at);
            if (!s.to) break;
            cost += s.cost;
            at = *s.to;
          }
          if (!(at == *closed.to) || cost != closed.cost || !cross_check(closed)) ++bad;
          ++fold_checked;
        }
      }
    }
  }
  // Properties 1-3 by direct simulation for k = 0..30.
  int prop_bad = 0;
  auto run_from = [](const std::string& tape, std::int64_t head, int state, int steps) {
    Configuration c;
    for (std::size_t i = 0; i < tape.size(); ++i) {
      c.tape.visit(static_cast<std::int64_t>(i));
      c.tape.write(static_cast<std::int64_t>(i), static_cast<Symbol>(tape[i] - '0'));
    }
    c.head = head;
    c.state = StateId(state);
    c.tape.visit(head);
    for (int s = 0; s < steps; ++s) step(c, champion());
    return c;
  };
  for (int k = 0; k <= 30; ++k) {
    const auto len = static_cast<std::size_t>(k);
    const Configuration p1 = run_from(std::string(len + 1, '1'), 0, 0, k + 2);
    if (!(p1.state == StateId(1)) || p1.head != k + 2 || p1.tape.nonblank_count() != len + 2) ++prop_bad;
    const Configuration p2 = run_from("1" + std::string(len, '0'), k, 1, k + 1);
    if (!(p2.state == StateId(2)) || p2.head != -1 || p2.tape.nonblank_count() != len + 1) ++prop_bad;
    const Configuration p3 = run_from(std::string(len + 1, '1'), 0, 2, k + 1);
    const int end[] = {4, 5, 2};
    if (!(p3.state == StateId(end[k % 3])) || p3.head != k + 1 || !p3.tape.blank()) ++prop_bad;
  }
  std::ostringstream d;
  d << "fold law " << fold_checked << " cases, " << bad << " failures; properties 1-3 k=0..30, "
    << prop_bad << " failures";
  return {bad == 0 && prop_bad == 0, d.str()};
}

Outcome determinism() {
  SearchConfig c;
  c.n_states = 3;
  c.n_symbols = 2;
  c.strict = true;
  c.limits.max_steps = 10'000;
  const std::string serial = to_json(run_search_serial(c), false).dump();
  bool ok = true;
  for (int w : {1, 2, 8}) {
    c.workers = w;
    ok = ok && to_json(run_search(c), false).dump() == serial;
  }
  return {ok, std::string("workers 1/2/8 ") + (ok ? "identical to serial" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  Options opts;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--full")) {
      opts.full = true;
    } else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
      opts.only.insert(argv[++i]);
    } else if (!std::strcmp(argv[i], "--workers") && i + 1 < argc) {
      opts.workers = std::max(1, std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--full] [--workers N] [--only ID]...\n", argv[0]);
      return 2;
    }
  }
  Runner run(opts);
  const Options& o = run.options();

  run.run("1", "proven rows (n,2), n=1..4", [&] { return proven_rows(o); });
  run.run("2a", "(5,2) champion at the CI cap", [&] { return five_states(kCiCap, true, o); });
  run.run("2b", "(5,2) champion at the full cap",
          [&] { return five_states(47'176'870, false, o); }, true);
  run.run("3", "6-state candidate by direct simulation", six_states);
  run.run("4", "macro certificate", certificate);
  run.run("5a", "(1,m) proven for m=2..5, (2,3)=13 proven", [&] {
    Outcome a = one_state_rows(o);
    const Outcome b = proven_cell(2, 3, 13, o);
    return Outcome{a.pass && b.pass, a.detail + "; (2,3) " + b.detail};
  });
  run.run("5b", "(2,4)=39 proven", [&] { return proven_cell(2, 4, 39, o); }, true);
  run.run("5b-", "(2,4)=39 at the reduced cap", [&] { return capped_cell(2, 4, 39, kReducedCap, o); });
  run.run("5c", "(2,5)=504 at cap 10^5", [&] { return capped_cell(2, 5, 504, kTableCap, o); }, true);
  run.run("5c-", "(2,5)=504 at the reduced cap", [&] { return capped_cell(2, 5, 504, kReducedCap, o); });
  run.run("5d", "(3,3)=102 at cap 10^5", [&] { return capped_cell(3, 3, 102, kTableCap, o); }, true);
  run.run("5d-", "(3,3)=102 at the reduced cap", [&] { return capped_cell(3, 3, 102, kReducedCap, o); });
  run.run("5e", "(3,4)=26768 at cap 10^5",
          [&] { return capped_cell(3, 4, 26'768, kTableCap, o); }, true);
  run.run("6", "raw machine counts", counts);
  run.run("7a", "decider soundness sampling, exhaustive deciders", [] { return soundness(false); });
  run.run("7a+", "decider soundness sampling, escape rule on", [] { return soundness(true); });
  run.run("7b", "mirror and permutation invariance", invariance);
  run.run("7c", "merge algebra over random partitions", [&] { return merge_laws(o); });
  run.run("7d", "fold law and properties 1-3", macro_properties);
  run.run("7e", "parallel determinism on (3,2)", determinism);

  std::printf("%d unexpected failure(s)\n", run.unexpected());
  return run.unexpected() == 0 ? 0 : 1;
}
