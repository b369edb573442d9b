#include <random>
#include <set>

#include "castor/deciders.hpp"
#include "castor/simulator.hpp"
#include "doctest.h"
#include "oracle.hpp"
#include "random_machines.hpp"

using namespace castor;

namespace {

DeciderLimits strict_limits(std::uint64_t cap) {
  DeciderLimits l;
  l.max_steps = cap;
  l.escape_enabled = false;
  return l;
}

}  // namespace

TEST_CASE("decision strings") {
  CHECK(to_string(Decision::halts(true, 187)) == "halts-blank 187");
  CHECK(to_string(Decision::non_halting(Reason::CyclerRepeat)) == "non-halting cycler-repeat");
  CHECK(to_string(Decision::no_blank_halt(Reason::BackwardContradiction)) ==
        "no-blank-halt backward-contradiction");
  CHECK(to_string(Decision::unknown(1000)) == "unknown 1000");
  for (Reason r : {Reason::BackwardContradiction, Reason::HaltUnreachable, Reason::CyclerRepeat,
                   Reason::EscapeHeuristic, Reason::KnownBoundExceeded}) {
    CHECK(parse_reason(to_string(r)) == r);
  }
  CHECK_FALSE(parse_reason("nope").has_value());
}

TEST_CASE("decide on the printed machines") {
  DeciderLimits l;
  l.max_steps = 1'000'000;
  CHECK(decide(parse_machine("1RB1RA_1LB1LC_1RD0RE_0LE0RA_0RZ0RF_0RB0RC"), l) ==
        Decision::halts(true, 438'120));
  CHECK(decide(parse_machine("1RB1LB_1LA0LC_0RZ0LD_1RD0LB"), l) == Decision::halts(true, 34));
  // The printed 5-state table halts blank after 185 steps.
  CHECK(decide(parse_machine("1RB1LE_1LC0LB_0RD0LC_0RA0RZ_1RA1RE"), l) == Decision::halts(true, 185));
  CHECK(decide(parse_machine("1RA1RA"), l) == Decision::non_halting(Reason::HaltUnreachable));
  CHECK(decide(parse_machine("1RB1RZ_1LA0LA"), l) ==
        Decision::no_blank_halt(Reason::BackwardContradiction));
}

TEST_CASE("halt reachability") {
  // {A,B} only reference each other.
  CHECK_FALSE(halt_reachability(parse_machine("1RB0LA_1LA1RB_0RZ0RZ")));
  CHECK(halt_reachability(parse_machine("1RB0LC_0LA0RB_1LA0RZ")));
  CHECK(halt_reachability(parse_machine("1RB---_1LA0LA")));
  CHECK_FALSE(halt_reachability(parse_machine("1RB---_1LB0LB"), StateId(1)));
  CHECK(halt_reachability(parse_machine("1RB---_1LA0LA"), StateId(1)));
}

TEST_CASE("blank halt feasibility") {
  CHECK_FALSE(blank_halt_feasible(parse_machine("1RB1RZ_1LA0LA")));
  CHECK(blank_halt_feasible(parse_machine("1RB1LB_1LA0LC_0RZ0LD_1RD0LB")));
  CHECK_FALSE(blank_halt_feasible(parse_machine("1RB0LA_1LA1RB")));
  // An undefined entry could still become a blank halt.
  CHECK(blank_halt_feasible(parse_machine("1RB1RZ_1LA---")));
}

TEST_CASE("backward reasoning") {
  const auto all_dirty = backward_reasoning(parse_machine("1RB1RZ_1LA1LZ"), 1);
  REQUIRE(all_dirty.has_value());
  CHECK(all_dirty->nodes.empty());
  CHECK(check_backward_proof(parse_machine("1RB1RZ_1LA1LZ"), *all_dirty));

  for (const char* halts : {"0RB0RZ_1LA0RZ", "1RB0LC_0LA0RB_1LA0RZ", "1RB1LB_1LA0LC_0RZ0LD_1RD0LB"}) {
    for (int depth = 1; depth <= 16; ++depth) {
      CHECK_FALSE(backward_reasoning(parse_machine(halts), depth).has_value());
    }
  }

  // The only blank halt is (B,1) -> 0LZ, and the only way into B writes a 1
  // next to the cell B reads, which must be blank.
  const TransitionTable constructed = parse_machine("1RB1RA_0LA0LZ");
  const auto proof = backward_reasoning(constructed, 1);
  REQUIRE(proof.has_value());
  CHECK(proof->max_depth == 1);
  CHECK(check_backward_proof(constructed, *proof));
  // Every variant with the same blank halt and the same single way into B
  // never halts blank.
  for (const char* a1 : {"0RA", "1RA", "0LA", "1LA", "1RZ", "1LZ"}) {
    for (const char* b0 : {"0RA", "1RA", "0LA", "1LA", "1RZ", "1LZ"}) {
      const std::string text = std::string("1RB") + a1 + "_" + b0 + "0LZ";
      CAPTURE(text);
      CHECK(backward_reasoning(parse_machine(text), 2).has_value());
      CHECK(oracle::run(oracle::parse(text), 10'000).kind != oracle::Outcome::HaltBlank);
    }
  }

  // A tampered proof is rejected.
  BackwardProof bad = *proof;
  bad.nodes.front().blocked.clear();
  CHECK_FALSE(check_backward_proof(constructed, bad));
}

TEST_CASE("backward proofs replay on random machines") {
  std::mt19937_64 rng(3);
  int proofs = 0;
  for (int i = 0; i < 3000; ++i) {
    const TransitionTable t = rnd::random_machine(rng, 2 + i % 3, 2, 0.2);
    for (BackwardTarget target : {BackwardTarget::BlankHalt, BackwardTarget::AnyHalt}) {
      const auto proof = backward_reasoning(t, 8, target);
      if (!proof) continue;
      ++proofs;
      CAPTURE(format_machine(t));
      CHECK(check_backward_proof(t, *proof));
      const RunResult r = simulate(t, 20'000);
      if (target == BackwardTarget::BlankHalt) {
        CHECK(r.kind != RunResult::Kind::HaltedBlank);
      } else {
        CHECK(r.kind == RunResult::Kind::Cutoff);
      }
    }
  }
  CHECK(proofs > 100);
}

TEST_CASE("cycler detection") {
  const TransitionTable shuttle = parse_machine("0RB0RZ_0LA0RZ");
  std::vector<Configuration> trace(1);
  for (int i = 0; i < 8; ++i) {
    trace.push_back(trace.back());
    step(trace.back(), shuttle);
  }
  const auto hit = cycler_check(trace);
  REQUIRE(hit.has_value());
  CHECK(hit->second - hit->first == 2);
  DeciderLimits forward = strict_limits(1000);
  forward.backward_depth = 0;  // otherwise the blank-halt check answers first
  CHECK(decide(shuttle, forward) == Decision::non_halting(Reason::CyclerRepeat));

  std::vector<Configuration> halting(1);
  const TransitionTable five = parse_machine("1RB1LE_1LC0LB_0RD0LC_0RA0RZ_1RA1RE");
  while (true) {
    Configuration next = halting.back();
    if (step(next, five) != StepStatus::Running) break;
    halting.push_back(next);
  }
  CHECK_FALSE(cycler_check(halting).has_value());
}

TEST_CASE("cyclers among all 2-state machines are detected") {
  // Reference: full configuration history, exact repeats only.
  std::set<std::uint64_t> periods;
  int cyclers = 0;
  oracle::for_each_machine(2, 2, [&](const oracle::Machine& m) {
    std::vector<oracle::Outcome> history;
    oracle::Outcome o;
    for (int t = 0; t < 60; ++t) {
      o = oracle::run(m, 1, o.tape, o.head, o.state);
      if (o.kind != oracle::Outcome::Running) return;
      // Drop blanks so equal tapes compare equal.
      std::map<std::int64_t, int> clean;
      for (const auto& [p, v] : o.tape) {
        if (v) clean[p] = v;
      }
      o.tape = clean;
      for (std::size_t i = 0; i < history.size(); ++i) {
        const oracle::Outcome& h = history[i];
        if (h.state == o.state && h.head == o.head && h.tape == o.tape) {
          periods.insert(static_cast<std::uint64_t>(t + 1) - (i + 1));
          ++cyclers;
          const std::string text = oracle::format(m);
          CAPTURE(text);
          // The static blank-halt check may answer first.
          const Decision d = decide(parse_machine(text), strict_limits(10'000));
          CHECK((d.verdict == Decision::Verdict::NonHalting ||
                 d.verdict == Decision::Verdict::NoBlankHalt));
          return;
        }
      }
      o.steps = 0;
      history.push_back(o);
    }
  });
  CHECK(cyclers > 0);
  // Each step moves the head by one cell, so exact repeats have even periods.
  for (std::uint64_t p : periods) CHECK(p % 2 == 0);
}

TEST_CASE("escape rule") {
  Configuration c;
  c.head = 3;
  c.steps = 4;
  CHECK(escape_check(c));
  c.head = 2;
  CHECK_FALSE(escape_check(c));
  c.head = -3;
  CHECK(escape_check(c));
  DeciderLimits l;
  l.max_steps = 1000;
  l.backward_depth = 0;
  // Runs right forever; flagged at the first checked step.
  const TransitionTable runner = parse_machine("1RB1RZ_1RB1RB");
  Configuration d;
  const RunOutcome out = run_checked(d, runner, l);
  CHECK(out.event == RunOutcome::Event::Escape);
  CHECK(d.steps == 2);
}

TEST_CASE("known-bound cutoff") {
  DeciderLimits l;
  const TransitionTable four = parse_machine("1RB1LB_1LA0LC_0RZ0LD_1RD0LB");
  CHECK(known_bound_cutoff(four, 108, l) == Decision::non_halting(Reason::KnownBoundExceeded));
  CHECK_FALSE(known_bound_cutoff(four, 107, l).has_value());
  const TransitionTable five = parse_machine("1RB1LE_1LC0LB_0RD0LC_0RA0RZ_1RA1RE");
  CHECK(known_bound_cutoff(five, 47'176'871, l).has_value());
  CHECK_FALSE(known_bound_cutoff(five, 107, l).has_value());
  CHECK_FALSE(known_bound_cutoff(five, 47'176'870, l).has_value());

  const KnownBounds parsed = KnownBounds::parse("# comment\n4 2 107\n\n2 4 3932964 # BB(2,4)\n");
  CHECK(parsed.bound_for(2, 2) == 107u);
  CHECK(parsed.bound_for(2, 3) == 3'932'964u);
  CHECK_FALSE(parsed.bound_for(5, 2).has_value());
  CHECK(KnownBounds::parse(parsed.to_text()) == parsed);
  CHECK_THROWS(KnownBounds::parse("4 2"));
  CHECK_THROWS(KnownBounds::parse("4 two 107"));
}

TEST_CASE("limits validation") {
  DeciderLimits l;
  l.max_steps = 0;
  CHECK_THROWS(l.validate());
  l.max_steps = 1;
  CHECK_NOTHROW(l.validate());
  l.backward_depth = -1;
  CHECK_THROWS(l.validate());
}

TEST_CASE("decide is monotone in the cap") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1500; ++i) {
    const TransitionTable t = rnd::random_machine(rng, 2 + i % 3, 2 + (i / 3) % 2, 0.1);
    CAPTURE(format_machine(t));
    const Decision low = decide(t, strict_limits(200));
    const Decision high = decide(t, strict_limits(20'000));
    if (low.conclusive()) CHECK(high == low);
  }
}

TEST_CASE("soundness sampling on random machines") {
  std::mt19937_64 rng(17);
  int flagged = 0;
  for (int i = 0; i < 6000; ++i) {
    const TransitionTable t = rnd::random_machine(rng, 2 + i % 4, 2 + (i / 4) % 2, 0.15);
    DeciderLimits l;
    l.max_steps = 2000;
    l.escape_enabled = false;
    const Decision d = decide(t, l);
    if (d.verdict != Decision::Verdict::NonHalting && d.verdict != Decision::Verdict::NoBlankHalt) {
      continue;
    }
    ++flagged;
    const oracle::Outcome o = oracle::run(oracle::parse(format_machine(t)), 100'000);
    CAPTURE(format_machine(t));
    CHECK(o.kind != oracle::Outcome::HaltBlank);
    if (d.verdict == Decision::Verdict::NonHalting) CHECK(o.kind == oracle::Outcome::Running);
  }
  CHECK(flagged > 1000);
}
