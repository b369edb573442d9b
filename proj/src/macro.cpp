#include "castor/macro.hpp"

#include <charconv>
#include <sstream>

#include "castor/simulator.hpp"

namespace castor::macro {

namespace {

constexpr int kStateC = 2;

std::optional<std::int64_t> parse_int(std::string_view text) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

MacroStep make(const MacroConfig& from, std::optional<MacroConfig> to, std::int64_t cost,
               Rule rule, bool blank_halt = false) {
  return MacroStep{from, to, static_cast<std::uint64_t>(cost), rule, blank_halt};
}

std::string endpoint(const std::optional<MacroConfig>& mc, bool is_from) {
  return mc ? to_string(*mc) : (is_from ? "START" : "HALT");
}

std::optional<MacroConfig> parse_config(std::string_view text) {
  if (text.size() < 7 || text.substr(0, 2) != "C(" || text.back() != ')') return std::nullopt;
  text = text.substr(2, text.size() - 3);
  MacroConfig mc;
  std::int64_t* fields[] = {&mc.k0, &mc.k1, &mc.k2};
  for (int i = 0; i < 3; ++i) {
    const std::size_t comma = i < 2 ? text.find(',') : text.size();
    if (comma == std::string_view::npos) return std::nullopt;
    const auto value = parse_int(text.substr(0, comma));
    if (!value || *value < 0) return std::nullopt;
    *fields[i] = *value;
    text = i < 2 ? text.substr(comma + 1) : std::string_view{};
  }
  return mc;
}

// Equal state, equal trimmed contents, equal head offset from the contents.
bool same_up_to_translation(const Configuration& a, const Configuration& b) {
  if (a.state != b.state) return false;
  std::int64_t first_a = 0, first_b = 0;
  const std::vector<Symbol> ta = a.tape.trimmed(&first_a);
  const std::vector<Symbol> tb = b.tape.trimmed(&first_b);
  if (ta != tb) return false;
  return ta.empty() || a.head - first_a == b.head - first_b;
}

}  // namespace

const TransitionTable& champion() {
  static const TransitionTable table = parse_machine(kChampion);
  return table;
}

std::string to_string(const MacroConfig& mc) {
  return "C(" + std::to_string(mc.k0) + "," + std::to_string(mc.k1) + "," +
         std::to_string(mc.k2) + ")";
}

std::string to_string(const Rule& rule) {
  using K = Rule::Kind;
  switch (rule.kind) {
    case K::Start: return "Start";
    case K::Case1: return "Case1";
    case K::Case2_1: return "Case2.1";
    case K::Case2_2a: return "Case2.2a";
    case K::Case2_2b: return "Case2.2b";
    case K::Case2_3a: return "Case2.3a";
    case K::Case2_3b: return "Case2.3b";
    case K::ClosedForm:
      return "ClosedForm(r=" + std::to_string(rule.r) + ",m=" + std::to_string(rule.m) + ")";
  }
  return "?";
}

std::optional<Rule> parse_rule(std::string_view text) {
  using K = Rule::Kind;
  static const std::pair<std::string_view, K> simple[] = {
      {"Start", K::Start},       {"Case1", K::Case1},       {"Case2.1", K::Case2_1},
      {"Case2.2a", K::Case2_2a}, {"Case2.2b", K::Case2_2b}, {"Case2.3a", K::Case2_3a},
      {"Case2.3b", K::Case2_3b},
  };
  for (const auto& [name, kind] : simple) {
    if (text == name) return Rule{kind, 0, 0};
  }
  constexpr std::string_view prefix = "ClosedForm(r=";
  if (text.substr(0, prefix.size()) != prefix || text.back() != ')') return std::nullopt;
  text = text.substr(prefix.size(), text.size() - prefix.size() - 1);
  const std::size_t sep = text.find(",m=");
  if (sep == std::string_view::npos) return std::nullopt;
  const auto r = parse_int(text.substr(0, sep));
  const auto m = parse_int(text.substr(sep + 3));
  if (!r || !m || *r < 0 || *r > 3 || *m < 0) return std::nullopt;
  return Rule{K::ClosedForm, static_cast<int>(*r), *m};
}

Configuration expand(const MacroConfig& mc) {
  if (mc.k0 < 0 || mc.k1 < 0 || mc.k2 < 0) throw DomainError("negative block length");
  Configuration config;
  const std::int64_t end = mc.k0 + mc.k1 + mc.k2;
  for (std::int64_t p = 0; p <= end; ++p) {
    config.tape.visit(p);
    if (p != mc.k0) config.tape.write(p, 1);
  }
  config.head = mc.k0 + mc.k1;
  config.tape.visit(config.head);
  config.state = StateId(kStateC);
  return config;
}

MacroStep macro_step(const MacroConfig& mc) {
  using K = Rule::Kind;
  const auto [k0, k1, k2] = mc;
  if (k0 < 0 || k1 < 0 || k2 < 0) throw DomainError("negative block length");
  if (k1 == 0) {
    if (k2 < 2) throw DomainError(to_string(mc) + ": case 1 needs k2 >= 2");
    return make(mc, MacroConfig{k0 + 1, k2 - 1, 2}, k2 + 4, {K::Case1});
  }
  switch (k2 % 3) {
    case 0: return make(mc, std::nullopt, k2 + 2, {K::Case2_1}, k0 == 0 && k1 == 1);
    case 1:
      if (k1 >= 2) return make(mc, MacroConfig{k0, k1 - 2, k2 + 4}, 2 * k2 + 6, {K::Case2_2a});
      if (k0 >= 1) return make(mc, MacroConfig{0, k0 - 1, k2 + 5}, 2 * k2 + 7, {K::Case2_2b});
      break;
    default:
      if (k1 >= 2) return make(mc, MacroConfig{k0, k1 - 2, k2 + 5}, 2 * k2 + 10, {K::Case2_3a});
      if (k0 >= 1) return make(mc, MacroConfig{0, k0 - 1, k2 + 6}, 2 * k2 + 11, {K::Case2_3b});
      break;
  }
  throw DomainError(to_string(mc) + ": k1 = 1 with k0 = 0 is not covered");
}

MacroStep closed_form_step(const MacroConfig& mc) {
  const auto [k0, k1, k2] = mc;
  if (k0 < 0 || k1 < 0 || k2 < 2 || k2 % 3 != 2) {
    throw DomainError(to_string(mc) + ": closed forms need k2 = 2 (mod 3)");
  }
  const std::int64_t m = k1 / 4;
  const int r = static_cast<int>(k1 % 4);
  if (r % 2 == 1 && k0 < 1) throw DomainError(to_string(mc) + ": odd k1 needs k0 >= 1");
  const Rule rule{Rule::Kind::ClosedForm, r, m};
  const std::int64_t base = 4 * m * k2 + 18 * m * m;
  switch (r) {
    case 0: return make(mc, MacroConfig{k0 + 1, k2 + 9 * m - 1, 2}, base + k2 + 17 * m + 4, rule);
    case 1: return make(mc, MacroConfig{0, k0 - 1, k2 + 9 * m + 6}, base + 2 * k2 + 26 * m + 11, rule);
    case 2: return make(mc, MacroConfig{k0 + 1, k2 + 9 * m + 4, 2}, base + 3 * k2 + 35 * m + 19, rule);
    default: return make(mc, MacroConfig{0, k0 - 1, k2 + 9 * m + 10}, base + 4 * k2 + 44 * m + 27, rule);
  }
}

MacroStep fold(const MacroConfig& mc) {
  using K = Rule::Kind;
  if (mc.k2 % 3 != 2) throw DomainError(to_string(mc) + ": folds start at k2 = 2 (mod 3)");
  MacroStep total{mc, mc, 0, Rule{K::ClosedForm, static_cast<int>(mc.k1 % 4), mc.k1 / 4}, false};
  while (true) {
    const MacroStep s = macro_step(*total.to);
    total.cost += s.cost;
    total.to = s.to;
    if (s.rule.kind == K::Case1 || s.rule.kind == K::Case2_2b || s.rule.kind == K::Case2_3b) break;
    if (s.rule.kind == K::Case2_1) throw DomainError(to_string(mc) + ": fold reached a halt");
  }
  return total;
}

MacroStep start_step() { return MacroStep{std::nullopt, MacroConfig{0, 0, 2}, 3, {}, false}; }

std::uint64_t Certificate::total() const {
  std::uint64_t sum = 0;
  for (const MacroStep& s : steps) sum += s.cost;
  return sum;
}

Certificate build_certificate() {
  Certificate cert;
  cert.steps.push_back(start_step());
  while (cert.steps.back().to) {
    const MacroConfig& mc = *cert.steps.back().to;
    cert.steps.push_back(mc.k1 < 2 || mc.k2 % 3 != 2 ? macro_step(mc) : closed_form_step(mc));
    if (cert.steps.size() > 1000) throw DomainError("certificate chain does not terminate");
  }
  return cert;
}

bool cross_check(const MacroStep& step) {
  const TransitionTable& table = champion();
  Configuration config = step.from ? expand(*step.from) : Configuration{};
  const std::uint64_t start = config.steps;
  const StepStatus status = run(config, table, start + step.cost);
  if (config.steps - start != step.cost) return false;
  if (!step.to) return status == StepStatus::Halted && config.tape.blank() == step.blank_halt;
  return status == StepStatus::Running && same_up_to_translation(config, expand(*step.to));
}

std::string export_certificate(const Certificate& cert) {
  std::ostringstream out;
  for (const MacroStep& s : cert.steps) {
    out << endpoint(s.from, true) << " -> " << endpoint(s.to, false) << ' ' << s.cost << ' '
        << to_string(s.rule);
    if (!s.to) out << (s.blank_halt ? " blank" : " dirty");
    out << '\n';
  }
  out << "total " << cert.total() << '\n';
  return out.str();
}

Certificate parse_certificate(std::string_view text) {
  Certificate cert;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool seen_total = false;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("certificate line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (seen_total) fail("content after the total line");
    if (tok[0] == "total") {
      const auto total = tok.size() == 2 ? parse_int(tok[1]) : std::nullopt;
      if (!total || *total < 0) fail("bad total line");
      cert.stated_total = static_cast<std::uint64_t>(*total);
      seen_total = true;
      continue;
    }
    if (tok.size() < 5 || (tok[1] != "->" && tok[1] != "→")) fail("expected 'from -> to cost rule'");
    MacroStep s;
    if (tok[0] != "START") {
      s.from = parse_config(tok[0]);
      if (!s.from) fail("bad configuration '" + tok[0] + "'");
    }
    if (tok[2] != "HALT") {
      s.to = parse_config(tok[2]);
      if (!s.to) fail("bad configuration '" + tok[2] + "'");
    }
    const auto cost = parse_int(tok[3]);
    if (!cost || *cost < 0) fail("bad cost '" + tok[3] + "'");
    s.cost = static_cast<std::uint64_t>(*cost);
    const auto rule = parse_rule(tok[4]);
    if (!rule) fail("unknown rule '" + tok[4] + "'");
    s.rule = *rule;
    const std::size_t expected = s.to ? 5 : 6;
    if (tok.size() != expected) fail("wrong number of fields");
    if (!s.to) {
      if (tok[5] != "blank" && tok[5] != "dirty") fail("expected 'blank' or 'dirty'");
      s.blank_halt = tok[5] == "blank";
    }
    cert.steps.push_back(s);
  }
  if (!seen_total) throw std::invalid_argument("certificate has no total line");
  return cert;
}

VerifyResult verify_certificate(const Certificate& cert) {
  const auto& steps = cert.steps;
  if (steps.empty()) return {false, "empty certificate"};
  if (steps.front().from) return {false, "first step does not start at START"};
  if (steps.back().to) return {false, "last step does not end at HALT"};
  if (!steps.back().blank_halt) return {false, "final halt is not on a blank tape"};
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const MacroStep& s = steps[i];
    const std::string where = "step " + std::to_string(i + 1) + " (" + endpoint(s.from, true) +
                              " -> " + endpoint(s.to, false) + ")";
    if (i > 0 && steps[i - 1].to != s.from) return {false, where + ": does not chain"};
    if (i + 1 < steps.size() && !s.to) return {false, where + ": halts before the end"};
    MacroStep expected;
    try {
      if (!s.from) {
        expected = start_step();
      } else if (s.rule.kind == Rule::Kind::ClosedForm) {
        expected = closed_form_step(*s.from);
      } else {
        expected = macro_step(*s.from);
      }
    } catch (const DomainError& e) {
      return {false, where + ": " + e.what()};
    }
    if (expected != s) return {false, where + ": rule " + to_string(s.rule) + " predicts " +
                                          endpoint(expected.to, false) + " in " +
                                          std::to_string(expected.cost) + " steps"};
    if (!cross_check(s)) return {false, where + ": direct simulation disagrees"};
  }
  if (cert.stated_total && *cert.stated_total != cert.total()) {
    return {false, "stated total " + std::to_string(*cert.stated_total) + " != sum " +
                       std::to_string(cert.total())};
  }
  return {true, std::to_string(steps.size()) + " macro steps, total " +
                    std::to_string(cert.total())};
}

}  // namespace castor::macro
