// Serial reference vs. OpenMP search on one class. Prints wall times and
// checks that every variant produced the same report.

#include <chrono>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "castor/search.hpp"

using namespace castor;

namespace {

template <class F>
double timed(F&& f, SearchReport& out) {
  const auto t0 = std::chrono::steady_clock::now();
  out = f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"search benchmark"};
  int states = 4, symbols = 2, repeats = 3;
  std::uint64_t max_steps = 10'000;
  std::vector<int> workers{1, 2, 4};
  app.add_option("--states", states)->capture_default_str();
  app.add_option("--symbols", symbols)->capture_default_str();
  app.add_option("--max-steps", max_steps)->capture_default_str();
  app.add_option("--workers", workers)->capture_default_str();
  app.add_option("--repeats", repeats)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  SearchConfig config;
  config.n_states = states;
  config.n_symbols = symbols;
  config.limits.max_steps = max_steps;
  config.strict = true;

  SearchReport reference;
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) best = std::min(best, timed([&] { return run_search_serial(config); }, reference));
  std::printf("class (%d,%d) cap %llu, %llu machines\n", states, symbols,
              static_cast<unsigned long long>(max_steps),
              static_cast<unsigned long long>(reference.emitted()));
  std::printf("%-10s %10.3fs\n", "serial", best);

  bool same = true;
  for (int w : workers) {
    config.workers = w;
    SearchReport r;
    double t = 1e300;
    for (int i = 0; i < repeats; ++i) t = std::min(t, timed([&] { return run_search(config); }, r));
    same = same && r.same_results(reference);
    std::printf("omp x%-5d %10.3fs  speedup %.2f\n", w, t, best / t);
  }
  std::printf("reports %s\n", same ? "identical" : "DIFFER");
  return same ? 0 : 1;
}
