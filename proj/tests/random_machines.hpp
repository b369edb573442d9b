// Random complete machines for property tests.

#pragma once

#include <random>

#include "castor/machine.hpp"

namespace rnd {

inline castor::TransitionTable random_machine(std::mt19937_64& rng, int n, int m,
                                              double halt_share = 0.0) {
  castor::TransitionTable t(n, m);
  std::uniform_int_distribution<int> write(0, m - 1), next(0, n), coin(0, 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < n; ++s) {
    for (int r = 0; r < m; ++r) {
      const int target = unit(rng) < halt_share ? n : next(rng);
      t.set(castor::StateId(s), static_cast<castor::Symbol>(r),
            castor::Transition{static_cast<castor::Symbol>(write(rng)),
                               coin(rng) ? castor::Move::Right : castor::Move::Left,
                               target == n ? castor::StateId::halt() : castor::StateId(target)});
    }
  }
  return t;
}

}  // namespace rnd
