#pragma once

// Exact finite-horizon value of the line worlds in models/: positions
// 0..10, goal 3, moves of +-1 that succeed with probability `success`,
// reward 10 on the first arrival at the goal.

#include <algorithm>

namespace ppw::test {

inline double line_value(int pos, bool done, int t, int horizon, double discount, double success) {
  double r = (pos == 3 && !done) ? 10.0 : 0.0;
  if (t == horizon) return r;
  bool next_done = done || pos == 3;
  auto after = [&](int p) { return line_value(p, next_done, t + 1, horizon, discount, success); };
  double stay = after(pos);
  if (pos == 3) return r + discount * stay;
  double best = -1.0;
  if (pos < 10) best = std::max(best, success * after(pos + 1) + (1.0 - success) * stay);
  if (pos > 0) best = std::max(best, success * after(pos - 1) + (1.0 - success) * stay);
  return r + discount * best;
}

}  // namespace ppw::test
