#pragma once

#include <vector>

namespace bergerdeck {

/// Two consecutive time levels of the deflection; the velocity is the
/// backward difference (u_curr - u_prev) / dt.
struct SimState {
  std::vector<double> u_curr;
  std::vector<double> u_prev;
  double t = 0.0;
  long step_index = 0;
  double dt = 0.0;

  std::vector<double> velocity() const {
    std::vector<double> v(u_curr.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (u_curr[i] - u_prev[i]) / dt;
    return v;
  }
};

}  // namespace bergerdeck
