#include "distrep/types.hpp"

namespace distrep {

std::vector<double> default_prob_grid(std::size_t m) {
  if (m == 0) raise(Errc::invalid_argument, "probability grid needs at least one point");
  std::vector<double> p(m);
  for (std::size_t k = 0; k < m; ++k) {
    p[k] = (static_cast<double>(k) + 0.5) / static_cast<double>(m);
  }
  return p;
}

std::vector<double> default_support_grid() {
  std::vector<double> g(721);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 40.0 + 0.5 * static_cast<double>(i);
  return g;
}

}  // namespace distrep
