#include "pgl/distribution.hpp"

#include <cstdio>
#include <ostream>

namespace pgl {

double CountDistribution::total_mass() const {
  double s = 0.0;
  for (const auto& [m, p] : pmf) s += p;
  return s;
}

double CountDistribution::mean() const {
  double s = 0.0;
  for (const auto& [m, p] : pmf) s += static_cast<double>(m) * p;
  return s;
}

void write_distribution_csv(std::ostream& out, const CountDistribution& d) {
  out << "m,probability\n";
  char buf[64];
  for (const auto& [m, p] : d.pmf) {
    std::snprintf(buf, sizeof buf, "%.17g", p);
    out << m << ',' << buf << '\n';
  }
}

}  // namespace pgl
