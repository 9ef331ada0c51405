#pragma once

#include <cstdint>
#include <vector>

namespace kslab {

// Cell-averaged scalar field bound to one grid. The grid_id token lets every
// operator reject fields built on a different discretization.
struct Field {
  std::uint64_t grid_id = 0;
  std::vector<double> values;

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

}  // namespace kslab
