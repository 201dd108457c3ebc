#pragma once

#include <cstdint>
#include <string>

namespace rrf::acceptance {

struct Outcome {
  bool pass = false;
  std::string summary;
  std::string report;  // deterministic JSON; compared byte-for-byte on rerun
  double seconds = 0.0;
};

Outcome scattering_algebra(std::uint64_t seed);
Outcome simulator_vs_matrix(std::uint64_t seed);
Outcome line_intensity(std::uint64_t seed);
Outcome annealed_law(std::uint64_t seed);
Outcome angle_law(std::uint64_t seed);
Outcome distance_law(std::uint64_t seed);
Outcome quenched_stationarity(std::uint64_t seed);
Outcome regimes(std::uint64_t seed);
Outcome recurrence(std::uint64_t seed);

}  // namespace rrf::acceptance
