#pragma once

// Hard-decision receivers for the two effective channels:
// diagonal (per-subchannel slicing) and upper triangular (SIC).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mimo/matcore.hpp"
#include "mimo/modem.hpp"

namespace mimo {

struct DetectionResult {
  std::vector<std::size_t> per_stream_indices;
  std::vector<std::uint32_t> per_stream_labels;  // bit pattern of each decision, MSB first

  std::vector<std::uint8_t> bits(const ModulationSet& set) const;
};

/// Stream k is sliced independently: nearest_point(z[k] / (gain * deltas[k])).
DetectionResult svd_detect(std::span<const cplx> z, std::span<const double> deltas,
                           const ModulationSet& set, double gain);

/// Back-substitution from the last stream to the first, cancelling the
/// hard decisions already made.
DetectionResult sic_detect(std::span<const cplx> z, const ComplexMatrix& r_mat,
                           const ModulationSet& set, double gain);

}  // namespace mimo
