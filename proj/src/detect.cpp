#include "mimo/detect.hpp"

#include <cmath>

#include "mimo/errors.hpp"

namespace mimo {

std::vector<std::uint8_t> DetectionResult::bits(const ModulationSet& set) const {
  std::vector<std::uint8_t> out;
  out.reserve(set.total_bits);
  for (std::size_t k = 0; k < per_stream_labels.size(); ++k) {
    const auto b = label_bits(per_stream_labels[k],
                              constellation(set.per_stream[k]).bits_per_symbol);
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

DetectionResult svd_detect(std::span<const cplx> z, std::span<const double> deltas,
                           const ModulationSet& set, double gain) {
  const std::size_t n = set.streams();
  if (z.size() != n || deltas.size() != n) throw InvalidInput("svd_detect: dimension mismatch");
  if (!(gain > 0.0)) throw InvalidInput("svd_detect: gain must be positive");

  DetectionResult out{std::vector<std::size_t>(n), std::vector<std::uint32_t>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    if (!(deltas[k] > 0.0)) throw RankDeficiency("svd_detect: non-positive subchannel gain");
    const Constellation& c = constellation(set.per_stream[k]);
    const std::size_t idx = nearest_point(z[k] / (gain * deltas[k]), c);
    out.per_stream_indices[k] = idx;
    out.per_stream_labels[k] = c.labels[idx];
  }
  return out;
}

DetectionResult sic_detect(std::span<const cplx> z, const ComplexMatrix& r_mat,
                           const ModulationSet& set, double gain) {
  const std::size_t n = set.streams();
  if (z.size() != n || r_mat.rows() != n || r_mat.cols() != n) {
    throw InvalidInput("sic_detect: dimension mismatch");
  }
  if (!(gain > 0.0)) throw InvalidInput("sic_detect: gain must be positive");
  for (std::size_t k = 0; k < n; ++k) {
    if (!(r_mat(k, k).real() > 0.0) || r_mat(k, k).imag() != 0.0) {
      throw InvalidInput("sic_detect: diagonal must be real and positive");
    }
  }

  DetectionResult out{std::vector<std::size_t>(n), std::vector<std::uint32_t>(n)};
  std::vector<cplx> decided(n);
  for (std::size_t k = n; k-- > 0;) {
    cplx residual = z[k];
    for (std::size_t j = k + 1; j < n; ++j) residual -= gain * r_mat(k, j) * decided[j];
    const Constellation& c = constellation(set.per_stream[k]);
    const std::size_t idx = nearest_point(residual / (gain * r_mat(k, k).real()), c);
    decided[k] = c.points[idx];
    out.per_stream_indices[k] = idx;
    out.per_stream_labels[k] = c.labels[idx];
  }
  return out;
}

}  // namespace mimo
