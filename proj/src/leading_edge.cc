#include "seasky/leading_edge.h"

#include <stdexcept>

namespace seasky {

LineScan detect_leading_edge(const PolarSonarImage& img, double tau,
                             SonarSource source) {
  if (!(tau > 0.0 && tau < 256.0))
    throw std::invalid_argument("leading-edge threshold must lie in (0, 256)");
  const auto& in = img.intrinsics();
  LineScan scan;
  scan.source = source;
  scan.timestamp = img.timestamp();
  for (int c = 0; c < img.cols(); ++c) {
    for (int r = 0; r < img.rows(); ++r) {
      const double v = img.at(r, c);
      if (v > tau) {
        const double bearing = bearing_of_column(in, c);
        scan.points.push_back(
            {project_planar(range_of_bin(in, r), bearing, v), bearing, {r, c}});
        break;
      }
    }
  }
  return scan;
}

}  // namespace seasky
