#pragma once

#include <vector>

#include "seasky/sonar_core.h"

namespace seasky {

struct EdgePoint {
  CartesianPoint point;  // sonar's own frame, z = 0
  double bearing = 0.0;
  PolarIndex origin;
};

struct LineScan {
  SonarSource source = SonarSource::kHorizontal;
  double timestamp = 0.0;
  std::vector<EdgePoint> points;  // at most one per column, ascending column
};

struct LeadingEdgeConfig {
  double tau_horizontal = 80.0;
  double tau_vertical = 130.0;

  double tau(SonarSource s) const {
    return s == SonarSource::kHorizontal ? tau_horizontal : tau_vertical;
  }
};

// For every column the first bin with intensity strictly above tau; the edge
// is reported at that bin's center range. Columns without an exceedance emit
// nothing. Throws std::invalid_argument unless 0 < tau < 256.
LineScan detect_leading_edge(const PolarSonarImage& img, double tau,
                             SonarSource source = SonarSource::kHorizontal);

}  // namespace seasky
